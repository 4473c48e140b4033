"""Sine/ReLU spectrum analysis: harmonic structure, series values, aliasing."""

import numpy as np
import pytest

from spectralnn.analysis import (
    partial_reconstruction,
    rectified,
    run_analysis,
    series_coefficient,
    sine_wave,
    spectrum_rows,
)

from oracles import rectified_sine_bin_exact


def magnitudes(rows):
    return {offset: mag for offset, mag in rows}


class TestSpectra:
    def test_pure_sine_rows(self):
        mags = magnitudes(spectrum_rows(sine_wave(4)))
        assert mags[4] == pytest.approx(50.0, abs=1e-9)
        assert mags[-4] == pytest.approx(50.0, abs=1e-9)
        assert max(v for k, v in mags.items() if k not in (4, -4)) < 1e-9

    def test_rectified_sine_even_harmonic_support(self):
        mags = magnitudes(spectrum_rows(rectified(sine_wave(4))))
        strong = {0, 4, -4, 8, -8, 16, -16, 24, -24, 32, -32, 40, -40, 48, -48}
        for offset in strong:
            assert mags[offset] > 1e-9
        # Bins off the 4-lattice are exact zeros of the 25-periodic signal.
        off_lattice = [v for k, v in mags.items() if k % 4 != 0]
        assert max(off_lattice) < 1e-9

    def test_rectified_sine_matches_exact_oracle_including_aliases(self):
        # The sampled DFT carries alias fold-back at odd multiples of 4
        # (harmonics 56, 64, ... fold below Nyquist); the oracle is an exact
        # geometric-sum evaluation at 50 digits.
        mags = magnitudes(spectrum_rows(rectified(sine_wave(4))))
        for offset in (0, 4, 8, 12, 16, 20, 44):
            expected = abs(rectified_sine_bin_exact(4, offset))
            assert mags[offset] == pytest.approx(expected, abs=1e-10)
        assert mags[12] == pytest.approx(0.13042698192161862, abs=1e-10)

    def test_high_frequency_sine_aliases_to_bin_20(self):
        mags = magnitudes(spectrum_rows(rectified(sine_wave(40))))
        assert mags[20] > 1.0
        assert mags[40] == pytest.approx(25.0, abs=1.0)

    def test_second_to_first_harmonic_ratio_near_series_value(self):
        # Series value 4/(3pi); the sampled DFT lands ~1.7e-3 above it, an
        # alias offset pinned here against the exact oracle.
        mags = magnitudes(spectrum_rows(rectified(sine_wave(4))))
        ratio = mags[8] / mags[4]
        exact = abs(rectified_sine_bin_exact(4, 8)) / abs(rectified_sine_bin_exact(4, 4))
        assert ratio == pytest.approx(exact, abs=1e-12)
        assert ratio == pytest.approx(4 / (3 * np.pi), abs=2e-3)


class TestReconstructions:
    def test_term_count_controls_support(self):
        rows1 = magnitudes(spectrum_rows(partial_reconstruction(1)))
        assert rows1[0] == pytest.approx(100 / np.pi, abs=1e-9)
        assert max(v for k, v in rows1.items() if k != 0) < 1e-9

        rows3 = magnitudes(spectrum_rows(partial_reconstruction(3)))
        assert rows3[4] == pytest.approx(25.0, abs=1e-9)
        assert rows3[8] == pytest.approx(100 / (3 * np.pi), abs=1e-9)
        assert rows3[16] < 1e-9

        rows4 = magnitudes(spectrum_rows(partial_reconstruction(4)))
        assert rows4[16] == pytest.approx(50 * series_coefficient(2), abs=1e-9)

    def test_reconstruction_converges_toward_rectified_sine(self):
        target = rectified(sine_wave(4))
        errors = [
            np.max(np.abs(partial_reconstruction(k) - target)) for k in (1, 2, 3, 4)
        ]
        assert errors == sorted(errors, reverse=True)


class TestRunAnalysis:
    def test_emits_all_files(self, tmp_path):
        files = run_analysis(tmp_path / "out")
        names = set(files)
        assert names == {
            "sine_f4.csv",
            "rectified_sine_f4.csv",
            "reconstruction_terms1.csv",
            "reconstruction_terms2.csv",
            "reconstruction_terms3.csv",
            "reconstruction_terms4.csv",
            "rectified_sine_f40.csv",
        }
        header = files["sine_f4.csv"].read_text().splitlines()[0]
        assert header == "bin,magnitude"

    def test_byte_identical_across_runs(self, tmp_path):
        first = run_analysis(tmp_path / "a")
        second = run_analysis(tmp_path / "b")
        for name in first:
            assert first[name].read_bytes() == second[name].read_bytes()

    def test_unwritable_target_raises_oserror(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        with pytest.raises(OSError):
            run_analysis(blocker / "sub")
