"""Sine-wave rectification in the frequency domain.

With Fs = 100 over a unit interval (100 samples), rectifying a sine of
frequency f spreads it into a DC term, the fundamental at half amplitude and
even harmonics 2f, 4f, ...; the closed-form series is

    A/pi + (A/2) sin(wt) - (2A/pi) sum_k cos(2k wt) / (4k^2 - 1).

Sampling adds alias fold-back: series harmonics above Nyquist (here 56, 64,
... for f=4) fold onto odd multiples of f with magnitudes around 0.1-0.2,
and for f > Fs/4 the second harmonic itself folds below the fundamental
(f=40 puts it at bin 20).  The emitted spectra are honest sampled DFTs and
contain that fold-back.

All outputs are pure functions of the constants here, so files are
byte-identical across runs.
"""

from pathlib import Path

import numpy as np

from .fourier import dft1, freq_offsets

SAMPLE_RATE = 100
SAMPLE_COUNT = 100


def sine_wave(freq, n=SAMPLE_COUNT):
    return np.sin(2 * np.pi * freq * np.arange(n) / n)


def rectified(x):
    return np.maximum(x, 0.0)


def series_coefficient(k):
    """Amplitude of the 2k-th harmonic cosine term, A = 1."""
    return 2.0 / (np.pi * (4 * k * k - 1))


def partial_reconstruction(terms, freq=4, n=SAMPLE_COUNT):
    """Cumulative series sum with the first `terms` components.

    Component order: DC, fundamental, then even harmonics 2f, 4f, ...
    """
    if terms < 1:
        raise ValueError("need at least one term")
    t = np.arange(n) / n
    w = 2 * np.pi * freq
    components = [np.full(n, 1.0 / np.pi), 0.5 * np.sin(w * t)]
    k = 1
    while len(components) < terms:
        components.append(-series_coefficient(k) * np.cos(2 * k * w * t))
        k += 1
    return np.sum(components[:terms], axis=0)


def spectrum_rows(signal):
    """(offset, magnitude) rows of the centered 1D spectrum."""
    spec = dft1(signal)
    offsets = freq_offsets(spec.width)
    return list(zip(offsets.tolist(), spec.magnitude[0].tolist()))


def _write_csv(path, rows):
    lines = ["bin,magnitude"]
    lines += [f"{offset},{magnitude!r}" for offset, magnitude in rows]
    Path(path).write_text("\n".join(lines) + "\n")


def run_analysis(out_dir):
    """Emit the sine/rectified-sine spectra and series reconstructions."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise OSError(f"cannot write to {out}: {exc}") from None

    files = {}

    def emit(name, rows):
        path = out / name
        _write_csv(path, rows)
        files[name] = path

    emit("sine_f4.csv", spectrum_rows(sine_wave(4)))
    emit("rectified_sine_f4.csv", spectrum_rows(rectified(sine_wave(4))))
    for terms in range(1, 5):
        emit(
            f"reconstruction_terms{terms}.csv",
            spectrum_rows(partial_reconstruction(terms)),
        )
    emit("rectified_sine_f40.csv", spectrum_rows(rectified(sine_wave(40))))
    return files
