"""What rectification does to a sine wave, seen from the frequency domain.

Rectifying sin(2*pi*4*t) adds a DC term, halves the fundamental and spawns
even harmonics at 8, 16, 24, ... Hz whose leading ratio is 4/(3*pi).  Push
the sine above a quarter of the sampling rate and the second harmonic folds
back below Nyquist instead (aliasing).  Writes the same CSVs as the
`spectralnn analyze-spectrum` command and prints the headline numbers.
"""

import sys

import numpy as np

from spectralnn.analysis import rectified, run_analysis, sine_wave, spectrum_rows

out_dir = sys.argv[1] if len(sys.argv) > 1 else "spectra_out"
files = run_analysis(out_dir)
print(f"wrote {len(files)} CSVs to {out_dir}/")

mags = dict(spectrum_rows(rectified(sine_wave(4))))
print("\nrectified sin(2*pi*4*t), Fs = 100:")
for offset in (0, 4, 8, 16, 24):
    print(f"  bin {offset:>2}: {mags[offset]:8.4f}")
ratio = mags[8] / mags[4]
print(f"  second/first harmonic ratio: {ratio:.6f} (series value {4/(3*np.pi):.6f})")
print(f"  alias floor at bin 12 (fold-back of harmonic 88): {mags[12]:.4f}")

mags40 = dict(spectrum_rows(rectified(sine_wave(40))))
print("\nrectified sin(2*pi*40*t): second harmonic would sit at 80 Hz,")
print(f"  above Nyquist (50), so it folds to bin 20: {mags40[20]:8.4f}")
