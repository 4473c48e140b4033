"""A walking tour of the frequency-domain layer set.

Shows the low-frequency update region of the second-harmonic activation on
an 11x11 spectrum, the pointwise sparse layer acting as a learnable filter,
spectral pooling as truncation, and the parameter-count trade against a 3x3
convolution.
"""

import numpy as np

from spectralnn.fourier import dft2
from spectralnn.spatial import Conv2d
from spectralnn.spectral import (
    SparseLayer,
    SpectralPool,
    SpectralTensor,
    TwoSReLU,
    low_frequency_region,
)

# Region geometry: which components get their second harmonic mixed in.
reg = low_frequency_region(11, 11)
grid = [["." for _ in range(11)] for _ in range(11)]
for r, c in zip(reg.member_rows, reg.member_cols):
    grid[r][c] = "o"
for r, c in zip(reg.harmonic_rows, reg.harmonic_cols):
    grid[r][c] = "+" if grid[r][c] == "." else "*"
grid[5][5] = "D"
print("11x11 spectrum, DC centered (D); updated components (o),")
print("their second harmonics (+), overlaps (*):")
print("\n".join(" ".join(row) for row in grid))
print(f"{len(reg.members)} updated components\n")

# A sparse layer with unit weights is the identity; learnable magnitude and
# phase planes make it an arbitrary pointwise filter.
rng = np.random.default_rng(1)
image = rng.random((28, 28))
spec = dft2(image)
x = SpectralTensor(spec.magnitude[None, None], spec.phase[None, None])
layer = SparseLayer(1, 1, 28, 28, rng)
layer.w_magnitude.value[:] = 1.0
layer.w_phase.value[:] = 0.0
out = layer.forward(x)
print(f"unit sparse layer changes nothing: "
      f"max |out - in| = {np.max(np.abs(out.to_complex() - x.to_complex())):.2e}")

# The harmonic activation and pooling compose into the standard block.
act = TwoSReLU()
pooled = SpectralPool(14, 14).forward(act.forward(out))
print(f"28x28 -> activation -> pool: output is {pooled.shape[2]}x{pooled.shape[3]}")

# Cost trade: one weight per frequency bin vs one small kernel.
conv = Conv2d(1, 16, 3, rng)
sparse = SparseLayer(1, 2, 28, 28, rng)
print(f"\n3x3 conv, 16 filters: {conv.param_count()} parameters")
print(f"full-spectrum sparse layer, 2 filters: {sparse.param_count()} parameters")
print(f"memory factor: {sparse.param_count() / conv.param_count():.2f}x "
      f"(the price of removing convolution)")
