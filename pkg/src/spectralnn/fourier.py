"""Discrete Fourier transforms with centered spectra stored in polar form.

Conventions used throughout the package:

* Forward transforms are unnormalized; the inverse carries the 1/(H*W)
  factor.  With this split the convolution theorem needs no extra scale:
  idft2(dft2(f) * dft2(g)) is exactly the circular convolution f (*) g.
* Spectra are stored DC-centered: the zero-frequency bin sits at index
  (H//2, W//2), so a frequency offset (u, v) addresses bin
  (H//2 + u, W//2 + v).  Offsets index symmetrically around DC, which is
  how every spectral layer reasons about harmonics.
* Polar storage: magnitude is nonnegative, phase comes from atan2 in
  (-pi, pi], and a zero-magnitude bin carries phase 0 so comparisons are
  well defined.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError

# Relative imaginary residue tolerated when inverting a spectrum that is
# supposed to describe a real image.
_IMAG_RESIDUE_TOL = 1e-8


def dc_bin(n):
    """Index of the zero-frequency bin on an axis of length n."""
    return n // 2


def freq_offsets(n):
    """Signed frequency offsets for each bin of a centered axis of length n."""
    return np.arange(n) - n // 2


def bin_of(offset, n):
    """Bin index of a signed frequency offset, wrapped modulo the axis length.

    Wrapping makes +n/2 and -n/2 address the same Nyquist bin on even axes;
    for the sampled exponentials those frequencies are identical.
    """
    return (n // 2 + offset) % n


def to_polar(re, im):
    """Componentwise (magnitude, phase) of a complex value given as planes.

    Zero magnitude maps to phase 0 (atan2(0, 0) already is 0, kept explicit
    for negative-zero inputs).
    """
    magnitude = np.hypot(re, im)
    phase = np.arctan2(im, re)
    phase = np.where(magnitude == 0.0, 0.0, phase)
    return magnitude, phase


def to_rect(magnitude, phase):
    """Inverse of :func:`to_polar`; tolerates signed magnitudes."""
    return magnitude * np.cos(phase), magnitude * np.sin(phase)


@dataclass
class Spectrum:
    """A centered complex grid stored as magnitude and phase planes."""

    magnitude: np.ndarray
    phase: np.ndarray

    def __post_init__(self):
        self.magnitude = np.asarray(self.magnitude, dtype=np.float64)
        self.phase = np.asarray(self.phase, dtype=np.float64)
        if self.magnitude.shape != self.phase.shape or self.magnitude.ndim != 2:
            raise ValueError("magnitude and phase must be equal-shape 2D planes")
        if not (np.isfinite(self.magnitude).all() and np.isfinite(self.phase).all()):
            raise ValueError("spectrum planes must be finite")

    @property
    def height(self):
        return self.magnitude.shape[0]

    @property
    def width(self):
        return self.magnitude.shape[1]

    @classmethod
    def from_complex(cls, grid):
        grid = np.asarray(grid, dtype=np.complex128)
        mag, phase = to_polar(grid.real, grid.imag)
        return cls(mag, phase)

    def to_complex(self):
        re, im = to_rect(self.magnitude, self.phase)
        return re + 1j * im

    def value_at(self, u, v):
        """Complex value at signed frequency offset (u, v)."""
        h, w = self.magnitude.shape
        return complex(self.to_complex()[bin_of(u, h), bin_of(v, w)])


def _check_grid(grid, min_side=1):
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim != 2:
        raise ValueError(f"expected a 2D real grid, got ndim={grid.ndim}")
    if grid.shape[0] < min_side or grid.shape[1] < min_side:
        raise ValueError(f"grid must be at least {min_side}x{min_side}, got {grid.shape}")
    if not np.isfinite(grid).all():
        raise ValueError("grid samples must be finite")
    return grid


def dft1(signal):
    """Centered DFT of a 1D real signal, returned as a 1xN spectrum.

    Bin at offset u holds sum_n x[n] * exp(-2*pi*i*u*n/N); magnitudes are
    unnormalized, so a constant c maps to DC magnitude N*c.
    """
    signal = np.asarray(signal, dtype=np.float64).ravel()
    if signal.size < 2:
        raise ValueError(f"dft1 needs at least 2 samples, got {signal.size}")
    if not np.isfinite(signal).all():
        raise ValueError("signal samples must be finite")
    bins = np.fft.fftshift(np.fft.fft(signal))
    return Spectrum.from_complex(bins[np.newaxis, :])


def dft2(grid):
    """Centered separable 2D DFT of a real grid."""
    grid = _check_grid(grid, min_side=2)
    return Spectrum.from_complex(np.fft.fftshift(np.fft.fft2(grid)))


def idft2(spec):
    """Inverse 2D DFT with 1/(H*W) normalization, returning a real grid.

    The imaginary residue of the inverse is discarded only after checking it
    against the output scale; a large residue means the spectrum was not
    conjugate-symmetric, i.e. it never came from a real image.
    """
    out = np.fft.ifft2(np.fft.ifftshift(spec.to_complex()))
    re_norm = np.linalg.norm(out.real)
    im_norm = np.linalg.norm(out.imag)
    if im_norm > _IMAG_RESIDUE_TOL * max(re_norm, np.finfo(np.float64).tiny):
        raise NumericalError(
            f"imaginary residue {im_norm:.3e} exceeds {_IMAG_RESIDUE_TOL:.0e} * |output| "
            f"({re_norm:.3e}); spectrum is not conjugate-symmetric"
        )
    return np.ascontiguousarray(out.real)


def pointwise_product(a, b):
    """Hadamard product of two spectra: magnitudes multiply, phases add."""
    if a.magnitude.shape != b.magnitude.shape:
        raise ValueError(f"shape mismatch: {a.magnitude.shape} vs {b.magnitude.shape}")
    mag = a.magnitude * b.magnitude
    phase = a.phase + b.phase
    # Renormalize to the canonical polar form.
    re, im = to_rect(mag, phase)
    return Spectrum(*to_polar(re, im))


def zero_pad(grid, target_h, target_w):
    """Place a grid at the top-left corner of a larger zero grid.

    Placement is a fixed convention; any fixed placement only multiplies the
    spectrum by a unit-magnitude linear phase.
    """
    grid = _check_grid(grid)
    h, w = grid.shape
    if target_h < h or target_w < w:
        raise ValueError(
            f"pad target {target_h}x{target_w} is smaller than input {h}x{w}"
        )
    out = np.zeros((target_h, target_w), dtype=np.float64)
    out[:h, :w] = grid
    return out
