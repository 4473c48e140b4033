"""Frequency-domain neural networks built on explicit, hand-derived gradients.

The package provides the spectral layer set (sparse pointwise multiplication,
second-harmonic activation, spectral pooling, DC removal), a spatial-domain
CNN baseline, dataset ingestion (MNIST IDX, AT&T PGM, pyramidal spectra) and
a small training harness with a command-line interface.
"""

from .fourier import Spectrum, dft1, dft2, idft2, pointwise_product, zero_pad

__all__ = [
    "Spectrum",
    "dft1",
    "dft2",
    "idft2",
    "pointwise_product",
    "zero_pad",
]
