"""Independent reference implementations used to pin expected test values.

Everything here is deliberately naive (direct sums, explicit loops over
definitions) and independent of the library code paths it checks.
"""

import numpy as np


def naive_dft2(grid):
    """Direct double-sum 2D DFT, centered layout. O(N^4)."""
    grid = np.asarray(grid, dtype=np.float64)
    h, w = grid.shape
    out = np.zeros((h, w), dtype=np.complex128)
    ys, xs = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    for r, u in enumerate(np.arange(h) - h // 2):
        for c, v in enumerate(np.arange(w) - w // 2):
            phase = -2j * np.pi * (u * ys / h + v * xs / w)
            out[r, c] = np.sum(grid * np.exp(phase))
    return out


def naive_dft1(signal):
    """Direct-sum 1D DFT, centered layout."""
    x = np.asarray(signal, dtype=np.float64)
    n = x.size
    out = np.zeros(n, dtype=np.complex128)
    idx = np.arange(n)
    for b, u in enumerate(idx - n // 2):
        out[b] = np.sum(x * np.exp(-2j * np.pi * u * idx / n))
    return out


def circular_convolve2(f, g):
    """Direct circular convolution (f (*) g)[i, j] by definition."""
    f = np.asarray(f, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    h, w = f.shape
    out = np.zeros_like(f)
    for i in range(h):
        for j in range(w):
            acc = 0.0
            for a in range(h):
                acc += np.dot(f[a], g[(i - a) % h, (j - np.arange(w)) % w])
            out[i, j] = acc
    return out


def conv2d_same_naive(x, kernel, bias=None):
    """Six-nested-loop cross-correlation with zero same-padding."""
    b, cin, h, w = x.shape
    cout, cin2, k, _ = kernel.shape
    assert cin == cin2
    pad = k // 2
    xp = np.zeros((b, cin, h + 2 * pad, w + 2 * pad))
    xp[:, :, pad:pad + h, pad:pad + w] = x
    out = np.zeros((b, cout, h, w))
    for n in range(b):
        for o in range(cout):
            for i in range(h):
                for j in range(w):
                    acc = 0.0
                    for c in range(cin):
                        for ki in range(k):
                            acc += np.dot(xp[n, c, i + ki, j:j + k], kernel[o, c, ki])
                    out[n, o, i, j] = acc
            if bias is not None:
                out[n, o] += bias[o]
    return out


def rectified_sine_bin_exact(mu, j, n=100):
    """Exact DFT bin of max(0, sin(2*pi*mu*t/n)) sampled at t = 0..n-1.

    Uses mpmath at 50 digits over the finite support sum, so it carries the
    true alias fold-back of harmonics above the Nyquist frequency.
    """
    from mpmath import exp, mp, mpc

    mp.dps = 50
    t = np.arange(n)
    support = t[np.sin(2 * np.pi * mu * t / n) > 1e-15]
    w = 2 * np.pi / n
    total = mpc(0)
    for k in support:
        k = int(k)
        s = (exp(mpc(0, 1) * w * mu * k) - exp(-mpc(0, 1) * w * mu * k)) / (2 * mpc(0, 1))
        total += s * exp(-mpc(0, 1) * w * j * k)
    return complex(total)
