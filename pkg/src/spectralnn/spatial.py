"""Spatial-domain baseline layers: convolution, ReLU, max pooling.

The "convolution" follows the usual deep-learning convention and is a
cross-correlation; the learnable kernel makes the flip immaterial, but the
convolution-theorem tests in the transform layer use true convolution and
must not be compared against this layer directly.
"""

import numpy as np

from .nn import Layer, Parameter


class Conv2d(Layer):
    """Stride-1 cross-correlation with zero same-padding and odd kernels.

    Bias is optional and off by default: in C/BN/ReLU blocks the following
    normalization removes the mean, so a bias would be dead weight.
    """

    def __init__(self, in_channels, out_channels, kernel_size, rng, bias=False, name="conv"):
        if kernel_size % 2 != 1:
            raise ValueError("kernel size must be odd")
        self.name = name
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.k = kernel_size
        bound = 1.0 / np.sqrt(in_channels * kernel_size * kernel_size)
        self.kernel = Parameter(
            rng.uniform(-bound, bound, size=(out_channels, in_channels, kernel_size, kernel_size))
        )
        self.bias = Parameter(np.zeros(out_channels)) if bias else None
        self._cols = None
        self._spatial = None

    def forward(self, x):
        if x.ndim != 4 or x.shape[1] != self.in_channels:
            raise ValueError(
                f"{self.name}: expected (B,{self.in_channels},H,W), got {x.shape}"
            )
        b, cin, h, w = x.shape
        k, pad = self.k, self.k // 2
        xpad = np.zeros((b, cin, h + 2 * pad, w + 2 * pad))
        xpad[:, :, pad:pad + h, pad:pad + w] = x
        # im2col in a batch-first layout so the contraction is one batched
        # GEMM; direct slice assignment avoids reshape temporaries.
        cols = np.empty((b, cin, k * k, h, w))
        for ki in range(k):
            for kj in range(k):
                cols[:, :, ki * k + kj] = xpad[:, :, ki:ki + h, kj:kj + w]
        cols = cols.reshape(b, cin * k * k, h * w)
        self._cols = cols
        self._spatial = (h, w)
        w_mat = self.kernel.value.reshape(self.out_channels, cin * k * k)
        out = np.matmul(w_mat, cols).reshape(b, self.out_channels, h, w)
        if self.bias is not None:
            out += self.bias.value[:, None, None]
        return out

    def backward(self, grad_out):
        b = grad_out.shape[0]
        h, w = self._spatial
        cin, k, pad = self.in_channels, self.k, self.k // 2
        g_mat = grad_out.reshape(b, self.out_channels, h * w)
        self.kernel.grad += np.matmul(
            g_mat, self._cols.transpose(0, 2, 1)
        ).sum(axis=0).reshape(self.kernel.shape)
        kernel = self.kernel.value
        gpad = np.zeros((b, cin, h + 2 * pad, w + 2 * pad))
        for ki in range(k):
            for kj in range(k):
                contrib = np.matmul(
                    np.ascontiguousarray(kernel[:, :, ki, kj].T), g_mat
                )
                gpad[:, :, ki:ki + h, kj:kj + w] += contrib.reshape(b, cin, h, w)
        if self.bias is not None:
            self.bias.grad += grad_out.sum(axis=(0, 2, 3))
        return gpad[:, :, pad:pad + h, pad:pad + w]

    def parameters(self):
        params = [self.kernel]
        if self.bias is not None:
            params.append(self.bias)
        return params

    def state(self):
        out = {"kernel": self.kernel.value}
        if self.bias is not None:
            out["bias"] = self.bias.value
        return out


class ReLU(Layer):
    """max(x, 0); gradients are blocked where x <= 0."""

    def __init__(self, name="relu"):
        self.name = name
        self._mask = None

    def forward(self, x):
        self._mask = x > 0
        return np.where(self._mask, x, 0.0)

    def backward(self, grad_out):
        return np.where(self._mask, grad_out, 0.0)


class MaxPool2(Layer):
    """2x2 max pooling, stride 2; ties route to the first window cell."""

    def __init__(self, name="maxpool"):
        self.name = name
        self._rows = None
        self._cols = None
        self._shape = None

    def forward(self, x):
        b, c, h, w = x.shape
        if h % 2 or w % 2:
            raise ValueError(f"{self.name}: spatial dims must be even, got {h}x{w}")
        self._shape = x.shape
        win = x.reshape(b, c, h // 2, 2, w // 2, 2)
        # Two-level argmax keeps the row-major first-occurrence tie rule:
        # the column argmax picks the first column within each window row,
        # the row argmax then picks the first row among equal row maxima.
        col_max = win.max(axis=5)
        col_arg = win.argmax(axis=5)
        row_arg = col_max.argmax(axis=3)
        out = np.take_along_axis(col_max, row_arg[:, :, :, None, :], axis=3)[:, :, :, 0, :]
        self._rows = row_arg
        self._cols = np.take_along_axis(col_arg, row_arg[:, :, :, None, :], axis=3)[:, :, :, 0, :]
        return out

    def backward(self, grad_out):
        b, c, h, w = self._shape
        gwin = np.zeros((b, c, h // 2, 2, w // 2, 2))
        bi, ci, ii, ji = np.indices(grad_out.shape, sparse=True)
        gwin[bi, ci, ii, self._rows, ji, self._cols] = grad_out
        return gwin.reshape(b, c, h, w)
