"""Frequency-domain layers: sparse pointwise multiplication, the
second-harmonic activation, spectral pooling and DC removal.

Feature maps flow through the network as :class:`SpectralTensor`, batched
centered spectra stored as magnitude and phase planes.  Mid-network the
magnitude plane may go negative (normalization removes its mean); that is a
consistent signed-amplitude encoding, since M*e^(i*phi) with M < 0 equals
|M|*e^(i*(phi+pi)).
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .fourier import bin_of
from .nn import BatchNorm, Layer, Parameter

# Second-to-first harmonic amplitude ratio of a half-wave rectified sine,
# (2A/3pi) / (A/2); the default strength for mixing second harmonics in.
DEFAULT_BETA = 4.0 / (3.0 * np.pi)


@dataclass
class SpectralTensor:
    """Batched multi-channel centered spectra in polar form (B, C, H, W)."""

    magnitude: np.ndarray
    phase: np.ndarray

    def __post_init__(self):
        self.magnitude = np.asarray(self.magnitude, dtype=np.float64)
        self.phase = np.asarray(self.phase, dtype=np.float64)
        if self.magnitude.shape != self.phase.shape or self.magnitude.ndim != 4:
            raise ValueError("magnitude and phase must be equal-shape (B,C,H,W) arrays")

    @property
    def shape(self):
        return self.magnitude.shape

    @classmethod
    def from_complex(cls, grid):
        grid = np.asarray(grid, dtype=np.complex128)
        mag = np.abs(grid)
        phase = np.where(mag == 0.0, 0.0, np.angle(grid))
        return cls(mag, phase)

    def to_complex(self):
        return self.magnitude * np.exp(1j * self.phase)


def second_harmonic(u, v, h, w):
    """Index (2u, 2v) wrapped into the centered offset range.

    On even axes +N/2 and -N/2 are the same Nyquist bin, so doubling a
    boundary frequency wraps onto it exactly (an identity of the sampled
    exponentials, not an approximation).
    """
    return (
        (2 * u + h // 2) % h - h // 2,
        (2 * v + w // 2) % w - w // 2,
    )


@dataclass(frozen=True)
class RegionIndex:
    """Precomputed index arrays for the low-frequency update region."""

    members: tuple          # ((u, v), ...) signed offsets, DC excluded
    member_rows: np.ndarray
    member_cols: np.ndarray
    harmonic_rows: np.ndarray
    harmonic_cols: np.ndarray
    groups: tuple           # index-array partition with unique harmonic bins


@lru_cache(maxsize=None)
def low_frequency_region(h, w):
    """Region of components whose second harmonic gets mixed in.

    Membership: (u, v) != (0, 0) with |u| <= floor(floor(h/2)/2) and
    |v| <= floor(floor(w/2)/2).  Components outside pass through untouched.
    """
    bu = (h // 2) // 2
    bv = (w // 2) // 2
    members = [
        (u, v)
        for u in range(-bu, bu + 1)
        for v in range(-bv, bv + 1)
        if (u, v) != (0, 0)
    ]
    if not members:
        raise ValueError(f"low-frequency region is empty for a {h}x{w} spectrum")
    mu = np.array([m[0] for m in members])
    mv = np.array([m[1] for m in members])
    member_rows = h // 2 + mu
    member_cols = w // 2 + mv
    harmonic_rows = np.array([bin_of(2 * u, h) for u, _ in members])
    harmonic_cols = np.array([bin_of(2 * v, w) for _, v in members])
    # Scatter-add groups: within one sign quadrant of (u, v) the wrapped
    # harmonic bins cannot collide, so plain fancy-index += is safe.
    groups = []
    for su in (mu >= 0, mu < 0):
        for sv in (mv >= 0, mv < 0):
            idx = np.nonzero(su & sv)[0]
            if idx.size:
                flat = harmonic_rows[idx] * w + harmonic_cols[idx]
                assert np.unique(flat).size == idx.size
                groups.append(idx)
    return RegionIndex(
        members=tuple(members),
        member_rows=member_rows,
        member_cols=member_cols,
        harmonic_rows=harmonic_rows,
        harmonic_cols=harmonic_cols,
        groups=tuple(groups),
    )


def harmonic_mix(x, alpha, beta):
    """The second-harmonic superposition as a complex linear map.

    For every region member p = (u, v):  out(p) = alpha*in(p) + beta*in(2p),
    reading only the pre-update spectrum; all other indices pass through.
    Operates on complex arrays shaped (..., H, W).
    """
    h, w = x.shape[-2:]
    reg = low_frequency_region(h, w)
    out = x.copy()
    out[..., reg.member_rows, reg.member_cols] = (
        alpha * x[..., reg.member_rows, reg.member_cols]
        + beta * x[..., reg.harmonic_rows, reg.harmonic_cols]
    )
    return out


def harmonic_mix_adjoint(g, alpha, beta):
    """Exact transpose of :func:`harmonic_mix` over rectangular coordinates.

    Region members receive alpha times their cotangent; each member also
    scatters beta times its cotangent back onto its harmonic source.  A
    harmonic index absent upstream simply carries a zero cotangent.
    """
    h, w = g.shape[-2:]
    reg = low_frequency_region(h, w)
    out = g.copy()
    g_region = g[..., reg.member_rows, reg.member_cols]
    out[..., reg.member_rows, reg.member_cols] = alpha * g_region
    for idx in reg.groups:
        out[..., reg.harmonic_rows[idx], reg.harmonic_cols[idx]] += beta * g_region[..., idx]
    return out


def _polar_cotangent_to_complex(g_mag, g_phase, re, im, mag):
    """Pull gradients back through (mag, phase) = polar(re, im).

    Zero-magnitude points get zero gradient (the canonical-phase convention
    makes the map locally constant there).
    """
    inv = np.zeros_like(mag)
    np.divide(1.0, mag, out=inv, where=mag != 0.0)
    re_scaled = re * inv
    im_scaled = im * inv
    g_re = g_mag * re_scaled - g_phase * im_scaled * inv
    g_im = g_mag * im_scaled + g_phase * re_scaled * inv
    return g_re, g_im


class TwoSReLU(Layer):
    """Adds each low-frequency component's second harmonic onto it.

    out(p) = alpha*in(p) + beta*in(2p) for p in the low-frequency region,
    evaluated simultaneously over the pre-update spectrum in rectangular
    coordinates; everything else passes through bit-identically.  The layer
    is linear in the complex spectrum, so backward is its exact transpose.
    """

    def __init__(self, alpha=1.0, beta=DEFAULT_BETA, name="tsrelu"):
        self.alpha = alpha
        self.beta = beta
        self.name = name
        self._cache = None

    def forward(self, x):
        h, w = x.shape[-2:]
        reg = low_frequency_region(h, w)
        mag, phase = x.magnitude, x.phase
        rr, rc = reg.member_rows, reg.member_cols
        if self.beta == 0.0:
            # No harmonic term: out(p) = alpha*in(p) exactly, and scaling the
            # (possibly signed) magnitude preserves the representation, so
            # alpha = 1 is a bitwise identity.
            out_mag = mag.copy()
            out_mag[..., rr, rc] *= self.alpha
            self._cache = (x.shape, None, None, None, None, None, None, reg)
            return SpectralTensor(out_mag, phase.copy())
        hr, hc = reg.harmonic_rows, reg.harmonic_cols
        mp, pp = mag[..., rr, rc], phase[..., rr, rc]
        mh, ph = mag[..., hr, hc], phase[..., hr, hc]
        trig = (np.cos(pp), np.sin(pp), np.cos(ph), np.sin(ph))
        yr = self.alpha * mp * trig[0] + self.beta * mh * trig[2]
        yi = self.alpha * mp * trig[1] + self.beta * mh * trig[3]
        amp = np.hypot(yr, yi)
        out_mag = mag.copy()
        out_phase = phase.copy()
        out_mag[..., rr, rc] = amp
        out_phase[..., rr, rc] = np.where(amp == 0.0, 0.0, np.arctan2(yi, yr))
        self._cache = (x.shape, mp, mh, trig, yr, yi, amp, reg)
        return SpectralTensor(out_mag, out_phase)

    def backward(self, grad_out):
        if self._cache is None:
            raise RuntimeError(f"{self.name}: backward called before forward")
        shape, mp, mh, trig, yr, yi, amp, reg = self._cache
        if grad_out.shape != shape:
            raise ValueError(f"{self.name}: gradient shape {grad_out.shape} != {shape}")
        if trig is None:  # beta == 0 fast path
            g_mag = grad_out.magnitude.copy()
            g_mag[..., reg.member_rows, reg.member_cols] *= self.alpha
            return SpectralTensor(g_mag, grad_out.phase.copy())
        cos_p, sin_p, cos_h, sin_h = trig
        rr, rc = reg.member_rows, reg.member_cols
        g_amp = grad_out.magnitude[..., rr, rc]
        g_ang = grad_out.phase[..., rr, rc]
        c_re, c_im = _polar_cotangent_to_complex(g_amp, g_ang, yr, yi, amp)

        # Pass everything through, then rewrite the region rows: members get
        # only the alpha chain, harmonic sources additionally receive beta
        # times the member cotangent.
        g_mag = grad_out.magnitude.copy()
        g_phase = grad_out.phase.copy()
        g_mag[..., rr, rc] = self.alpha * (c_re * cos_p + c_im * sin_p)
        g_phase[..., rr, rc] = self.alpha * mp * (c_im * cos_p - c_re * sin_p)
        harm_mag = self.beta * (c_re * cos_h + c_im * sin_h)
        harm_phase = self.beta * mh * (c_im * cos_h - c_re * sin_h)
        hr, hc = reg.harmonic_rows, reg.harmonic_cols
        for idx in reg.groups:
            g_mag[..., hr[idx], hc[idx]] += harm_mag[..., idx]
            g_phase[..., hr[idx], hc[idx]] += harm_phase[..., idx]
        return SpectralTensor(g_mag, g_phase)


class SparseLayer(Layer):
    """Learnable pointwise complex multiplication over the full spectrum.

    The frequency-domain stand-in for convolution: each (out, in) channel
    pair owns a full-size magnitude plane and phase plane.  Per-pair terms
    are accumulated over input channels in rectangular coordinates and the
    sum is restored to polar form.

    Modes:
      * ``polar``: term magnitude |x|*|w|, term phase phi_x + phi_w (a true
        complex product).
      * ``hadamard``: term magnitude |x|*|w|, term phase phi_x * phi_w (the
        cheaper both-planes-multiplied variant).
    """

    def __init__(self, in_channels, out_channels, height, width, rng,
                 mode="polar", name="sparse"):
        if mode not in ("polar", "hadamard"):
            raise ValueError(f"unknown sparse mode '{mode}'")
        self.name = name
        self.mode = mode
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.height = height
        self.width = width
        shape = (out_channels, in_channels, height, width)
        # Near-identity in the complex plane so early training is a mild filter.
        self.w_magnitude = Parameter(rng.uniform(0.9, 1.1, size=shape))
        self.w_phase = Parameter(rng.uniform(-0.1, 0.1, size=shape))
        self._cache = None

    def _check(self, x):
        b, c, h, w = x.shape
        if c != self.in_channels or (h, w) != (self.height, self.width):
            raise ValueError(
                f"{self.name}: expected (B,{self.in_channels},{self.height},"
                f"{self.width}), got {x.shape}"
            )

    def forward(self, x):
        self._check(x)
        if self.mode == "polar":
            return self._forward_polar(x)
        return self._forward_hadamard(x)

    def backward(self, grad_out):
        if self._cache is None:
            raise RuntimeError(f"{self.name}: backward called before forward")
        out_c, out_mag = self._cache[-2:]
        g_re, g_im = _polar_cotangent_to_complex(
            grad_out.magnitude, grad_out.phase, out_c.real, out_c.imag, out_mag
        )
        cot = g_re + 1j * g_im
        if self.mode == "polar":
            return self._backward_polar(cot)
        return self._backward_hadamard(cot)

    def _forward_polar(self, x):
        ux = np.exp(1j * x.phase)
        uw = np.exp(1j * self.w_phase.value)
        xc = x.magnitude * ux
        wc = self.w_magnitude.value * uw
        out_c = np.einsum("bihw,oihw->bohw", xc, wc, optimize=True)
        out_mag = np.abs(out_c)
        out_phase = np.where(out_mag == 0.0, 0.0, np.angle(out_c))
        self._cache = (x, ux, uw, xc, wc, out_c, out_mag)
        return SpectralTensor(out_mag, out_phase)

    def _backward_polar(self, cot):
        x, ux, uw, xc, wc, _, _ = self._cache
        dxc = np.einsum("bohw,oihw->bihw", cot, np.conj(wc), optimize=True)
        dwc = np.einsum("bohw,bihw->oihw", cot, np.conj(xc), optimize=True)
        dx_polar = dxc * np.conj(ux)
        dw_polar = dwc * np.conj(uw)
        self.w_magnitude.grad += dw_polar.real
        self.w_phase.grad += self.w_magnitude.value * dw_polar.imag
        return SpectralTensor(dx_polar.real, x.magnitude * dx_polar.imag)

    def _forward_hadamard(self, x):
        t_mag = x.magnitude[:, None] * self.w_magnitude.value[None]
        t_phase = x.phase[:, None] * self.w_phase.value[None]
        unit = np.exp(1j * t_phase)
        out_c = (t_mag * unit).sum(axis=2)
        out_mag = np.abs(out_c)
        out_phase = np.where(out_mag == 0.0, 0.0, np.angle(out_c))
        self._cache = (x, t_mag, unit, out_c, out_mag)
        return SpectralTensor(out_mag, out_phase)

    def _backward_hadamard(self, cot):
        x, t_mag, unit, _, _ = self._cache
        pair = cot[:, :, None] * np.conj(unit)
        dt_mag = pair.real
        dt_phase = t_mag * pair.imag
        w_mag = self.w_magnitude.value
        w_phase = self.w_phase.value
        self.w_magnitude.grad += (dt_mag * x.magnitude[:, None]).sum(axis=0)
        self.w_phase.grad += (dt_phase * x.phase[:, None]).sum(axis=0)
        return SpectralTensor(
            (dt_mag * w_mag[None]).sum(axis=1),
            (dt_phase * w_phase[None]).sum(axis=1),
        )

    def parameters(self):
        return [self.w_magnitude, self.w_phase]

    def state(self):
        return {"w_magnitude": self.w_magnitude.value, "w_phase": self.w_phase.value}


class SpectralPool(Layer):
    """Downsampling by truncation to the centered low-frequency block."""

    def __init__(self, out_height, out_width, name="spectral_pool"):
        self.name = name
        self.out_height = out_height
        self.out_width = out_width
        self._in_shape = None

    def _offsets(self, h, w):
        return h // 2 - self.out_height // 2, w // 2 - self.out_width // 2

    def forward(self, x):
        b, c, h, w = x.shape
        if self.out_height > h or self.out_width > w:
            raise ValueError(
                f"{self.name}: target {self.out_height}x{self.out_width} "
                f"exceeds input {h}x{w}"
            )
        self._in_shape = x.shape
        r0, c0 = self._offsets(h, w)
        sl = (slice(None), slice(None),
              slice(r0, r0 + self.out_height), slice(c0, c0 + self.out_width))
        return SpectralTensor(x.magnitude[sl].copy(), x.phase[sl].copy())

    def backward(self, grad_out):
        b, c, h, w = self._in_shape
        r0, c0 = self._offsets(h, w)
        g_mag = np.zeros(self._in_shape)
        g_phase = np.zeros(self._in_shape)
        sl = (slice(None), slice(None),
              slice(r0, r0 + self.out_height), slice(c0, c0 + self.out_width))
        g_mag[sl] = grad_out.magnitude
        g_phase[sl] = grad_out.phase
        return SpectralTensor(g_mag, g_phase)


class DCRemoval(Layer):
    """Zeroes the DC magnitude per channel; everything else is untouched.

    Equivalent to removing the spatial mean.  Kept optional: a normalization
    layer can learn to suppress the single DC component on its own.
    """

    def __init__(self, name="dc_removal"):
        self.name = name
        self._dc = None

    def forward(self, x):
        h, w = x.shape[-2:]
        self._dc = (h // 2, w // 2)
        out_mag = x.magnitude.copy()
        out_mag[..., self._dc[0], self._dc[1]] = 0.0
        return SpectralTensor(out_mag, x.phase.copy())

    def backward(self, grad_out):
        g_mag = grad_out.magnitude.copy()
        g_mag[..., self._dc[0], self._dc[1]] = 0.0
        return SpectralTensor(g_mag, grad_out.phase.copy())


class SpectralBatchNorm(Layer):
    """Normalizes the magnitude and phase planes as independent channel groups."""

    def __init__(self, channels, eps=1e-5, momentum=0.9, name="sbn"):
        self.name = name
        self.bn_magnitude = BatchNorm(channels, eps, momentum, name="magnitude")
        self.bn_phase = BatchNorm(channels, eps, momentum, name="phase")

    def forward(self, x):
        return SpectralTensor(
            self.bn_magnitude.forward(x.magnitude),
            self.bn_phase.forward(x.phase),
        )

    def backward(self, grad_out):
        return SpectralTensor(
            self.bn_magnitude.backward(grad_out.magnitude),
            self.bn_phase.backward(grad_out.phase),
        )

    def set_training(self, flag):
        self.training = flag
        self.bn_magnitude.set_training(flag)
        self.bn_phase.set_training(flag)

    def state(self):
        out = {}
        for bn in (self.bn_magnitude, self.bn_phase):
            for key, arr in bn.state().items():
                out[f"{bn.name}.{key}"] = arr
        return out

    def load_state(self, values):
        for bn in (self.bn_magnitude, self.bn_phase):
            bn.load_state({k: values[f"{bn.name}.{k}"] for k in bn.state()})


class FlattenSpectral(Layer):
    """Flattens magnitude and phase planes into one feature vector per sample."""

    def __init__(self, name="flatten"):
        self.name = name
        self._shape = None

    def forward(self, x):
        self._shape = x.shape
        b = x.shape[0]
        return np.concatenate(
            [x.magnitude.reshape(b, -1), x.phase.reshape(b, -1)], axis=1
        )

    def backward(self, grad_out):
        b = self._shape[0]
        half = grad_out.shape[1] // 2
        return SpectralTensor(
            grad_out[:, :half].reshape(self._shape),
            grad_out[:, half:].reshape(self._shape),
        )


def concat_channels(tensors):
    return SpectralTensor(
        np.concatenate([t.magnitude for t in tensors], axis=1),
        np.concatenate([t.phase for t in tensors], axis=1),
    )


def split_channels(tensor, counts):
    out = []
    start = 0
    for count in counts:
        sl = (slice(None), slice(start, start + count))
        out.append(SpectralTensor(tensor.magnitude[sl], tensor.phase[sl]))
        start += count
    return out
