"""Layer contract, batch normalization, dense head, SGD and gradient checking.

Every layer implements forward/backward with hand-written gradients and owns
its parameters.  backward may only be called after the matching forward; a
layer instance is single-threaded across one forward/backward pair, while
distinct instances are independent.
"""

import numpy as np


class Parameter:
    """A learnable tensor paired with its gradient accumulator."""

    __slots__ = ("value", "grad")

    def __init__(self, value):
        self.value = np.asarray(value, dtype=np.float64)
        self.grad = np.zeros_like(self.value)

    @property
    def shape(self):
        return self.value.shape

    def zero_grad(self):
        self.grad.fill(0.0)


class Layer:
    """Uniform forward/backward contract.

    Subclasses store whatever activations they need during forward and
    consume them in backward, which returns the input gradient and
    accumulates parameter gradients.
    """

    name = None
    training = True

    def forward(self, x):
        raise NotImplementedError

    def backward(self, grad_out):
        raise NotImplementedError

    def parameters(self):
        return []

    def state(self):
        """Named tensors to persist: parameters plus non-learnable buffers."""
        return {}

    def load_state(self, values):
        for key, arr in self.state().items():
            new = values[key]
            if new.shape != arr.shape:
                raise ValueError(
                    f"shape mismatch for '{key}': checkpoint {new.shape}, model {arr.shape}"
                )
            arr[...] = new

    def set_training(self, flag):
        self.training = flag

    def param_count(self):
        return sum(p.value.size for p in self.parameters())


class Sequential(Layer):
    def __init__(self, layers):
        self.layers = list(layers)

    def forward(self, x):
        for layer in self.layers:
            x = layer.forward(x)
        return x

    def backward(self, grad_out):
        for layer in reversed(self.layers):
            grad_out = layer.backward(grad_out)
        return grad_out

    def parameters(self):
        return [p for layer in self.layers for p in layer.parameters()]

    def state(self):
        out = {}
        for layer in self.layers:
            for key, arr in layer.state().items():
                out[f"{layer.name}.{key}"] = arr
        return out

    def load_state(self, values):
        for layer in self.layers:
            local = {k: v for k, v in layer.state().items()}
            layer.load_state(
                {k: values[f"{layer.name}.{k}"] for k in local}
            )

    def set_training(self, flag):
        for layer in self.layers:
            layer.set_training(flag)


class BatchNorm(Layer):
    """Per-channel normalization to zero mean and unit variance.

    The learnable scale/shift pair is deliberately omitted; the layer only
    normalizes.  Batch statistics are taken over batch x H x W in training;
    running statistics (momentum 0.9) serve inference.
    """

    def __init__(self, channels, eps=1e-5, momentum=0.9, name="batchnorm"):
        self.channels = channels
        self.eps = eps
        self.momentum = momentum
        self.name = name
        self.running_mean = np.zeros(channels)
        self.running_var = np.ones(channels)
        self._xhat = None
        self._inv_std = None

    def forward(self, x):
        if x.ndim != 4 or x.shape[1] != self.channels:
            raise ValueError(
                f"{self.name}: expected (B,{self.channels},H,W), got {x.shape}"
            )
        if self.training:
            if x.shape[0] < 2:
                raise ValueError(
                    f"{self.name}: training batch must have at least 2 samples"
                )
            mean = x.mean(axis=(0, 2, 3))
            centered = x - mean[:, None, None]
            var = np.einsum("bchw,bchw->c", centered, centered) / (
                x.shape[0] * x.shape[2] * x.shape[3]
            )
            self.running_mean = self.momentum * self.running_mean + (1 - self.momentum) * mean
            self.running_var = self.momentum * self.running_var + (1 - self.momentum) * var
        else:
            mean = self.running_mean
            centered = x - mean[:, None, None]
            var = self.running_var
        inv_std = 1.0 / np.sqrt(var + self.eps)
        xhat = centered * inv_std[:, None, None]
        if self.training:
            self._xhat = xhat
            self._inv_std = inv_std
        return xhat

    def backward(self, grad_out):
        if self._xhat is None:
            raise RuntimeError(f"{self.name}: backward called before forward")
        if not self.training:
            raise RuntimeError(f"{self.name}: backward only valid in training mode")
        g = grad_out
        xhat = self._xhat
        mean_g = g.mean(axis=(0, 2, 3), keepdims=True)
        mean_gx = (g * xhat).mean(axis=(0, 2, 3), keepdims=True)
        return self._inv_std[:, None, None] * (g - mean_g - xhat * mean_gx)

    def state(self):
        return {"running_mean": self.running_mean, "running_var": self.running_var}

    def load_state(self, values):
        for key in ("running_mean", "running_var"):
            new = values[key]
            if new.shape != (self.channels,):
                raise ValueError(f"shape mismatch for '{self.name}.{key}'")
        self.running_mean = values["running_mean"].copy()
        self.running_var = values["running_var"].copy()


class FullyConnected(Layer):
    """y = W x + b on batches of flat vectors."""

    def __init__(self, in_features, out_features, rng, name="fc"):
        self.name = name
        bound = 1.0 / np.sqrt(in_features)
        self.weight = Parameter(rng.uniform(-bound, bound, size=(out_features, in_features)))
        self.bias = Parameter(np.zeros(out_features))
        self._x = None

    def forward(self, x):
        if x.ndim != 2 or x.shape[1] != self.weight.shape[1]:
            raise ValueError(
                f"{self.name}: expected (B,{self.weight.shape[1]}), got {x.shape}"
            )
        self._x = x
        return x @ self.weight.value.T + self.bias.value

    def backward(self, grad_out):
        self.weight.grad += grad_out.T @ self._x
        self.bias.grad += grad_out.sum(axis=0)
        return grad_out @ self.weight.value

    def parameters(self):
        return [self.weight, self.bias]

    def state(self):
        return {"weight": self.weight.value, "bias": self.bias.value}


class Flatten(Layer):
    def __init__(self, name="flatten"):
        self.name = name
        self._shape = None

    def forward(self, x):
        self._shape = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, grad_out):
        return grad_out.reshape(self._shape)


def softmax_cross_entropy(logits, labels):
    """Mean cross-entropy over a batch, with the logit gradient.

    Log-sum-exp stabilized; gradient is (softmax - onehot) / batch.
    """
    logits = np.asarray(logits, dtype=np.float64)
    labels = np.asarray(labels)
    if not np.isfinite(logits).all():
        raise ValueError("non-finite logits")
    batch, classes = logits.shape
    if labels.min() < 0 or labels.max() >= classes:
        raise ValueError(f"labels out of range for {classes} classes")
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_z = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    log_probs = shifted - log_z
    loss = -log_probs[np.arange(batch), labels].mean()
    grad = np.exp(log_probs)
    grad[np.arange(batch), labels] -= 1.0
    return loss, grad / batch


class SGD:
    """Momentum SGD: v <- momentum*v + grad; value <- value - lr*v."""

    def __init__(self, parameters, learning_rate, momentum=0.0):
        if learning_rate < 0:
            raise ValueError("learning rate must be nonnegative")
        if not 0.0 <= momentum < 1.0:
            raise ValueError("momentum must be in [0, 1)")
        self.parameters = list(parameters)
        self.lr = learning_rate
        self.momentum = momentum
        self._velocity = [np.zeros_like(p.value) for p in self.parameters]

    def step(self):
        for p, v in zip(self.parameters, self._velocity):
            v *= self.momentum
            v += p.grad
            p.value -= self.lr * v
            p.zero_grad()


def _planes(x):
    """Real planes backing a tensor: the array itself, or magnitude+phase."""
    if hasattr(x, "magnitude"):
        return [x.magnitude, x.phase]
    return [np.asarray(x)]


def _like(x, planes):
    if hasattr(x, "magnitude"):
        return type(x)(planes[0], planes[1])
    return planes[0]


def grad_check(layer, x, step=1e-5, rng=None, max_coords=150):
    """Max relative error of analytic gradients against central differences.

    Probes a scalar loss sum(c * forward(x)) with fixed random c, compares
    the layer's input gradient and every parameter gradient on a
    deterministic sample of coordinates.  Inputs near kinks must be nudged
    away by the caller (at least 10*step).
    """
    rng = rng or np.random.default_rng(0)
    out = layer.forward(x)
    probes = [rng.standard_normal(p.shape) for p in _planes(out)]

    def loss():
        got = layer.forward(x)
        return sum(float(np.sum(c * p)) for c, p in zip(probes, _planes(got)))

    grad_in = layer.backward(_like(out, probes))
    analytic_planes = [p.copy() for p in _planes(grad_in)]
    param_grads = [p.grad.copy() for p in layer.parameters()]

    targets = []
    for plane, analytic in zip(_planes(x), analytic_planes):
        targets.append((plane, analytic))
    for p, g in zip(layer.parameters(), param_grads):
        targets.append((p.value, g))

    scale = max(
        (np.max(np.abs(g)) for _, g in targets if g.size),
        default=0.0,
    )
    scale = max(scale, 1e-6)
    worst = 0.0
    for values, analytic in targets:
        flat = values.reshape(-1)
        n = flat.size
        idx = np.arange(n) if n <= max_coords else rng.choice(n, size=max_coords, replace=False)
        for i in idx:
            orig = flat[i]
            flat[i] = orig + step
            hi = loss()
            flat[i] = orig - step
            lo = loss()
            flat[i] = orig
            numeric = (hi - lo) / (2 * step)
            err = abs(analytic.reshape(-1)[i] - numeric) / scale
            worst = max(worst, err)
    return worst
