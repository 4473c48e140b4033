"""Architecture assembly for the two network variants.

Spatial (baseline):  [C/BN/ReLU x2 -> max pool] x2 -> FC stack -> softmax.
Frequency:           per-branch Sparse/BN/2SReLU -> spectral pool -> concat
                     -> Sparse/BN/2SReLU -> spectral pool -> flatten(mag,phase)
                     -> FC -> softmax.

The frequency variant ingests raw images and transforms them itself (whole
spectrum, or the five-branch pyramid of whole image plus zero-padded
quadrants); no gradient flows into the fixed ingestion stage.
"""

import numpy as np

from .config import input_size
from .data import pyramidal_spectra_batch, whole_spectrum_batch
from .nn import BatchNorm, Flatten, FullyConnected, Sequential
from .spatial import Conv2d, MaxPool2, ReLU
from .spectral import (
    DCRemoval,
    FlattenSpectral,
    SparseLayer,
    SpectralBatchNorm,
    SpectralPool,
    TwoSReLU,
    concat_channels,
    split_channels,
)


def class_count_for(cfg):
    return 10 if cfg.dataset == "mnist" else None  # att count comes from data


class SpatialNetwork:
    variant = "spatial"

    def __init__(self, cfg, class_count, rng):
        size = input_size(cfg)
        c = cfg.conv_channels
        layers = []

        def cbr(idx, in_ch):
            # BatchNorm follows the conv, so the conv carries no bias.
            return [
                Conv2d(in_ch, c, 3, rng, bias=False, name=f"conv{idx}"),
                BatchNorm(c, name=f"bn{idx}"),
                _named(ReLU, f"relu{idx}"),
            ]

        layers += cbr(1, 1) + cbr(2, c) + [_named(MaxPool2, "max_pool_1")]
        layers += cbr(3, c) + cbr(4, c) + [_named(MaxPool2, "max_pool_2")]
        layers.append(_named(Flatten, "flatten"))
        feat = c * (size // 2 // 2) ** 2
        hidden = [cfg.fc1, cfg.fc2] if cfg.dataset == "mnist" else [cfg.fc1]
        widths = [feat] + hidden + [class_count]
        for i in range(len(widths) - 1):
            layers.append(FullyConnected(widths[i], widths[i + 1], rng, name=f"fc{i + 1}"))
            if i < len(widths) - 2:
                layers.append(_named(ReLU, f"relu_fc{i + 1}"))
        self.net = Sequential(layers)

    def forward(self, images):
        return self.net.forward(np.asarray(images)[:, None, :, :])

    def backward(self, grad_logits):
        return self.net.backward(grad_logits)

    def parameters(self):
        return self.net.parameters()

    def state(self):
        return self.net.state()

    def load_state(self, values):
        self.net.load_state(values)

    def set_training(self, flag):
        self.net.set_training(flag)

    def scan_nonfinite(self, images):
        x = np.asarray(images)[:, None, :, :]
        for layer in self.net.layers:
            x = layer.forward(x)
            if not np.isfinite(x).all():
                return layer.name
        return None


class FrequencyNetwork:
    variant = "frequency"

    def __init__(self, cfg, class_count, rng):
        size = input_size(cfg)
        self.pyramidal = cfg.pyramidal
        self.branch_count = 5 if cfg.pyramidal else 1
        bc, tc = cfg.branch_channels, cfg.trunk_channels

        def spectral_block(prefix, in_ch, out_ch, side):
            layers = []
            if cfg.dc_removal and prefix.startswith("branch"):
                layers.append(_named(DCRemoval, f"{prefix}_dc_removal"))
            layers.append(SparseLayer(
                in_ch, out_ch, side, side, rng,
                mode=cfg.sparse_mode, name=f"{prefix}_sparse",
            ))
            layers.append(SpectralBatchNorm(out_ch, name=f"{prefix}_bn"))
            if cfg.use_2srelu:
                layers.append(TwoSReLU(cfg.alpha, cfg.beta, name=f"{prefix}_tsrelu"))
            layers.append(SpectralPool(side // 2, side // 2, name=f"{prefix}_pool"))
            return Sequential(layers)

        self.branches = [
            spectral_block(f"branch{i}", 1, bc, size) for i in range(self.branch_count)
        ]
        self.trunk = spectral_block("trunk", self.branch_count * bc, tc, size // 2)
        final = size // 2 // 2
        self.head = Sequential([
            _named(FlattenSpectral, "flatten"),
            FullyConnected(2 * tc * final * final, class_count, rng, name="fc1"),
        ])
        self._branch_channels = bc

    def _ingest(self, images):
        if self.pyramidal:
            return pyramidal_spectra_batch(images)
        return [whole_spectrum_batch(images)]

    def forward(self, images):
        inputs = self._ingest(images)
        outputs = [stack.forward(x) for stack, x in zip(self.branches, inputs)]
        merged = concat_channels(outputs) if self.branch_count > 1 else outputs[0]
        return self.head.forward(self.trunk.forward(merged))

    def backward(self, grad_logits):
        g = self.trunk.backward(self.head.backward(grad_logits))
        if self.branch_count > 1:
            parts = split_channels(g, [self._branch_channels] * self.branch_count)
        else:
            parts = [g]
        for stack, part in zip(self.branches, parts):
            stack.backward(part)
        return None  # no gradient for the fixed ingestion stage

    def parameters(self):
        params = []
        for stack in self.branches:
            params.extend(stack.parameters())
        params.extend(self.trunk.parameters())
        params.extend(self.head.parameters())
        return params

    def _stacks(self):
        named = [(f"branch{i}", stack) for i, stack in enumerate(self.branches)]
        return named + [("trunk", self.trunk), ("head", self.head)]

    def state(self):
        # Layer names are globally unique ("branch0_sparse", "trunk_bn", ...),
        # so the stacks' states merge without extra prefixes.
        out = {}
        for _, stack in self._stacks():
            out.update(stack.state())
        return out

    def load_state(self, values):
        for _, stack in self._stacks():
            stack.load_state({k: values[k] for k in stack.state()})

    def set_training(self, flag):
        for _, stack in self._stacks():
            stack.set_training(flag)

    def scan_nonfinite(self, images):
        inputs = self._ingest(images)
        outputs = []
        for stack, x in zip(self.branches, inputs):
            for layer in stack.layers:
                x = layer.forward(x)
                for plane in (x.magnitude, x.phase):
                    if not np.isfinite(plane).all():
                        return layer.name
            outputs.append(x)
        x = concat_channels(outputs) if self.branch_count > 1 else outputs[0]
        for layer in self.trunk.layers + self.head.layers:
            x = layer.forward(x)
            planes = (x.magnitude, x.phase) if hasattr(x, "magnitude") else (x,)
            for plane in planes:
                if not np.isfinite(plane).all():
                    return layer.name
        return None


def _named(layer_cls, name):
    layer = layer_cls()
    layer.name = name
    return layer


def build_network(cfg, class_count):
    rng = np.random.default_rng(cfg.seed)
    if cfg.variant == "spatial":
        return SpatialNetwork(cfg, class_count, rng)
    return FrequencyNetwork(cfg, class_count, rng)
