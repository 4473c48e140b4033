"""Run configuration: a line-based ``key = value`` format with [section]
headers, a strict schema (unknown keys are errors, never silent defaults),
and shape-level validation before any training starts.

Grammar (documented in the README):

    # comment                 full-line or trailing
    [section]                 one of [network] [optimizer] [data]
    key = value               whitespace around '=' ignored

Booleans are ``true``/``false``; numbers use plain decimal notation.
"""

from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError

DEFAULT_BETA = 4.0 / (3.0 * np.pi)


@dataclass
class NetworkConfig:
    variant: str = None
    dataset: str = None
    # frequency-variant settings
    pyramidal: bool = False
    sparse_mode: str = "polar"
    use_2srelu: bool = True
    dc_removal: bool = False
    alpha: float = 1.0
    beta: float = DEFAULT_BETA
    branch_channels: int = 2
    trunk_channels: int = 16
    # spatial-variant settings
    conv_channels: int = 16
    fc1: int = 256
    fc2: int = 128
    # att preprocessing
    image_size: int = 64
    per_class_train: int = 5
    split_seed: int = 0
    # optimizer
    learning_rate: float = 0.01
    momentum: float = 0.9
    batch_size: int = 64
    iterations: int = 100000
    seed: int = 1
    eval_every: int = 1000
    # data
    data_root: str = "."
    train_images: str = "train-images-idx3-ubyte"
    train_labels: str = "train-labels-idx1-ubyte"
    test_images: str = "t10k-images-idx3-ubyte"
    test_labels: str = "t10k-labels-idx1-ubyte"
    train_limit: int = 0

    def with_overrides(self, **kwargs):
        kwargs = {k: v for k, v in kwargs.items() if v is not None}
        return replace(self, **kwargs)


def _bool(raw):
    if raw in ("true", "false"):
        return raw == "true"
    raise ValueError("expected 'true' or 'false'")


def _enum(*choices):
    def convert(raw):
        if raw not in choices:
            raise ValueError(f"expected one of {', '.join(choices)}")
        return raw
    return convert


# section -> key -> (converter, config field, applicability)
# applicability: None = always; otherwise a (variant, dataset) predicate.
_SCHEMA = {
    "network": {
        "variant": (_enum("spatial", "frequency"), "variant", None),
        "dataset": (_enum("mnist", "att"), "dataset", None),
        "pyramidal": (_bool, "pyramidal", lambda v, d: v == "frequency"),
        "sparse_mode": (_enum("polar", "hadamard"), "sparse_mode", lambda v, d: v == "frequency"),
        "use_2srelu": (_bool, "use_2srelu", lambda v, d: v == "frequency"),
        "dc_removal": (_bool, "dc_removal", lambda v, d: v == "frequency"),
        "alpha": (float, "alpha", lambda v, d: v == "frequency"),
        "beta": (float, "beta", lambda v, d: v == "frequency"),
        "branch_channels": (int, "branch_channels", lambda v, d: v == "frequency"),
        "trunk_channels": (int, "trunk_channels", lambda v, d: v == "frequency"),
        "conv_channels": (int, "conv_channels", lambda v, d: v == "spatial"),
        "fc1": (int, "fc1", lambda v, d: v == "spatial"),
        "fc2": (int, "fc2", lambda v, d: v == "spatial" and d == "mnist"),
        "image_size": (int, "image_size", lambda v, d: d == "att"),
    },
    "optimizer": {
        "learning_rate": (float, "learning_rate", None),
        "momentum": (float, "momentum", None),
        "batch_size": (int, "batch_size", None),
        "iterations": (int, "iterations", None),
        "seed": (int, "seed", None),
        "eval_every": (int, "eval_every", None),
    },
    "data": {
        "root": (str, "data_root", None),
        "train_images": (str, "train_images", lambda v, d: d == "mnist"),
        "train_labels": (str, "train_labels", lambda v, d: d == "mnist"),
        "test_images": (str, "test_images", lambda v, d: d == "mnist"),
        "test_labels": (str, "test_labels", lambda v, d: d == "mnist"),
        "train_limit": (int, "train_limit", lambda v, d: d == "mnist"),
        "per_class_train": (int, "per_class_train", lambda v, d: d == "att"),
        "split_seed": (int, "split_seed", lambda v, d: d == "att"),
    },
}

_REQUIRED = (("network", "variant"), ("network", "dataset"), ("data", "root"))


def parse_config_text(text, origin="<config>"):
    entries = {}
    section = None
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"{origin}:{lineno}: malformed section header '{line}'")
            section = line[1:-1].strip()
            if section not in _SCHEMA:
                raise ConfigError(f"{origin}:{lineno}: unknown section [{section}]")
            continue
        if "=" not in line:
            raise ConfigError(f"{origin}:{lineno}: expected 'key = value', got '{line}'")
        if section is None:
            raise ConfigError(f"{origin}:{lineno}: key outside of any [section]")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _SCHEMA[section]:
            raise ConfigError(f"{origin}:{lineno}: unknown key '{key}' in [{section}]")
        if (section, key) in entries:
            first = entries[(section, key)][1]
            raise ConfigError(
                f"{origin}:{lineno}: duplicate key '{key}' in [{section}] "
                f"(first defined at line {first})"
            )
        entries[(section, key)] = (value, lineno)

    missing = [f"{sec}.{key}" for sec, key in _REQUIRED if (sec, key) not in entries]
    if missing:
        raise ConfigError(
            f"{origin}: missing required keys: {', '.join(missing)} "
            f"(sections: {', '.join('[' + s + ']' for s in _SCHEMA)})"
        )

    values = {}
    for (section, key), (raw, lineno) in entries.items():
        converter, attr, _ = _SCHEMA[section][key]
        try:
            values[attr] = converter(raw)
        except ValueError as exc:
            raise ConfigError(f"{origin}:{lineno}: bad value for '{key}': {exc}") from None

    cfg = NetworkConfig(**values)

    for (section, key), (_, lineno) in entries.items():
        _, _, applicable = _SCHEMA[section][key]
        if applicable is not None and not applicable(cfg.variant, cfg.dataset):
            raise ConfigError(
                f"{origin}:{lineno}: key '{key}' does not apply to "
                f"variant={cfg.variant}, dataset={cfg.dataset}"
            )

    _validate(cfg, origin)
    return cfg


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return parse_config_text(text, origin=str(path))


def _validate(cfg, origin):
    checks = [
        (cfg.learning_rate > 0, "optimizer.learning_rate must be > 0"),
        (0.0 <= cfg.momentum < 1.0, "optimizer.momentum must be in [0, 1)"),
        (cfg.batch_size >= 2, "optimizer.batch_size must be >= 2 (batch statistics)"),
        (cfg.iterations >= 1, "optimizer.iterations must be >= 1"),
        (cfg.eval_every >= 1, "optimizer.eval_every must be >= 1"),
        (cfg.train_limit >= 0, "data.train_limit must be >= 0"),
    ]
    if cfg.variant == "frequency":
        checks += [
            (cfg.branch_channels >= 1, "network.branch_channels must be >= 1"),
            (cfg.trunk_channels >= 1, "network.trunk_channels must be >= 1"),
        ]
    else:
        checks += [
            (cfg.conv_channels >= 1, "network.conv_channels must be >= 1"),
            (cfg.fc1 >= 1, "network.fc1 must be >= 1"),
            (cfg.fc2 >= 1, "network.fc2 must be >= 1"),
        ]
    if cfg.dataset == "att":
        checks += [
            (cfg.image_size >= 8, "network.image_size must be >= 8"),
            (0 < cfg.per_class_train < 10, "data.per_class_train must be in 1..9"),
        ]
    for ok, message in checks:
        if not ok:
            raise ConfigError(f"{origin}: {message}")
    validate_shape_chain(cfg, origin)


def input_size(cfg):
    return 28 if cfg.dataset == "mnist" else cfg.image_size


def validate_shape_chain(cfg, origin="<config>"):
    """Walk the layer chain symbolically and reject incompatible shapes,
    naming the offending layer."""
    size = input_size(cfg)
    if cfg.variant == "spatial":
        for stage in ("max_pool_1", "max_pool_2"):
            if size % 2:
                raise ConfigError(
                    f"{origin}: {stage}: input {size}x{size} is odd, 2x2 pooling "
                    f"needs even dims"
                )
            size //= 2
        return
    # frequency
    if cfg.pyramidal and size % 2:
        raise ConfigError(
            f"{origin}: pyramid: image size {size} is odd, quadrant split "
            f"needs even dims"
        )
    for stage in ("branch", "trunk"):
        if cfg.use_2srelu and (size // 2) // 2 < 1:
            raise ConfigError(
                f"{origin}: tsrelu_{stage}: low-frequency region is empty for "
                f"a {size}x{size} spectrum"
            )
        pooled = size // 2
        if pooled < 1:
            raise ConfigError(
                f"{origin}: spectral_pool_{stage}: cannot pool {size} below 1"
            )
        size = pooled
