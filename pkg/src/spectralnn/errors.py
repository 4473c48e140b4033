"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Bad run configuration: syntax, unknown keys, or incompatible shapes."""


class DataError(ValueError):
    """Dataset file could not be parsed (message includes the byte offset)."""


class NumericalError(ArithmeticError):
    """A numerical consistency check failed (e.g. a complex inverse transform
    of a supposedly real image left a non-negligible imaginary residue)."""


class TrainingAborted(RuntimeError):
    """Training hit a non-finite loss; carries the iteration and, when it can
    be located, the first layer that produced a non-finite output."""

    def __init__(self, iteration, layer=None):
        self.iteration = iteration
        self.layer = layer
        where = f" (first non-finite output in layer '{layer}')" if layer else ""
        super().__init__(f"non-finite loss at iteration {iteration}{where}")
