"""Exception types shared across the package."""


class EvaluationError(RuntimeError):
    """A function or weight produced a non-finite value at a grid node."""


class SlopeGuardError(ValueError):
    """A conjugation argument exceeds the slope representable by the grid.

    Raised instead of silently truncating the supremum; also the canonical
    signal that a conjugate is infinite (linear-growth log-weights).
    """


class QuadratureError(RuntimeError):
    """Quadrature failed to reach the requested tolerance within budget."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class DivergingRatioError(RuntimeError):
    """The weighted polynomial-growth ratio has no interior maximum."""


class ConfigError(ValueError):
    """Invalid experiment configuration."""
