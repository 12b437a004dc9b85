"""Exception types shared across the library."""


class LevypenError(Exception):
    """Base class for library errors."""


class QuadratureError(LevypenError):
    """Quadrature failed to reach the requested tolerance.

    Carries the achieved error estimate in ``err_estimate``.
    """

    def __init__(self, message, err_estimate=None):
        super().__init__(message)
        self.err_estimate = err_estimate


class ExtrapolationError(LevypenError):
    """The q -> 0 limit did not converge within the configured grid.

    Carries the last two iterates in ``last_iterates``.
    """

    def __init__(self, message, last_iterates=None):
        super().__init__(message)
        self.last_iterates = last_iterates


class DegenerateConfigurationError(LevypenError):
    """Points too close together, or a denominator underflowed."""


class NumericsError(LevypenError):
    """A computed quantity violated a structural bound (probability far
    outside [0,1], nonpositive martingale density, ...)."""
