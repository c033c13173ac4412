"""Exception types shared across the package."""


class GreenRateError(Exception):
    """Base class for all package-specific errors."""


class TableRangeError(GreenRateError, ValueError):
    """Frequency outside a tabulated permittivity table (no extrapolation)."""


class CoverageError(GreenRateError, ValueError):
    """A sampled kernel curve does not cover the spectral support it must."""


class PassivityError(GreenRateError, ValueError):
    """A quantity that must be nonnegative by passivity came out negative."""


class AsymptoticDomainError(GreenRateError, ValueError):
    """Near-interface closed forms requested outside their validity bounds."""


class PolePinchError(GreenRateError, ArithmeticError):
    """Sommerfeld integrand hit a vanishing guided-mode denominator.

    Unreachable for passive media with positive damping; raised defensively.
    """


class ConvergenceError(GreenRateError, RuntimeError):
    """Adaptive integration ran out of subdivisions.

    Carries the partial result so callers can inspect how far it got.
    """

    def __init__(self, message, value=None, estimate=None):
        super().__init__(message)
        self.value = value
        self.estimate = estimate


class SeriesTruncationError(GreenRateError, RuntimeError):
    """A partial-wave series failed its tail criterion at the order ceiling."""

    def __init__(self, message, partial_sum=None, l_max=None):
        super().__init__(message)
        self.partial_sum = partial_sum
        self.l_max = l_max


class ScenarioError(GreenRateError, ValueError):
    """A scenario file failed parsing or validation."""
