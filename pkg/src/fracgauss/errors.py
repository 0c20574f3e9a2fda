"""Exception hierarchy shared by every module.

Argument problems derive from :class:`ValueError` so callers that only care
about "bad input" can catch that; numerical breakdowns derive from
:class:`NumericalError` (an :class:`ArithmeticError`).
"""


class FracGaussError(Exception):
    """Base class for all package errors."""


class DomainError(FracGaussError, ValueError):
    """Argument outside the domain of a function or operation."""


class PoleError(DomainError):
    """Gamma evaluated at a non-positive integer."""


class UnsupportedError(FracGaussError, ValueError):
    """A valid request that this library deliberately does not handle."""


class NumericalError(FracGaussError, ArithmeticError):
    """A computation failed for numerical reasons."""


class GammaOverflowError(NumericalError, OverflowError):
    """Gamma exceeds the double range and log mode was not requested."""


class ConvergenceError(NumericalError):
    """An iterative method did not converge.

    ``index`` names the offending item (e.g. the eigenvalue index), if any.
    """

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class BreakdownError(NumericalError):
    """Moment-based recurrence construction hit a non-positive beta."""


class ContourError(NumericalError):
    """Bromwich abscissa not to the right of the transform's singularities."""


class NonFiniteError(NumericalError):
    """An integrand, transform or function sample was not finite."""
