"""Exception hierarchy.

``ValidationError`` subclasses mean the caller asked for something outside
an operation's domain; the CLI maps them to exit code 2.  Everything else
under ``FracboundError`` is a numerical failure (exit code 4).
"""


class FracboundError(Exception):
    """Base class for all package errors."""


class ValidationError(FracboundError, ValueError):
    """Input outside the documented domain of an operation."""


class PoleError(ValidationError):
    """Argument at (or within 1e-14 of) a pole of the Gamma function."""


class DomainError(ValidationError):
    """Parameter constraint violated (order, weight, sector, ...)."""


class WeightSingularityError(DomainError):
    """Weighted integrand is not finite at the smallest grid node."""


class ExtrapolationError(ValidationError):
    """Resampling target reaches outside the source grid."""


class SpectrumSplitError(ValidationError):
    """Operator spectrum does not satisfy |Re(lambda)| > delta."""


class NotConvergedError(FracboundError):
    """A limit was requested but the trajectory diverged or was inconclusive.

    The CLI maps this to exit code 3: divergence can be the expected answer.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NumericalError(FracboundError):
    """Generic numerical failure (SVD did not converge, ...)."""


class TruncationError(NumericalError):
    """A truncated integral has a tail bound above the requested tolerance."""


class NearSingularError(NumericalError):
    """Shifted linear system is numerically singular."""


class RankAmbiguityError(NumericalError):
    """Singular values too close to the rank threshold to decide a dimension."""
