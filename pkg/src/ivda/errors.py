"""Semantic exceptions shared across the package."""


class IvdaError(Exception):
    """Base class for every error raised by this package."""


class DomainError(IvdaError, ValueError):
    """An argument lies outside its mathematical or structural domain."""


class DataValidationError(IvdaError, ValueError):
    """Input data break a contract (shape, header, bounds, consistency).

    Carries the structured violation list when one is available, so callers
    can render machine-readable reports.
    """

    def __init__(self, message, violations=None):
        super().__init__(message)
        self.violations = list(violations) if violations else []


class NumericFailure(IvdaError, ArithmeticError):
    """A numeric procedure cannot produce a result, e.g. a zero-variance
    latent, a violated moment condition, or a fit that does not converge."""
