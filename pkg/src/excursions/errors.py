"""Exception types shared across the package."""


class ExcursionsError(Exception):
    """Base class for all package errors."""


class DomainError(ExcursionsError, ValueError):
    """A parameter lies outside the mathematical domain of the operation."""


class NotC2Error(DomainError):
    """Smooth-regime quantity requested for a kernel whose paths are not twice differentiable."""


class NotHeavyTailError(DomainError):
    """Power-law tail quantity requested for a kernel without a heavy spectral tail."""


class SynthesisError(ExcursionsError):
    """No factorization of the target covariance met the exactness tolerance."""


class PreconditionError(ExcursionsError):
    """Input data violates a documented precondition of the operation."""


class EmptySampleError(ExcursionsError):
    """Too few sample values for the requested statistic."""


class CensorBudgetExceeded(ExcursionsError):
    """Censored replicate rate exceeded the configured budget."""
