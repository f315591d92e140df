"""Exception hierarchy for singquad."""


class SingquadError(Exception):
    """Base class for every error raised by this package."""


class HypothesisError(SingquadError, ValueError):
    """The integrand does not satisfy the hypotheses a routine requires."""


class DomainError(SingquadError, ValueError):
    """Evaluation requested outside the region where the integrand is finite."""


class CapabilityError(SingquadError):
    """A derivative order was requested that the smooth part does not provide."""


class SchemeMismatchError(SingquadError, ValueError):
    """A summation scheme was applied to an integrand or domain it does not support."""


class DivergentIntegralError(SingquadError, ValueError):
    pass


class PreconditionError(SingquadError, ValueError):
    pass


class InsufficientDataError(SingquadError, ValueError):
    pass


class EmptyWindowError(SingquadError, ValueError):
    pass


class NumericalError(SingquadError):
    """Base for failures of a numeric procedure (as opposed to bad input)."""


class AccuracyError(NumericalError):
    """Adaptive quadrature did not reach the requested tolerance.

    The best available estimate and its residual error bound are kept on
    the exception so callers may decide to accept them.
    """

    def __init__(self, message, estimate, residual):
        super().__init__(message)
        self.estimate = estimate
        self.residual = residual


class CertificateNotFoundError(NumericalError):
    pass
