"""Error analysis of Riemann sums for integrands with square-root-type
singularities at the right endpoint."""

from .errors import (AccuracyError, CapabilityError, CertificateNotFoundError,
                     DivergentIntegralError, DomainError, EmptyWindowError,
                     HypothesisError, InsufficientDataError, NumericalError,
                     PreconditionError, SchemeMismatchError, SingquadError)
from .integrand import (ClassTag, Domain, Integrand, PowerTerm, SmoothPart, corpus,
                        eval_derivative, evaluate, get_fixture)
from .riemann import (SumScheme, error_R, left_sum, scaled_difference, symmetric_sum,
                      trapezoid_sum)

__version__ = "0.1.0"

__all__ = [
    "AccuracyError",
    "CapabilityError",
    "CertificateNotFoundError",
    "DivergentIntegralError",
    "DomainError",
    "EmptyWindowError",
    "HypothesisError",
    "InsufficientDataError",
    "NumericalError",
    "PreconditionError",
    "SchemeMismatchError",
    "SingquadError",
    "ClassTag",
    "Domain",
    "Integrand",
    "PowerTerm",
    "SmoothPart",
    "corpus",
    "eval_derivative",
    "evaluate",
    "get_fixture",
    "SumScheme",
    "error_R",
    "left_sum",
    "scaled_difference",
    "symmetric_sum",
    "trapezoid_sum",
]
