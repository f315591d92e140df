"""Reference values independent of the sums under test.

Singular parts are always integrated with the power rule; only smooth
remainders go through numeric quadrature.  Brute-force sums used as
asymptotic references are carried out in ``np.longdouble`` when the platform
provides more precision than binary64.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .errors import AccuracyError, DivergentIntegralError, HypothesisError, PreconditionError
from .integrand import Integrand
from .riemann import SumScheme

EXTENDED = np.finfo(np.longdouble).eps < np.finfo(float).eps

#: resolutions used by :func:`asymptotic_constant`
ASYMPTOTIC_NS = (2 ** 16, 2 ** 17, 2 ** 18)


class Method(str, enum.Enum):
    ANALYTIC = "ANALYTIC"
    ADAPTIVE_QUAD = "ADAPTIVE_QUAD"
    BRUTE_FORCE = "BRUTE_FORCE"


@dataclass(frozen=True)
class ReferenceValue:
    value: float
    method: Method
    tolerance: float
    warning: Optional[str] = None

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.method is Method.ANALYTIC and self.tolerance > 1e-15:
            raise ValueError("analytic reference values carry tolerance <= 1e-15")

    def __float__(self):
        return float(self.value)


def integral_power(coeff: float, exponent: float, z0: float) -> float:
    """``coeff * integral_{z0}^{1} (1 - x)**exponent dx``."""
    if exponent <= -1:
        raise DivergentIntegralError(f"(1-x)^{exponent} is not integrable at x = 1")
    e1 = exponent + 1
    return coeff * (1.0 - z0) ** e1 / e1


def integrate_smooth(g: Callable, a: float, b: float, tol: float = 1e-12,
                     limit: int = 200) -> float:
    """Adaptive Gauss-Kronrod quadrature with absolute error target ``tol``.

    Raises
    ------
    AccuracyError
        If the subdivision budget is exhausted before ``tol`` is met.
    """
    if not 1e-14 <= tol <= 1e-6:
        raise PreconditionError("tol must lie in [1e-14, 1e-6]")
    if a == b:
        return 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        res = integrate.quad(lambda t: float(g(t)), a, b, epsabs=tol, epsrel=0.0,
                             limit=limit, full_output=1)
    value, abserr = res[0], res[1]
    if len(res) > 3 or abserr > tol:
        raise AccuracyError(
            f"quadrature on [{a}, {b}] stopped at error {abserr:.3g} > {tol:.3g}",
            value, abserr)
    return value


def exact_integral(f: Integrand, tol: float = 1e-12) -> ReferenceValue:
    """Integral of ``f`` over ``[z0, 1]``: power rule plus smooth remainder."""
    if f.is_raw:
        raise HypothesisError(f"{f.name}: raw integrands have no reference integral")
    parts = [integral_power(t.coeff, t.num2 / 2, f.z0) for t in f.terms]
    if f.smooth.is_polynomial:
        parts.append(float(_poly_integral_exact(f.smooth.coeffs, f.z0)))
        return ReferenceValue(math.fsum(parts), Method.ANALYTIC, 1e-15)
    parts.append(integrate_smooth(f.smooth.func, float(f.z0), 1.0, tol))
    return ReferenceValue(math.fsum(parts), Method.ADAPTIVE_QUAD, tol)


def _poly_integral_exact(coeffs, z0) -> Fraction:
    z = Fraction(z0)
    return sum((Fraction(c) * (1 - z ** (i + 1)) / (i + 1)
                for i, c in enumerate(coeffs)), Fraction(0))


def _exact_ld(f: Integrand):
    """Extended-precision counterpart of :func:`exact_integral`."""
    if not f.smooth.is_polynomial:
        return np.longdouble(exact_integral(f).value)
    total = np.longdouble(0)
    for t in f.terms:
        e1 = np.longdouble(t.num2) / 2 + 1
        total += np.longdouble(t.coeff) * np.power(np.longdouble(1 - f.z0), e1) / e1
    q = _poly_integral_exact(f.smooth.coeffs, f.z0)
    return total + np.longdouble(q.numerator) / np.longdouble(q.denominator)


def brute_force_sum(f: Integrand, n: int, scheme: SumScheme):
    """Scheme sum evaluated in extended precision (pairwise summation)."""
    scheme = SumScheme(scheme)
    dt = np.longdouble if EXTENDED else float
    z0 = f.z0
    if scheme is SumScheme.TRAPEZOID_ENDPOINT:
        k = np.arange(z0 * n + 1, n, dtype=dt)
        ends = (f(np.array([z0], dtype=dt))[0] + f(np.array([1], dtype=dt))[0]) / 2
        body = f(k / n)
        total = np.sum(body, dtype=dt) + ends
    else:
        start = z0 * n if scheme is SumScheme.LEFT else -n + 1
        if scheme is SumScheme.SYMMETRIC and z0 != -1:
            raise HypothesisError("symmetric sum needs z0 = -1")
        k = np.arange(start, n, dtype=dt)
        total = np.sum(f(k / n), dtype=dt)
    return total / n


def brute_force_error(f: Integrand, n: int, scheme: SumScheme):
    """``integral - sum`` for trapezoid/left schemes, the raw sum for symmetric."""
    s = brute_force_sum(f, n, scheme)
    if SumScheme(scheme) is SumScheme.SYMMETRIC:
        return s
    return (_exact_ld(f) if EXTENDED else exact_integral(f).value) - s


def asymptotic_constant(f: Integrand, scheme: SumScheme, p: float,
                        ns=ASYMPTOTIC_NS) -> ReferenceValue:
    """Limit of ``n**p * error_n`` from brute-force values at three resolutions.

    The values at consecutive doublings are combined by one Richardson step
    assuming a leading correction proportional to ``n**-0.5``, which is the
    gap between consecutive orders for half-integer endpoint behaviour.  For
    the symmetric scheme ``error_n`` is the raw sum and ``p = -1/2``.
    """
    scheme = SumScheme(scheme)
    allowed = {-0.5} if scheme is SumScheme.SYMMETRIC else {0.5, 1.5}
    if p not in allowed:
        raise PreconditionError(f"p = {p} not supported for {scheme.value}")
    v = [float(np.longdouble(n) ** np.longdouble(p) * brute_force_error(f, n, scheme))
         for n in ns]
    r = 2 ** -0.5
    lim12 = (v[1] - r * v[0]) / (1 - r)
    lim23 = (v[2] - r * v[1]) / (1 - r)
    d1, d2 = v[1] - v[0], v[2] - v[1]
    warning = None
    if d1 * d2 < 0 or abs(d2) > abs(d1):
        warning = "non-monotone tail: n^p * error does not settle over the resolutions used"
    tol = max(abs(lim23 - lim12), 1e-15)
    return ReferenceValue(lim23, Method.BRUTE_FORCE, tol, warning)
