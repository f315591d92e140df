"""Endpoint-singular integrands on [z0, 1].

An integrand is a sum of power terms ``c * (1 - x)**(m/2)`` plus a smooth
remainder, or, for the raw class, an arbitrary evaluator continuous on
[-1, 1).  Evaluators accept scalars or numpy arrays and preserve the input
float dtype, so ``np.longdouble`` grids are evaluated in extended precision.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import CapabilityError, DomainError, HypothesisError

#: admissible exponents, stored as numerator over 2
ALLOWED_NUM2 = (-1, 1, 3, 5, 7)


class ClassTag(str, enum.Enum):
    P1 = "P1"
    P1_ITEM2 = "P1_ITEM2"
    P2 = "P2"
    P3_RAW = "P3_RAW"


@dataclass(frozen=True)
class Domain:
    z0: int

    def __post_init__(self):
        if self.z0 not in (-1, 0) or isinstance(self.z0, bool):
            raise HypothesisError(f"z0 must be -1 or 0, got {self.z0!r}")

    @property
    def interval(self) -> tuple[float, float]:
        return (float(self.z0), 1.0)


def _falling(p: Fraction, k: int) -> Fraction:
    out = Fraction(1)
    for j in range(k):
        out *= p - j
    return out


@dataclass(frozen=True)
class PowerTerm:
    """``coeff * (1 - x)**(num2 / 2)``."""

    coeff: float
    num2: int

    def __post_init__(self):
        if self.num2 not in ALLOWED_NUM2:
            raise HypothesisError(
                f"exponent {self.num2}/2 not in {{-1/2, 1/2, 3/2, 5/2, 7/2}}")
        object.__setattr__(self, "coeff", float(self.coeff))

    @property
    def exponent(self) -> Fraction:
        return Fraction(self.num2, 2)

    def derivative_factor(self, order: int) -> float:
        """Exact ``(-1)**order * p (p-1) ... (p-order+1)`` rounded once."""
        return float((-1) ** order * _falling(self.exponent, order))

    def value(self, u):
        """Evaluate at ``u = 1 - x``."""
        return self.coeff * np.power(u, float(self.exponent))

    def derivative(self, u, order: int):
        """``order``-th x-derivative, evaluated at ``u = 1 - x``."""
        if order == 0:
            return self.value(u)
        return (self.coeff * self.derivative_factor(order)) * np.power(
            u, float(self.exponent - order))


@dataclass(frozen=True)
class SmoothPart:
    """Smooth remainder with explicit derivative evaluators.

    ``derivatives[k-1]`` evaluates the k-th derivative.  When ``coeffs`` is
    set the part is the polynomial ``sum(coeffs[i] * x**i)``.
    """

    func: Callable
    derivatives: tuple = ()
    smoothness: int = 0
    coeffs: Optional[tuple] = None

    def __post_init__(self):
        if self.smoothness < len(self.derivatives):
            raise HypothesisError(
                "declared smoothness is below the number of derivative evaluators")

    @classmethod
    def polynomial(cls, coeffs: Sequence[float], smoothness: int = 4) -> "SmoothPart":
        c = tuple(float(a) for a in coeffs) or (0.0,)
        arr = np.array(c)
        derivs = []
        for k in range(1, smoothness + 1):
            dk = P.polyder(arr, k) if len(arr) > k else np.zeros(1)
            derivs.append(_poly_evaluator(dk))
        return cls(_poly_evaluator(arr), tuple(derivs), smoothness, c)

    @classmethod
    def zero(cls) -> "SmoothPart":
        return cls.polynomial(())

    @property
    def is_polynomial(self) -> bool:
        return self.coeffs is not None

    @property
    def is_zero(self) -> bool:
        return self.coeffs is not None and not any(self.coeffs)

    def derivative(self, x, order: int):
        if order == 0:
            return self.func(x)
        if order > len(self.derivatives):
            raise CapabilityError(
                f"smooth part provides derivatives up to order {len(self.derivatives)},"
                f" not {order}")
        return self.derivatives[order - 1](x)


def _poly_evaluator(c: np.ndarray) -> Callable:
    coeffs = np.array(c, dtype=float)

    def ev(x):
        # P.polyval promotes to the dtype of x, so longdouble grids stay extended
        return P.polyval(x, coeffs) + 0 * x

    return ev


def _as_array(x):
    a = np.asarray(x)
    if a.dtype.kind != "f":
        a = a.astype(float)
    return a


def _unwrap(a):
    return a[()] if isinstance(a, np.ndarray) and a.ndim == 0 else a


@dataclass(frozen=True)
class Integrand:
    """An endpoint-singular integrand on ``[z0, 1]``.

    Parameters
    ----------
    name : str
    z0 : {-1, 0}
    terms : sequence of PowerTerm
    smooth : SmoothPart
    class_tag : ClassTag
        Which set of hypotheses the integrand is meant to satisfy; checked on
        construction.
    raw : callable, optional
        Evaluator for ``P3_RAW`` integrands, which have no decomposition.
    exact : float, optional
        Closed-form value of the integral over ``[z0, 1]`` when known.
    """

    name: str
    z0: int
    terms: tuple = ()
    smooth: SmoothPart = field(default_factory=SmoothPart.zero)
    class_tag: ClassTag = ClassTag.P1_ITEM2
    raw: Optional[Callable] = None
    exact: Optional[float] = None

    def __post_init__(self):
        Domain(self.z0)
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "class_tag", ClassTag(self.class_tag))
        _validate_class(self)

    # -- structure -------------------------------------------------------
    @property
    def domain(self) -> Domain:
        return Domain(self.z0)

    def coefficient(self, num2: int) -> float:
        """Total coefficient of ``(1 - x)**(num2/2)``."""
        return math.fsum(t.coeff for t in self.terms if t.num2 == num2)

    @property
    def has_inverse_sqrt(self) -> bool:
        return any(t.num2 < 0 and t.coeff != 0 for t in self.terms)

    @property
    def is_raw(self) -> bool:
        return self.class_tag is ClassTag.P3_RAW

    # -- evaluation ------------------------------------------------------
    def __call__(self, x):
        return evaluate(self, x)

    def derivative(self, x, order: int):
        return eval_derivative(self, x, order)

    # -- serialization ---------------------------------------------------
    def to_dict(self) -> dict:
        d = {"name": self.name, "z0": self.z0, "class": self.class_tag.value}
        if self.is_raw:
            d["raw"] = self.name
        else:
            if not self.smooth.is_polynomial:
                raise HypothesisError(
                    f"{self.name}: only polynomial smooth parts are serializable")
            d["terms"] = [{"coeff": t.coeff, "exponent_num_over_2": t.num2}
                          for t in self.terms]
            d["smooth_poly_coeffs"] = list(self.smooth.coeffs)
        d["exact_integral"] = self.exact
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Integrand":
        """Build an integrand from its JSON description.

        Raw evaluators cannot be described in JSON; a ``raw`` entry must name
        one of the built-in raw evaluators.
        """
        name = str(d.get("name", "integrand"))
        z0 = int(d["z0"])
        if "raw" in d:
            if d["raw"] not in RAW_EVALUATORS:
                raise HypothesisError(f"unknown raw evaluator {d['raw']!r}")
            return cls(name, z0, class_tag=ClassTag.P3_RAW,
                       raw=RAW_EVALUATORS[d["raw"]])
        terms = tuple(PowerTerm(float(t["coeff"]), int(t["exponent_num_over_2"]))
                      for t in d.get("terms", []))
        smooth = SmoothPart.polynomial(d.get("smooth_poly_coeffs", []))
        tag = d.get("class")
        if tag is None:
            tag = ClassTag.P2 if any(t.num2 == -1 for t in terms) else ClassTag.P1_ITEM2
        exact = d.get("exact_integral")
        if exact is None and tag is not ClassTag.P3_RAW:
            exact = closed_form_integral(terms, smooth, z0)
        return cls(name, z0, terms, smooth, tag, exact=exact)


def _validate_class(f: Integrand) -> None:
    tag = f.class_tag
    num2s = {t.num2 for t in f.terms}
    k = f.smooth.smoothness
    if tag is ClassTag.P3_RAW:
        if f.raw is None or f.terms:
            raise HypothesisError("P3_RAW integrands carry a raw evaluator and no terms")
        if f.z0 != -1:
            raise HypothesisError("P3_RAW integrands live on [-1, 1)")
        return
    if f.raw is not None:
        raise HypothesisError("only P3_RAW integrands may carry a raw evaluator")
    if tag is ClassTag.P1:
        ok = num2s <= {1, 3} and k >= 2
    elif tag is ClassTag.P1_ITEM2:
        ok = num2s <= {1, 3, 5, 7} and k >= 4
    else:
        ok = num2s <= {-1, 1} and k >= 1 and f.coefficient(-1) > 0
    if not ok:
        raise HypothesisError(
            f"{f.name}: terms {sorted(num2s)} (in halves) with smoothness C^{k}"
            f" do not satisfy the {tag.value} hypotheses")


def evaluate(f: Integrand, x):
    """Evaluate ``f`` at ``x`` (scalar or array)."""
    a = _as_array(x)
    if f.is_raw:
        if np.any(a < -1) or np.any(a >= 1):
            raise DomainError(f"{f.name}: raw integrand is defined on [-1, 1)")
        return _unwrap(f.raw(a))
    _check_domain(f, a)
    u = 1 - a
    if f.has_inverse_sqrt and np.any(u == 0):
        raise DomainError(f"{f.name}: (1-x)^(-1/2) term is infinite at x = 1")
    out = f.smooth.func(a)
    for t in f.terms:
        out = out + t.value(u)
    return _unwrap(out)


def eval_derivative(f: Integrand, x, order: int):
    """``order``-th derivative of ``f`` (1 <= order <= 4)."""
    if not 1 <= order <= 4:
        raise ValueError("order must be in 1..4")
    if f.is_raw:
        raise CapabilityError("raw integrands carry no derivative evaluators")
    a = _as_array(x)
    _check_domain(f, a)
    u = 1 - a
    if np.any(u == 0) and any(t.coeff != 0 and t.num2 < 2 * order for t in f.terms):
        raise DomainError(f"{f.name}: derivative of order {order} is singular at x = 1")
    out = f.smooth.derivative(a, order)
    for t in f.terms:
        out = out + t.derivative(u, order)
    return _unwrap(out)


def _check_domain(f: Integrand, a) -> None:
    if np.any(a < f.z0) or np.any(a > 1):
        raise DomainError(f"{f.name}: x outside [{f.z0}, 1]")


def closed_form_integral(terms, smooth: SmoothPart, z0: int) -> float:
    """Power rule for the terms plus the polynomial antiderivative."""
    if not smooth.is_polynomial:
        raise HypothesisError("closed form needs a polynomial smooth part")
    parts = [t.coeff * (1.0 - z0) ** (t.num2 / 2 + 1) / (t.num2 / 2 + 1) for t in terms]
    anti = P.polyint(np.array(smooth.coeffs))
    parts.append(float(P.polyval(1.0, anti) - P.polyval(float(z0), anti)))
    return math.fsum(parts)


# -- corpus ---------------------------------------------------------------

def _inv_pow32(x):
    return np.power(1 - x, -1.5)


def _inv_pow32_cos(x):
    return np.power(1 - x, -1.5) * np.cos(x)


def _cos3(x):
    return np.cos(3 * x)


RAW_EVALUATORS = {
    "inv_pow32": _inv_pow32,
    "inv_pow32_cos": _inv_pow32_cos,
    "bounded_cos3": _cos3,
}

#: sup |f| for bounded raw fixtures
RAW_SUP = {"bounded_cos3": 1.0}

# (name, z0, [(coeff, num2)], poly coeffs ascending)
_SPECS = [
    ("zero", 0, [], []),
    ("zero_m1", -1, [], []),
    ("sqrt1mx", 0, [(1.0, 1)], []),
    ("sqrt1mx_m1", -1, [(1.0, 1)], []),
    ("pow32", 0, [(1.0, 3)], []),
    ("pow32_m1", -1, [(1.0, 3)], []),
    ("pow52", 0, [(1.0, 5)], []),
    ("pow52_m1", -1, [(1.0, 5)], []),
    ("pow72", 0, [(1.0, 7)], []),
    ("pow72_m1", -1, [(1.0, 7)], []),
    ("linear", 0, [], [0.25, 1.0]),
    ("quadratic_m1", -1, [], [1.0, -0.5, 2.0]),
    ("mixed", 0, [(1.0, 1), (0.5, 3)], [0.0, 0.0, 1.0]),
    ("mixed_m1", -1, [(1.0, 1), (0.5, 3)], [0.0, 0.0, 1.0]),
    ("mixed52_m1", -1, [(1.0, 1), (1.0, 5)], [0.0, 0.0, 1.0]),
    ("mixed72_m1", -1, [(1.0, 1), (1.0, 7)], [0.0, 0.0, 0.0, 0.0, 1.0]),
    ("sqrt_x2_m1", -1, [(1.0, 1)], [0.0, 0.0, 1.0]),
    ("inv_sqrt", 0, [(1.0, -1)], []),
    ("inv_sqrt_m1", -1, [(1.0, -1)], []),
    ("p2_mixed_m1", -1, [(2.0, -1), (1.0, 1)], []),
    ("p2_bump", 0, [(1.0, -1), (10.0, 1)], []),
    ("p2_dip_m1", -1, [(1.0, -1)], [0.0, 0.0, 4.0]),
]


def corpus() -> list[Integrand]:
    """Named test fixtures with exact integrals attached."""
    out = []
    for name, z0, terms, poly in _SPECS:
        ts = tuple(PowerTerm(c, m) for c, m in terms)
        smooth = SmoothPart.polynomial(poly)
        tag = ClassTag.P2 if any(m == -1 for _, m in terms) else ClassTag.P1_ITEM2
        out.append(Integrand(name, z0, ts, smooth, tag,
                             exact=closed_form_integral(ts, smooth, z0)))
    for name, ev in RAW_EVALUATORS.items():
        out.append(Integrand(name, -1, class_tag=ClassTag.P3_RAW, raw=ev))
    return out


def get_fixture(name: str) -> Integrand:
    for f in corpus():
        if f.name == name:
            return f
    raise KeyError(name)
