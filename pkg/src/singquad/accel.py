"""Richardson-type acceleration of the endpoint-weighted sum.

Since ``n^2 R_n`` varies slowly, the error is dominated by ``c n^{-3/2}``
with a regular-endpoint correction ``b n^{-2}`` behind it.  Three sums at
``n, 2n, 4n`` identify ``I``, ``c`` and ``b`` exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import riemann
from .errors import HypothesisError, PreconditionError
from .integrand import ClassTag, Integrand

RATIO = 2.0 ** -1.5
#: step ratio of the regular-endpoint term m^-2
RATIO2 = 0.25
#: differences below this are treated as carrying no signal
ZERO_SIGNAL = 1e-15


@dataclass(frozen=True)
class AcceleratedEstimate:
    base_n: int
    raw_sum: float
    leading_constant: float
    corrected_value: float
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"base_n": self.base_n, "raw_sum": self.raw_sum,
                "leading_constant": self.leading_constant,
                "corrected_value": self.corrected_value,
                "diagnostics": dict(self.diagnostics)}


def solve_differences(s_n: float, s_2n: float, s_4n: float, n: int) -> tuple[float, float, float]:
    """Fit ``S_m = I - c m^{-3/2} - b m^{-2}`` through three sums.

    Returns ``(I, c, b)``.  With ``a = c n^{-3/2} (1 - r)`` and
    ``e = b n^{-2} (1 - q)`` the differences are ``d1 = a + e`` and
    ``d2 = r a + q e``, a 2x2 system with closed-form solution.
    """
    d1, d2 = s_2n - s_n, s_4n - s_2n
    if abs(d1) < ZERO_SIGNAL and abs(d2) < ZERO_SIGNAL:
        return s_4n, 0.0, 0.0
    a = (d2 - RATIO2 * d1) / (RATIO - RATIO2)
    e = d1 - a
    c = a / (n ** -1.5 * (1 - RATIO))
    b = e / (n ** -2.0 * (1 - RATIO2))
    m = 4 * n
    return s_4n + c * m ** -1.5 + b * m ** -2.0, c, b


def _check(f: Integrand, n: int):
    if f.class_tag not in (ClassTag.P1, ClassTag.P1_ITEM2):
        raise HypothesisError(f"{f.name}: acceleration applies to the trapezoid classes only")
    if n < 64:
        raise PreconditionError("n must be >= 64")


def estimate_leading_constant(f: Integrand, n: int) -> float:
    _check(f, n)
    s = [riemann.trapezoid_sum(f, m) for m in (n, 2 * n, 4 * n)]
    return solve_differences(*s, n)[1]


def extrapolate(f: Integrand, n: int) -> AcceleratedEstimate:
    """Corrected integral estimate from the sums at ``n``, ``2n`` and ``4n``."""
    _check(f, n)
    s_n, s_2n, s_4n = (riemann.trapezoid_sum(f, m) for m in (n, 2 * n, 4 * n))
    value, c, b = solve_differences(s_n, s_2n, s_4n, n)
    d1, d2 = s_2n - s_n, s_4n - s_2n
    diagnostics = {
        "S_n": s_n, "S_2n": s_2n, "S_4n": s_4n,
        "diff_n": d1, "diff_2n": d2,
        "ratio": d2 / d1 if d1 else None,
        "second_order_constant": b,
        # what the m^-3/2 term alone leaves unexplained at 4n
        "residual_4n": abs(s_4n - (value - c * (4 * n) ** -1.5)),
    }
    return AcceleratedEstimate(4 * n, s_4n, c, value, diagnostics)
