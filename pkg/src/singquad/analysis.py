"""Error sequences, rate fits, envelope constants and bound verdicts."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import oracle, riemann
from .errors import EmptyWindowError, HypothesisError, InsufficientDataError, PreconditionError
from .integrand import ClassTag, Integrand
from .riemann import SumScheme

#: entries at or below this magnitude are ignored by log fits
FIT_FLOOR = 1e-14
DEFAULT_N = 64


def geometric_grid(n_min: int = 2 ** 6, n_max: int = 2 ** 16, factor: int = 2) -> list[int]:
    if n_min < 1 or factor < 2 or n_max < n_min:
        raise PreconditionError("need 1 <= n_min <= n_max and factor >= 2")
    out, n = [], n_min
    while n <= n_max:
        out.append(n)
        n *= factor
    return out


DEFAULT_GRID = tuple(geometric_grid())


@dataclass(frozen=True)
class ErrorSequence:
    integrand: str
    scheme: SumScheme
    entries: tuple  # ((n, value), ...)

    def __post_init__(self):
        ns = [n for n, _ in self.entries]
        if any(n < 1 for n in ns) or any(b <= a for a, b in zip(ns, ns[1:])):
            raise PreconditionError("n must be >= 1 and strictly increasing")

    @property
    def ns(self) -> np.ndarray:
        return np.array([n for n, _ in self.entries], dtype=float)

    @property
    def values(self) -> np.ndarray:
        return np.array([v for _, v in self.entries], dtype=float)


@dataclass(frozen=True)
class RateFit:
    exponent: float
    constant: float
    max_log_residual: float
    n_min: int
    n_max: int


@dataclass
class BoundReport:
    proposition: str
    integrand: str
    holds: bool
    constants: dict
    N: int
    grid: list
    margins: list
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "proposition": self.proposition,
            "integrand": self.integrand,
            "holds": bool(self.holds),
            "constants": dict(self.constants),
            "N": self.N,
            "grid": list(self.grid),
            "margins": list(self.margins),
            "notes": list(self.notes),
        }


def _check_grid(grid) -> list[int]:
    g = [int(n) for n in grid]
    if any(b <= a for a, b in zip(g, g[1:])) or (g and g[0] < 1):
        raise PreconditionError("grid must be strictly increasing positive integers")
    return g


def _exact(f: Integrand) -> float:
    return f.exact if f.exact is not None else oracle.exact_integral(f).value


def compute_error_sequence(f: Integrand, scheme: SumScheme, grid) -> ErrorSequence:
    """Trapezoid: ``R_n``; left: ``integral - left_sum``; symmetric: the raw sum."""
    scheme = SumScheme(scheme)
    grid = _check_grid(grid)
    if scheme is SumScheme.SYMMETRIC:
        vals = [riemann.symmetric_sum(f, n) for n in grid]
    else:
        exact = _exact(f)
        vals = [exact - riemann.scheme_sum(f, n, scheme) for n in grid]
    return ErrorSequence(f.name, scheme, tuple(zip(grid, vals)))


def scaled_difference_sequence(f: Integrand, grid) -> ErrorSequence:
    """``D_n = (n+1)^2 R_{n+1} - n^2 R_n`` over ``grid``."""
    grid = _check_grid(grid)
    exact = _exact(f)
    vals = [riemann.scaled_difference(f, n, exact) for n in grid]
    return ErrorSequence(f.name, SumScheme.TRAPEZOID_ENDPOINT, tuple(zip(grid, vals)))


def fit_rate(seq: ErrorSequence) -> RateFit:
    """Least-squares line through ``(log n, log |value|)``.

    Returns the decay exponent ``-slope`` and the constant ``exp(intercept)``.
    """
    ns, vals = seq.ns, np.abs(seq.values)
    keep = vals > FIT_FLOOR
    if keep.sum() < 4:
        raise InsufficientDataError(
            f"{seq.integrand}: {int(keep.sum())} usable entries, need at least 4")
    x, y = np.log(ns[keep]), np.log(vals[keep])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return RateFit(float(-slope), float(math.exp(intercept)),
                   float(np.max(np.abs(resid))), int(ns[keep][0]), int(ns[keep][-1]))


def envelope_constant(seq: ErrorSequence, p: float, N: int) -> float:
    """Smallest ``L`` with ``|value_n| <= L n^-p`` for every entry with ``n >= N``."""
    window = [(n, v) for n, v in seq.entries if n >= N]
    if not window:
        raise EmptyWindowError(f"{seq.integrand}: no entries with n >= {N}")
    return max(float(n) ** p * abs(v) for n, v in window)


def _window(seq, N):
    return [(n, v) for n, v in seq.entries if n >= N]


def _require(f: Integrand, tags, what):
    if f.class_tag not in tags:
        raise HypothesisError(
            f"{f.name} is {f.class_tag.value}; {what} needs one of "
            f"{', '.join(t.value for t in tags)}")


def _prop1_grid(grid, N):
    grid = _check_grid(grid)
    if len([n for n in grid if n >= N]) < 6:
        raise PreconditionError("need at least 6 grid points with n >= N")
    return grid


def verify_prop1(f: Integrand, grid=DEFAULT_GRID, N: int = DEFAULT_N) -> BoundReport:
    """``|R_n| <= L1 n^-3/2`` for ``n >= N``, with ``L1`` the empirical envelope."""
    _require(f, (ClassTag.P1, ClassTag.P1_ITEM2), "the trapezoid rate bound")
    grid = _prop1_grid(grid, N)
    seq = compute_error_sequence(f, SumScheme.TRAPEZOID_ENDPOINT, grid)
    L1 = envelope_constant(seq, 1.5, N)
    notes = []
    consts = {"L1": L1}
    degenerate = f.coefficient(1) == 0 and f.coefficient(3) == 0
    try:
        fit = fit_rate(ErrorSequence(seq.integrand, seq.scheme, tuple(_window(seq, N))))
        consts["rate"] = fit.exponent
        rate_ok = fit.exponent >= 1.5 - 0.05
    except InsufficientDataError:
        rate_ok = False
        consts["rate"] = None
    if degenerate:
        rate_ok = True
        notes.append("no (1-x)^{1/2} or (1-x)^{3/2} part: rate >= 1.5 satisfied vacuously")
    margins = [L1 * n ** -1.5 - abs(v) for n, v in _window(seq, N)]
    return BoundReport("P1", f.name, rate_ok and min(margins) >= 0, consts, N,
                       grid, margins, notes)


def verify_prop1_item2(f: Integrand, grid=DEFAULT_GRID, N: int = DEFAULT_N) -> BoundReport:
    """``|D_n| <= Lbar n^-1/2`` for ``n >= N``.

    For ``z0 = -1`` the empirical ``Lbar`` is also compared with the constant
    assembled from the symmetrization argument (:func:`proofcheck.lbar_constant`).
    """
    from . import proofcheck

    _require(f, (ClassTag.P1_ITEM2,), "the scaled-difference bound")
    grid = _prop1_grid(grid, N)
    seq = scaled_difference_sequence(f, grid)
    lbar_emp = envelope_constant(seq, 0.5, N)
    consts = {"Lbar_empirical": lbar_emp}
    notes = []
    holds = True
    if f.coefficient(1) == 0:
        # D_n decays at least like n^-3/2 and sinks into rounding noise (~n^2 eps)
        notes.append("no (1-x)^{1/2} part: decay >= 0.5 satisfied vacuously")
        consts["rate"] = None
    else:
        fit = fit_rate(ErrorSequence(seq.integrand, seq.scheme, tuple(_window(seq, N))))
        consts["rate"] = fit.exponent
        holds = fit.exponent >= 0.5 - 0.1
    if f.z0 == -1:
        lbar = proofcheck.lbar_constant(f, N, grid=[n for n in grid if n >= N])
        consts["Lbar_proof"] = lbar
        holds = holds and lbar_emp <= lbar
        bound = lbar
    else:
        notes.append("proof-side constant available only for z0 = -1")
        bound = lbar_emp
    margins = [bound * n ** -0.5 - abs(v) for n, v in _window(seq, N)]
    return BoundReport("P1_ITEM2", f.name, holds and min(margins) >= 0, consts, N,
                       grid, margins, notes)


def verify_prop2(f: Integrand, grid=DEFAULT_GRID, N: int = DEFAULT_N, *,
                 cmax_factor: float = 1.25, cmin_frac: float = 0.5) -> BoundReport:
    """Two-sided bound ``L2* n^-1/2 - l2/n <= integral - left_sum <= L2 n^-1/2``."""
    from . import proofcheck

    _require(f, (ClassTag.P2,), "the left-sum sandwich")
    grid = _check_grid(grid)
    cert = proofcheck.prop2_certificate(f, N, cmax_factor=cmax_factor,
                                        cmin_frac=cmin_frac)
    n_lo = max(N, math.ceil(2 / cert.delta))
    seq = compute_error_sequence(f, SumScheme.LEFT, grid)
    window = _window(seq, n_lo)
    if not window:
        raise EmptyWindowError(f"{f.name}: no grid n >= {n_lo}")
    exact = _exact(f)
    sum_bound = abs(exact) + cert.L2 / math.sqrt(N) + cert.l2
    margins, ok = [], True
    for n, e in window:
        lo = cert.L2star / math.sqrt(n) - cert.l2 / n
        hi = cert.L2 / math.sqrt(n)
        s = exact - e
        margins.append(min(e - lo, hi - e))
        ok = ok and lo <= e <= hi and abs(s) <= sum_bound
    consts = cert.to_dict()
    consts["sum_bound"] = sum_bound
    return BoundReport("P2", f.name, ok and cert.L2star > cert.c1, consts, N,
                       grid, margins, [f"tested n >= {n_lo}"])


def verify_prop3(f: Integrand, grid=DEFAULT_GRID, N: int = DEFAULT_N) -> BoundReport:
    """``|symmetric_sum| <= L3 n^1/2`` with no growth trend in ``n^-1/2 |sum|``."""
    _require(f, (ClassTag.P3_RAW,), "the symmetric-sum growth bound")
    grid = _check_grid(grid)
    seq = compute_error_sequence(f, SumScheme.SYMMETRIC, grid)
    window = _window(seq, N)
    if not window:
        raise EmptyWindowError(f"{f.name}: no grid n >= {N}")
    scaled = np.array([abs(v) / math.sqrt(n) for n, v in window])
    L3 = float(scaled.max())
    ns = np.array([n for n, _ in window], dtype=float)
    keep = scaled > FIT_FLOOR
    slope = None
    if keep.sum() >= 2:
        slope = float(np.polyfit(np.log(ns[keep]), np.log(scaled[keep]), 1)[0])
    holds = slope is None or slope <= 0.05
    margins = [L3 * math.sqrt(n) - abs(v) for n, v in window]
    return BoundReport("P3", f.name, holds, {"L3": L3, "slope": slope}, N, grid, margins)
