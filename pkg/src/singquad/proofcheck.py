"""Computable versions of the objects inside the two error-bound proofs.

Scaled-difference bound (z0 = -1): the integrand is folded onto [0, 1] by
``Phi(x) = F(x) + F(-x)``, the difference ``D_n`` splits into two sums, and
the second one is expanded to third order.  Every identity in that chain is
checked numerically, and the final constant is assembled from empirical
envelope constants.

Left-sum bound: a bracket ``(cmin, cmax, delta)`` around the leading
``(1-x)^-1/2`` behaviour and a total-variation constant ``C`` give the
certificate; the integration-by-parts remainder is split at
``k0 = floor((1 - delta) n)`` and each piece is computed cell by cell.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import legendre
from scipy import optimize

from . import oracle, riemann
from .analysis import DEFAULT_GRID, DEFAULT_N
from .errors import CertificateNotFoundError, HypothesisError, PreconditionError
from .integrand import ClassTag, Integrand, SmoothPart, PowerTerm, eval_derivative, evaluate

EXTENDED = oracle.EXTENDED
_LD = np.longdouble if EXTENDED else float

#: (3 sqrt 2 - 2) / 2, the factor in the lower bound of the tail sum
L2STAR_FACTOR = (3 * math.sqrt(2) - 2) / 2
#: cmin must exceed this multiple of c1
CMIN_LOWER = 2 / (3 * math.sqrt(2) - 2)

DELTA_LADDER = tuple(2.0 ** -j for j in range(1, 21))
K3_GRID_POINTS = 2 ** 16

_GL_NODES, _GL_WEIGHTS = legendre.leggauss(16)


# -- symmetrization --------------------------------------------------------

@dataclass(frozen=True)
class SymmetrizedFunction:
    """``Phi(x) = F(x) + F(-x)`` on ``[0, 1]`` with derivatives to order 3."""

    base: Integrand

    def phi(self, x, order: int = 0):
        x = np.asarray(x)
        if x.dtype.kind != "f":
            x = x.astype(float)
        if order == 0:
            return evaluate(self.base, x) + evaluate(self.base, -x)
        return (eval_derivative(self.base, x, order)
                + (-1) ** order * eval_derivative(self.base, -x, order))

    def weighted(self, x, order: int):
        """``(1-x)**order * Phi^(order)(x)``, finite up to and including x = 1.

        The power terms are folded analytically, ``(1-x)^k d^k/dx^k (1-x)^p``
        being a multiple of ``(1-x)^p``, so no ``0 * inf`` arises at x = 1.
        """
        x = np.asarray(x)
        if x.dtype.kind != "f":
            x = x.astype(float)
        u = 1 - x
        f = self.base
        out = u ** order * f.smooth.derivative(x, order)
        for t in f.terms:
            out = out + (t.coeff * t.derivative_factor(order)) * np.power(u, t.num2 / 2)
        out = out + (-1) ** order * u ** order * eval_derivative(f, -x, order)
        return out[()] if out.ndim == 0 else out

    def smooth_weighted(self, x, order: int):
        """:meth:`weighted` minus its power-law part (smooth on ``[0, 1]``)."""
        u = 1 - x
        f = self.base
        return (u ** order * f.smooth.derivative(x, order)
                + (-1) ** order * u ** order * eval_derivative(f, -x, order))

    def weighted_integrand(self, order: int) -> Integrand:
        """``(1-x)^k Phi^(k)`` as an integrand on ``[0, 1]``, so the trapezoid
        machinery of :mod:`riemann` applies to it directly."""
        f = self.base
        terms = tuple(PowerTerm(t.coeff * t.derivative_factor(order), t.num2)
                      for t in f.terms)
        smooth = SmoothPart(lambda x: self.smooth_weighted(x, order), (), 4)
        return Integrand(f"w{order}[{f.name}]", 0, terms, smooth, ClassTag.P1_ITEM2)


def symmetrize(f: Integrand) -> SymmetrizedFunction:
    if f.z0 != -1:
        raise HypothesisError("symmetrization needs z0 = -1")
    if f.class_tag is not ClassTag.P1_ITEM2 or len(f.smooth.derivatives) < 3:
        raise HypothesisError(
            f"{f.name}: needs the scaled-difference hypotheses and a smooth part"
            " with three derivatives")
    return SymmetrizedFunction(f)


def integrals_IPhi(s: SymmetrizedFunction, tol: float = 1e-13) -> tuple[float, float]:
    """``(integral_0^1 (1-x) Phi', integral_0^1 (1-x)^2 Phi'')``."""
    if tol > 1e-10:
        raise PreconditionError("tol must be <= 1e-10")
    out = []
    for k in (1, 2):
        parts = [oracle.integral_power(t.coeff * t.derivative_factor(k), t.num2 / 2, 0.0)
                 for t in s.base.terms]
        parts.append(oracle.integrate_smooth(lambda x: s.smooth_weighted(x, k), 0.0, 1.0,
                                             max(tol, 1e-14)))
        out.append(math.fsum(parts))
    return out[0], out[1]


# -- the expanded sums ------------------------------------------------------

def sigma_phi(s: SymmetrizedFunction, n: int) -> float:
    """``sum_{k=1}^{n} Phi(k/(n+1)) - Phi((k-1)/n)``."""
    k = np.arange(1, n + 1, dtype=float)
    a = np.asarray(s.phi(k / (n + 1)), dtype=float)
    b = np.asarray(s.phi((k - 1) / n), dtype=float)
    return math.fsum(np.concatenate([a, -b]).tolist())


def _weighted_phi_sum(s, n, order, dtype=float):
    m = n + 1
    k = np.arange(1, n + 1, dtype=dtype)
    x = k / m
    w = (m - k) / m
    return w ** order * s.phi(x, order) / m


def sigma_phi1(s: SymmetrizedFunction, n: int, i_phi1: Optional[float] = None,
               *, path: str = "literal") -> float:
    """Remainder of the first-order weighted sum.

    ``path="literal"`` evaluates the defining expression; ``path="trapezoid"``
    takes the trapezoid error of ``(1-x) Phi'`` at resolution ``n + 1``.
    """
    return _sigma_phik(s, n, 1, i_phi1, path)


def sigma_phi2(s: SymmetrizedFunction, n: int, i_phi2: Optional[float] = None,
               *, path: str = "literal") -> float:
    return _sigma_phik(s, n, 2, i_phi2, path)


def _sigma_phik(s, n, order, i_phik, path):
    if i_phik is None:
        i_phik = integrals_IPhi(s)[order - 1]
    if path == "trapezoid":
        return riemann.error_R(s.weighted_integrand(order), n + 1, i_phik)
    if path != "literal":
        raise ValueError(f"unknown path {path!r}")
    terms = _weighted_phi_sum(s, n, order).tolist()
    terms.append(float(s.phi(0.0, order)) / (2 * (n + 1)))
    return i_phik - math.fsum(terms)


def sigma_phi3_residual(s: SymmetrizedFunction, n: int) -> float:
    """Third-order remainder recovered from the expansion of ``sigma_phi``.

    The mean-value points are never located: the remainder is what is left of
    ``sigma_phi`` after removing the first- and second-order sums, scaled by
    ``6 n^3 / (n+1)``.  Evaluated in extended precision since the scale
    factor amplifies cancellation error by ``~n^2``.
    """
    m = n + 1
    k = np.arange(1, n + 1, dtype=_LD)
    x = k / m
    w = (m - k) / m
    diff = s.phi(x) - s.phi((k - 1) / n)
    first = w * s.phi(x, 1) / n
    second = w ** 2 * s.phi(x, 2) / (2 * n * n)
    bracket = np.sum(diff - first + second, dtype=_LD)
    return float(6 * _LD(n) ** 3 / m * bracket)


# -- identity suite ---------------------------------------------------------

@dataclass
class IdentityCheck:
    identity: str
    lhs: float
    rhs: float
    residual: float
    holds: bool


@dataclass
class IdentityReport:
    integrand: str
    n: int
    tol: float
    checks: list
    holds: bool

    @property
    def failed(self) -> list[str]:
        return [c.identity for c in self.checks if not c.holds]

    def to_dict(self) -> dict:
        return {"integrand": self.integrand, "n": self.n, "tol": self.tol,
                "holds": bool(self.holds),
                "checks": [asdict(c) for c in self.checks]}


def _check(name, lhs, rhs, tol):
    res = abs(lhs - rhs)
    return IdentityCheck(name, float(lhs), float(rhs), float(res),
                         bool(res <= tol * max(1.0, abs(lhs), abs(rhs))))


def check_item2_identities(f: Integrand, n: int, tol: float = 1e-9) -> IdentityReport:
    """Check the decomposition of ``D_n`` and the integral relations it uses.

    (a) ``D_n = sigma1 + sigma2`` with ``sigma1 = (n+1) R_{n+1}`` and
        ``sigma2 = n (I_F - Phi(0) - sigma_phi)``;
    (b) ``I_F = I_Phi1 + Phi(0)``;
    (c) ``I_Phi2 = 2 I_Phi1 - Phi'(0)``;
    (d) ``sigma2`` equals its closed form in the first-, second- and
        third-order remainders.
    """
    s = symmetrize(f)
    exact = oracle.exact_integral(f).value
    i1, i2 = integrals_IPhi(s)
    phi0, dphi0, ddphi0 = (float(s.phi(0.0, k)) for k in range(3))
    r_n1 = riemann.error_R(f, n + 1, exact)
    r_n = riemann.error_R(f, n, exact)
    d_n = (n + 1) ** 2 * r_n1 - n ** 2 * r_n
    sig1 = (n + 1) * r_n1
    sig2 = n * (exact - phi0 - sigma_phi(s, n))
    s1 = sigma_phi1(s, n, i1)
    s2 = sigma_phi2(s, n, i2)
    s3 = sigma_phi3_residual(s, n)
    closed = math.fsum([i1 / n, -ddphi0 / (4 * n), -dphi0 / (2 * n),
                        (n + 1) * s1, -(n + 1) / (2 * n) * s2,
                        -(n + 1) / (6 * n * n) * s3])
    checks = [
        _check("(a) D_n = sigma1 + sigma2", d_n, sig1 + sig2, tol),
        _check("(b) I_F = I_Phi1 + Phi(0)", exact, i1 + phi0, tol),
        _check("(c) I_Phi2 = 2 I_Phi1 - Phi'(0)", i2, 2 * i1 - dphi0, tol),
        _check("(d) sigma2 closed form", sig2, closed, tol),
    ]
    return IdentityReport(f.name, n, tol, checks, all(c.holds for c in checks))


# -- constants for the scaled-difference bound -------------------------------

@dataclass
class ProofConstants:
    N: int
    grid: list
    L1: float
    K_phi1: float
    K_phi2: float
    K_phi3: float
    I_phi1: float
    I_phi2: float
    dphi0: float
    ddphi0: float
    lbar: float

    def to_dict(self) -> dict:
        return asdict(self)


def k_phi3(s: SymmetrizedFunction, points: int = K3_GRID_POINTS) -> float:
    """``sup |(1-x)^3 Phi'''|`` over a uniform grid of ``[0, 1]``.

    The power-law part vanishes at x = 1 for every admitted exponent, so the
    closed grid covers the endpoint limit.
    """
    x = np.arange(points + 1, dtype=float) / points
    return float(np.max(np.abs(s.weighted(x, 3))))


def _verification_grid(N, grid):
    if grid is None:
        grid = [n for n in DEFAULT_GRID if n >= N] or [N]
    grid = [int(n) for n in grid if n >= N]
    if not grid:
        raise PreconditionError(f"no verification n >= {N}")
    return grid


def proof_constants(f: Integrand, N: int = DEFAULT_N, grid=None) -> ProofConstants:
    """Assemble the scaled-difference constant from empirical envelopes.

    ``L1`` covers ``n^{3/2} |R_n|`` at every grid ``n`` and ``n + 1``;
    ``K_phi1``, ``K_phi2`` cover ``(n+1)^{3/2}`` times the first- and
    second-order remainders; ``K_phi3`` is a dense-grid supremum.
    """
    s = symmetrize(f)
    grid = _verification_grid(N, grid)
    exact = oracle.exact_integral(f).value
    i1, i2 = integrals_IPhi(s)
    L1 = max(m ** 1.5 * abs(riemann.error_R(f, m, exact))
             for n in grid for m in (n, n + 1))
    K1 = max((n + 1) ** 1.5 * abs(sigma_phi1(s, n, i1)) for n in grid)
    K2 = max((n + 1) ** 1.5 * abs(sigma_phi2(s, n, i2)) for n in grid)
    K3 = k_phi3(s)
    dphi0, ddphi0 = float(s.phi(0.0, 1)), float(s.phi(0.0, 2))
    lbar = (L1 + K1 + (abs(i1) + abs(ddphi0) / 4 + abs(dphi0) / 2 + K3 / 3) / math.sqrt(N)
            + K2 / N)
    return ProofConstants(N, grid, L1, K1, K2, K3, i1, i2, dphi0, ddphi0, lbar)


def lbar_constant(f: Integrand, N: int = DEFAULT_N, grid=None) -> float:
    return proof_constants(f, N, grid).lbar


# -- left-sum certificate ----------------------------------------------------

@dataclass
class Prop2Certificate:
    c1: float
    delta: float
    C: float
    cmax: float
    cmin: float
    L2: float
    L2star: float
    l2: float
    N: int

    def k0(self, n: int) -> int:
        return math.floor((1 - self.delta) * n)

    def to_dict(self) -> dict:
        return {"c1": self.c1, "delta": self.delta, "C": self.C, "cmax": self.cmax,
                "cmin": self.cmin, "L2": self.L2, "L2star": self.L2star, "l2": self.l2}


def _require_p2(f):
    if f.class_tag is not ClassTag.P2:
        raise HypothesisError(f"{f.name} is not of the left-sum class")


def _check_bracket_params(c1, cmax, cmin):
    if not cmax > c1:
        raise PreconditionError(f"cmax = {cmax} must exceed c1 = {c1}")
    if not CMIN_LOWER * c1 < cmin < c1:
        raise PreconditionError(
            f"cmin = {cmin} must lie in ({CMIN_LOWER * c1}, {c1})")


def _sup_on_tail(smooth: SmoothPart, order: int, ut: float) -> float:
    """Upper bound of ``|s^(order)|`` on ``[1 - ut, 1]``."""
    if smooth.is_polynomial:
        p = Polynomial(smooth.coeffs).deriv(order) if order else Polynomial(smooth.coeffs)
        q = p(Polynomial([1.0, -1.0]))  # coefficients in u = 1 - x
        return float(sum(abs(a) * ut ** i for i, a in enumerate(q.coef)))
    x = 1 - np.linspace(0.0, ut, 1025)
    # sampled, not rigorous: doubled as a safety margin
    return 2.0 * float(np.max(np.abs(smooth.derivative(x, order))))


def bracket_values(f: Integrand, x):
    """``(sqrt(1-x) F(x), 2 (1-x)^{3/2} F'(x))``; both must lie in ``[cmin, cmax]``."""
    u = 1 - np.asarray(x, dtype=float)
    return np.sqrt(u) * evaluate(f, x), 2 * u ** 1.5 * eval_derivative(f, x, 1)


def find_delta(f: Integrand, cmax: float, cmin: float) -> float:
    """Largest dyadic ``delta`` on which ``f`` is bracketed by ``cmin, cmax``.

    The brackets are checked at 1024 points of ``[1-delta, 1-delta/1024]``;
    on the remaining tail the bracket functions are bounded analytically by
    ``c1 -+ (|c2| u + sup|smooth| sqrt(u))`` and
    ``c1 -+ (|c2| u + 2 sup|smooth'| u^{3/2})``.
    """
    _require_p2(f)
    c1, c2 = f.coefficient(-1), f.coefficient(1)
    _check_bracket_params(c1, cmax, cmin)
    for delta in DELTA_LADDER:
        u = np.linspace(delta, delta * 2.0 ** -10, 1024)
        g0, g1 = bracket_values(f, 1 - u)
        if not (np.all((cmin <= g0) & (g0 <= cmax)) and np.all((cmin <= g1) & (g1 <= cmax))):
            continue
        ut = delta * 2.0 ** -10
        t0 = abs(c2) * ut + _sup_on_tail(f.smooth, 0, ut) * math.sqrt(ut)
        t1 = abs(c2) * ut + 2 * _sup_on_tail(f.smooth, 1, ut) * ut ** 1.5
        if all(c1 - t >= cmin and c1 + t <= cmax for t in (t0, t1)):
            return delta
    raise CertificateNotFoundError(f"{f.name}: no delta in the dyadic ladder brackets F")


def _abs_derivative_integral(f: Integrand, a: float, b: float, tol: float) -> float:
    """``integral_a^b |F'|`` on a region where ``F'`` is bounded, split at sign changes."""
    def d1(x):
        return eval_derivative(f, x, 1)

    xs = np.linspace(a, b, 1025)
    ys = d1(xs)
    cuts = [a]
    for i in range(len(xs) - 1):
        if ys[i] == 0 and i > 0:
            cuts.append(float(xs[i]))
        elif ys[i] * ys[i + 1] < 0:
            cuts.append(optimize.brentq(d1, xs[i], xs[i + 1], xtol=1e-15))
    cuts.append(b)
    return math.fsum(abs(oracle.integrate_smooth(d1, lo, hi, tol))
                     for lo, hi in zip(cuts, cuts[1:]) if hi > lo)


def find_C(f: Integrand, delta: float, tol: float = 1e-12) -> float:
    """Smallest grid-certified ``C >= 0`` with
    ``integral_{z0}^{beta} |F'| <= F(beta) + C`` for ``beta`` in ``[1-delta, 1)``.

    On ``[1-delta, 1)`` the bracket makes ``F'`` positive, so
    ``integral_{1-delta}^{beta} |F'| = F(beta) - F(1-delta)`` and only the
    bounded region ``[z0, 1-delta]`` needs quadrature.
    """
    _require_p2(f)
    b = 1 - delta
    head = _abs_derivative_integral(f, float(f.z0), b, tol)
    fb = float(evaluate(f, b))
    gaps = []
    for beta in np.linspace(b, 1 - 1e-6, 256):
        fbeta = float(evaluate(f, beta))
        gaps.append(head + (fbeta - fb) - fbeta)
    return max(0.0, max(gaps))


@dataclass
class Prop2Decomposition:
    n: int
    k0: int
    sigma1: float
    sigma2: float
    sigma3: float
    relative_residual: float
    sigma3_lower: float
    sigma2_lower: float
    sigma3_terms_positive: bool
    holds: bool

    def to_dict(self) -> dict:
        return asdict(self)


def _cell_integrals(f: Integrand, a: np.ndarray, b: np.ndarray, w: np.ndarray):
    """``integral_a^b (w - x) F'(x) dx`` per cell (16-point Gauss-Legendre)."""
    if a.size == 0:
        return np.zeros(0)
    half = (b - a) / 2
    mid = (a + b) / 2
    x = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    vals = (w[:, None] - x) * eval_derivative(f, x, 1)
    return half * (vals @ _GL_WEIGHTS)


def _last_cell(f: Integrand, n: int) -> float:
    """``integral_{1-1/n}^1 (1-x) F'(x) dx``: power rule for the singular terms."""
    h = 1.0 / n
    parts = [-t.coeff * (t.num2 / 2) * h ** (t.num2 / 2 + 1) / (t.num2 / 2 + 1)
             for t in f.terms]
    x = 1 - h / 2 + (h / 2) * _GL_NODES
    parts.append(float((h / 2) * np.dot((1 - x) * f.smooth.derivative(x, 1), _GL_WEIGHTS)))
    return math.fsum(parts)


def prop2_decomposition(f: Integrand, n: int, cert: Prop2Certificate,
                        rtol: float = 1e-10) -> Prop2Decomposition:
    """Split the left-sum error into the bulk part and the near-singular tail.

    ``sigma1`` is ``integral - left_sum``.  ``sigma2`` and ``sigma3`` are
    summed cell by cell from ``integral (w_k - x) F'(x) dx``, cut at
    ``1 - delta``, so ``sigma1 = sigma2 + sigma3`` is a genuine check of the
    integration-by-parts identity.
    """
    _require_p2(f)
    if n < 2 / cert.delta:
        raise PreconditionError(f"n = {n} < 2/delta = {2 / cert.delta}")
    exact = oracle.exact_integral(f).value
    sigma1 = exact - riemann.left_sum(f, n)
    k0 = cert.k0(n)
    cut = 1 - cert.delta
    ks = np.arange(f.z0 * n, n, dtype=float)
    lo, hi = ks / n, (ks + 1) / n
    bulk = ks < k0
    part2 = _cell_integrals(f, lo[bulk], hi[bulk], hi[bulk]).tolist()
    part3 = []
    w0 = (k0 + 1) / n
    if cut > k0 / n:
        part2 += _cell_integrals(f, np.array([k0 / n]), np.array([cut]), np.array([w0])).tolist()
    part3 += _cell_integrals(f, np.array([cut]), np.array([w0]), np.array([w0])).tolist()
    tail = (ks > k0) & (ks < n - 1)
    part3 += _cell_integrals(f, lo[tail], hi[tail], hi[tail]).tolist()
    part3.append(_last_cell(f, n))
    sigma2, sigma3 = math.fsum(part2), math.fsum(part3)
    resid = abs(sigma1 - (sigma2 + sigma3)) / max(abs(sigma1), 1e-300)
    lower3 = L2STAR_FACTOR * cert.cmin / math.sqrt(n)
    lower2 = -cert.l2 / n
    positive = min(part3) > 0
    holds = resid <= rtol and sigma3 >= lower3 and sigma2 >= lower2 and positive
    return Prop2Decomposition(n, k0, sigma1, sigma2, sigma3, resid, lower3, lower2,
                              positive, holds)


def prop2_certificate(f: Integrand, N: int = DEFAULT_N, *, cmax_factor: float = 1.25,
                      cmin_frac: float = 0.5) -> Prop2Certificate:
    """Constants witnessing the two-sided left-sum bound for ``n >= N``.

    ``cmax = cmax_factor * c1``; ``cmin`` sits at fraction ``cmin_frac`` of
    the admissible interval ``(CMIN_LOWER c1, c1)``.
    """
    _require_p2(f)
    c1 = f.coefficient(-1)
    lo = CMIN_LOWER * c1
    cmax = cmax_factor * c1
    cmin = lo + cmin_frac * (c1 - lo)
    _check_bracket_params(c1, cmax, cmin)
    delta = find_delta(f, cmax, cmin)
    C = find_C(f, delta)
    l2 = float(evaluate(f, 1 - delta)) + C
    cert = Prop2Certificate(c1, delta, C, cmax, cmin, 2 * cmax + C / math.sqrt(N),
                            L2STAR_FACTOR * cmin, l2, N)
    n0 = max(N, math.ceil(2 / delta))
    dec = prop2_decomposition(f, n0, cert)
    if not dec.holds:
        raise CertificateNotFoundError(
            f"{f.name}: certificate fails its own decomposition check at n = {n0}")
    return cert
