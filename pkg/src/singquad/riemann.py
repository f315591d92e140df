"""Uniform-grid Riemann sums with the index conventions of each estimate.

All sums sample at ``k / n`` (one division per node, no running increments)
and accumulate with :func:`math.fsum`, which returns the correctly rounded
sum of the samples independently of their number.
"""

from __future__ import annotations

import enum
import math

import numpy as np

from .errors import PreconditionError, SchemeMismatchError
from .integrand import Integrand

#: default cap on n; pass ``n_max`` to lift it
N_MAX = 2 ** 22


class SumScheme(str, enum.Enum):
    TRAPEZOID_ENDPOINT = "TRAPEZOID_ENDPOINT"
    LEFT = "LEFT"
    SYMMETRIC = "SYMMETRIC"


def _check_n(n, n_max):
    if int(n) != n or n < 1:
        raise PreconditionError(f"n must be a positive integer, got {n!r}")
    if n > n_max:
        raise PreconditionError(f"n = {n} exceeds the cap n_max = {n_max}")
    return int(n)


def _fsum(values) -> float:
    return math.fsum(np.asarray(values, dtype=float).ravel().tolist())


def nodes(k_start: int, k_stop: int, n: int) -> np.ndarray:
    """Grid points ``k / n`` for ``k_start <= k < k_stop``."""
    return np.arange(k_start, k_stop, dtype=float) / n


def trapezoid_sum(f: Integrand, n: int, *, n_max: int = N_MAX) -> float:
    """Endpoint-weighted sum: half weight at ``z0`` and ``1``, full weight inside."""
    n = _check_n(n, n_max)
    if f.has_inverse_sqrt or f.is_raw:
        raise SchemeMismatchError(
            f"{f.name}: trapezoid sum needs a finite value at x = 1")
    z0 = f.z0
    ends = [0.5 * f(float(z0)), 0.5 * f(1.0)]
    inner = f(nodes(z0 * n + 1, n, n))
    return math.fsum(ends + np.asarray(inner, dtype=float).tolist()) / n


def left_sum(f: Integrand, n: int, *, n_max: int = N_MAX) -> float:
    """``sum_{k = z0 n}^{n-1} f(k/n) / n``; x = 1 is never sampled."""
    n = _check_n(n, n_max)
    return _fsum(f(nodes(f.z0 * n, n, n))) / n


def symmetric_sum(f: Integrand, n: int, *, n_max: int = N_MAX) -> float:
    """``sum_{|k| <= n-1} f(k/n) / n`` on ``[-1, 1)``."""
    n = _check_n(n, n_max)
    if f.z0 != -1:
        raise SchemeMismatchError("symmetric sum is defined only for z0 = -1")
    return _fsum(f(nodes(-n + 1, n, n))) / n


_SUMS = {
    SumScheme.TRAPEZOID_ENDPOINT: trapezoid_sum,
    SumScheme.LEFT: left_sum,
    SumScheme.SYMMETRIC: symmetric_sum,
}


def scheme_sum(f: Integrand, n: int, scheme: SumScheme, **kw) -> float:
    return _SUMS[SumScheme(scheme)](f, n, **kw)


def error_R(f: Integrand, n: int, exact: float, **kw) -> float:
    """``exact - trapezoid_sum(f, n)``."""
    return exact - trapezoid_sum(f, n, **kw)


def scaled_difference(f: Integrand, n: int, exact: float, **kw) -> float:
    """``(n+1)**2 R_{n+1} - n**2 R_n``."""
    return ((n + 1) ** 2 * error_R(f, n + 1, exact, **kw)
            - n ** 2 * error_R(f, n, exact, **kw))
