"""
Test statistics on uniform order statistics.

Each family has a batched kernel over a (replicates, n) matrix of order
statistics u and their complements v = 1 - u, returning the statistic, the
location of its extremum and the order-statistic index; the public stat_*
functions wrap the kernels for a single sample. Divergences of points above
1/2 are evaluated on the reflected pair (1 - s, v), using K(s, t) =
K(1 - s, 1 - t) and C(t) = C(1 - t), so both tails keep full precision. On
ties the smallest candidate index wins.
"""

import logging
import math
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from lilbands.core.special_functions import _beta_tails, _kl, _penalty_sum
from lilbands.exceptions import DomainError, SampleValidationError
from lilbands.models.enums import StatisticFamily
from lilbands.models.sample import UniformOrderStats
from lilbands.models.statistic import PenaltySpec, StatisticResult

logger = logging.getLogger(__name__)

Kernel = Callable[[np.ndarray, np.ndarray, float], Tuple[np.ndarray, np.ndarray, np.ndarray]]


def _interleave(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    reps, n = left.shape
    out = np.empty((reps, 2 * n))
    out[:, 0::2] = left
    out[:, 1::2] = right
    return out


def _step_divergences(u: np.ndarray, v: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    n K((i-1)/n, U_{n:i}) and n K(i/n, U_{n:i}), the ECDF just left of and at
    every point, plus the folded argument min(U, 1 - U) for the penalties
    """
    n = u.shape[1]
    flip = u > 0.5
    t = np.where(flip, v, u)
    right = np.arange(1, n + 1)
    left = right - 1
    s_right = np.where(flip, n - right, right) / n
    s_left = np.where(flip, n - left, left) / n
    return n * _kl(s_left, t), n * _kl(s_right, t), t


def _orderstat_divergences(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """(n+1) K(t_nj, U_{n:j}) with t_nj = j/(n+1)"""
    n = u.shape[1]
    flip = u > 0.5
    j = np.arange(1, n + 1)
    t = np.where(flip, n + 1 - j, j) / (n + 1)
    return (n + 1) * _kl(t, np.where(flip, v, u))


def _new_sup(u: np.ndarray, v: np.ndarray, nu: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    reps, n = u.shape
    left, right, t = _step_divergences(u, v)
    pen = _penalty_sum(t, nu)
    candidates = np.empty((reps, 2 * n + 1))
    candidates[:, : 2 * n] = _interleave(left - pen, right - pen)
    # ECDF at t = 1/2 is right-continuous; C(1/2) = D(1/2) = 0
    g_half = np.count_nonzero(u <= 0.5, axis=1) / n
    candidates[:, 2 * n] = n * _kl(g_half, 0.5)

    best = np.argmax(candidates, axis=1)
    rows = np.arange(reps)
    values = candidates[rows, best]
    center = best == 2 * n
    index = np.where(center, 0, best // 2 + 1)
    location = np.where(center, 0.5, u[rows, np.minimum(best // 2, n - 1)])
    return values, location, index


def _new_orderstat(u: np.ndarray, v: np.ndarray, nu: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    reps, n = u.shape
    t = np.arange(1, n + 1) / (n + 1)
    terms = _orderstat_divergences(u, v) - _penalty_sum(t, nu)
    best = np.argmax(terms, axis=1)
    return terms[np.arange(reps), best], t[best], best + 1


def _orderstat_kl(u: np.ndarray, v: np.ndarray, nu: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    reps, n = u.shape
    t = np.arange(1, n + 1) / (n + 1)
    terms = _orderstat_divergences(u, v)
    best = np.argmax(terms, axis=1)
    return terms[np.arange(reps), best], t[best], best + 1


def _berk_jones(u: np.ndarray, v: np.ndarray, nu: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    reps = u.shape[0]
    left, right, _ = _step_divergences(u, v)
    candidates = _interleave(left, right)
    best = np.argmax(candidates, axis=1)
    rows = np.arange(reps)
    return candidates[rows, best], u[rows, best // 2], best // 2 + 1


def _ks(u: np.ndarray, v: np.ndarray, nu: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    reps, n = u.shape
    right = np.arange(1, n + 1) / n
    left = np.arange(n) / n
    candidates = math.sqrt(n) * _interleave(np.abs(left - u), np.abs(right - u))
    best = np.argmax(candidates, axis=1)
    rows = np.arange(reps)
    return candidates[rows, best], u[rows, best // 2], best // 2 + 1


def _union_intersection(u: np.ndarray, v: np.ndarray, nu: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    reps, n = u.shape
    flip = u > 0.5
    i = np.arange(1, n + 1, dtype=float)
    # the upper tail of Beta(i, n+1-i) at u is the lower tail of Beta(n+1-i, i) at 1 - u
    lower, upper = _beta_tails(np.where(flip, n + 1.0 - i, i), np.where(flip, i, n + 1.0 - i), np.where(flip, v, u))
    pvalues = np.minimum(lower, upper)
    best = np.argmin(pvalues, axis=1)
    rows = np.arange(reps)
    return pvalues[rows, best], u[rows, best], best + 1


_KERNELS: Dict[StatisticFamily, Kernel] = {
    StatisticFamily.NEW_SUP: _new_sup,
    StatisticFamily.NEW_ORDERSTAT: _new_orderstat,
    StatisticFamily.BERK_JONES: _berk_jones,
    StatisticFamily.KS: _ks,
    StatisticFamily.UNION_INTERSECTION: _union_intersection,
    StatisticFamily.ORDERSTAT_KL: _orderstat_kl,
}


def _kernel(family: StatisticFamily) -> Kernel:
    try:
        return _KERNELS[family]
    except KeyError:
        raise DomainError("batch_statistic", "family", family.value, "a finite-sample statistic family") from None


def batch_statistic(
    family: StatisticFamily,
    u_matrix: np.ndarray,
    nu: float = 0.0,
    complements: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Statistic of every row of a (replicates, n) matrix of uniform order
    statistics; `complements` holds 1 - u from an upper-tail computation
    and defaults to 1 - u_matrix
    """
    u = np.atleast_2d(np.asarray(u_matrix, dtype=float))
    v = 1.0 - u if complements is None else np.atleast_2d(np.asarray(complements, dtype=float))
    values, _, _ = _kernel(family)(u, v, nu)
    return values


def _rows_of(u: UniformOrderStats) -> Tuple[np.ndarray, np.ndarray]:
    values = np.asarray(u.values, dtype=float)
    if not np.all(np.isfinite(values)):
        raise SampleValidationError("order statistics must be finite")
    if np.any(values <= 0.0) or np.any(values >= 1.0):
        raise SampleValidationError("order statistics at exactly 0 or 1 are not allowed")
    if np.any(np.diff(values) < 0.0):
        raise SampleValidationError("order statistics must be sorted ascending")
    complements = np.asarray(u.upper_tail, dtype=float)
    if not np.all((complements > 0.0) & (complements <= 1.0)):
        raise SampleValidationError("complements 1 - U must lie in (0, 1]")
    return values[np.newaxis, :], complements[np.newaxis, :]


def _single(family: StatisticFamily, u: UniformOrderStats, nu: float) -> StatisticResult:
    values, location, index = _kernel(family)(*_rows_of(u), nu)
    return StatisticResult(
        value=float(values[0]),
        argmax_location=float(location[0]),
        argmax_index=int(index[0]),
        family=family,
    )


def stat_new_sup(u: UniformOrderStats, spec: PenaltySpec) -> StatisticResult:
    """
    sup_t (n K(G_n(t), t) - C(t) - nu D(t)) as the maximum of 2n + 1 terms:
    the ECDF value at and just left of every U_{n:i}, and t = 1/2.
    argmax_index is i for a data term and 0 for the t = 1/2 term. Points
    above 1/2 use u.upper_tail, so pass `complements` for transformed data
    far in the upper tail.
    """
    return _single(StatisticFamily.NEW_SUP, u, spec.nu)


def stat_new_orderstat(u: UniformOrderStats, spec: PenaltySpec) -> StatisticResult:
    """max_j ((n+1) K(t_nj, U_{n:j}) - C(t_nj) - nu D(t_nj)); argmax_location is t_nj"""
    return _single(StatisticFamily.NEW_ORDERSTAT, u, spec.nu)


def stat_berk_jones(u: UniformOrderStats) -> StatisticResult:
    """n sup_t K(G_n(t), t), attained at one of the 2n ECDF step ends"""
    return _single(StatisticFamily.BERK_JONES, u, 0.0)


def stat_ks(u: UniformOrderStats) -> StatisticResult:
    return _single(StatisticFamily.KS, u, 0.0)


def stat_union_intersection(u: UniformOrderStats) -> StatisticResult:
    """min_i min(B_ni(U_{n:i}), 1 - B_ni(U_{n:i})) with B_ni = Beta(i, n + 1 - i); small is extreme"""
    return _single(StatisticFamily.UNION_INTERSECTION, u, 0.0)


def stat_orderstat_kl(u: UniformOrderStats) -> StatisticResult:
    """max_j (n+1) K(t_nj, U_{n:j}), the unpenalized order-statistic divergence"""
    return _single(StatisticFamily.ORDERSTAT_KL, u, 0.0)


def compute_statistic(family: StatisticFamily, u: UniformOrderStats, spec: PenaltySpec) -> StatisticResult:
    return _single(family, u, spec.nu if family.uses_nu else 0.0)


def surrogate_pvalues(u: UniformOrderStats) -> np.ndarray:
    """exp(-(n+1) K(t_ni, U_{n:i})) per index, a proxy for the two-sided beta p-values"""
    return np.exp(-_orderstat_divergences(*_rows_of(u))[0])
