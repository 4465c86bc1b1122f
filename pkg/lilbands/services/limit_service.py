from functools import partial
from typing import Callable, Optional, Tuple
import logging
import math

import numpy as np
from scipy import special, stats

from lilbands.core.sampling import uniform_order_stats_matrix
from lilbands.core.special_functions import _kl, _penalty_sum
from lilbands.exceptions import ConvergenceError, DomainError
from lilbands.models.enums import StatisticFamily, TailProcess
from lilbands.models.limit import (
    BridgePath,
    ExponentialTailFit,
    LimitReport,
    TailBoundParams,
    TailCheckResult,
    TailCheckRow,
)
from lilbands.models.quantile_table import QuantileTable
from lilbands.models.sample import RngKey
from lilbands.models.statistic import PenaltySpec, StatisticResult
from lilbands.services.monte_carlo import MonteCarloRunner
from lilbands.services.quantile_service import MIN_REPS, empirical_quantile

logger = logging.getLogger(__name__)

MIN_GRID = 3
WINDOW_GRID = 2000
DEFAULT_TAIL_N = 200
UCL_LEVEL = 0.99


def logit_grid(m: int) -> np.ndarray:
    """m points t = l(x), x equispaced on [-log(4m), log(4m)]"""
    if m < MIN_GRID:
        raise DomainError("logit_grid", "m", m, f">= {MIN_GRID}")
    half_width = math.log(4.0 * m)
    return special.expit(np.linspace(-half_width, half_width, m))


def _bridge_increments(t: np.ndarray) -> np.ndarray:
    return np.sqrt(np.diff(t / (1.0 - t), prepend=0.0))


def _bridge_path(t: np.ndarray, steps: np.ndarray, seed: int, stream: int) -> np.ndarray:
    # U(t) = (1 - t) W(t / (1 - t)), W built from independent increments
    z = RngKey(seed=seed, stream_index=stream).generator().standard_normal(t.size)
    return (1.0 - t) * np.cumsum(steps * z)


def _bridge_rows(t: np.ndarray, seed: int, start: int, stop: int) -> np.ndarray:
    steps = _bridge_increments(t)
    out = np.empty((stop - start, t.size))
    for row, stream in enumerate(range(start, stop)):
        out[row] = _bridge_path(t, steps, seed, stream)
    return out


def _limit_terms(t: np.ndarray, values: np.ndarray, nu: float) -> np.ndarray:
    return np.square(values) / (2.0 * t * (1.0 - t)) - _penalty_sum(t, nu)


def _reduce_paths(
    m: int, nu: float, seed: int, start: int, stop: int, reduce: Callable[[np.ndarray], float]
) -> np.ndarray:
    # one path of length m in memory at a time
    t = logit_grid(m)
    steps = _bridge_increments(t)
    penalty = _penalty_sum(t, nu)
    scale = 2.0 * t * (1.0 - t)
    out = np.empty(stop - start)
    for row, stream in enumerate(range(start, stop)):
        path = _bridge_path(t, steps, seed, stream)
        out[row] = reduce(np.square(path) / scale - penalty)
    return out


def limit_chunk(m: int, nu: float, seed: int, start: int, stop: int) -> np.ndarray:
    """Grid supremum T_nu for paths start..stop-1"""
    return _reduce_paths(m, nu, seed, start, stop, np.max)


def argmax_chunk(m: int, nu: float, seed: int, start: int, stop: int) -> np.ndarray:
    return _reduce_paths(m, nu, seed, start, stop, np.argmax).astype(int)


def _window(params: TailBoundParams) -> Tuple[float, float]:
    return float(special.expit(params.a)), float(special.expit(params.a + params.c))


def bridge_tail_chunk(params: TailBoundParams, seed: int, start: int, stop: int) -> np.ndarray:
    """sup over the window of U(t)^2 / (2t(1-t))"""
    t = special.expit(np.linspace(params.a, params.a + params.c, WINDOW_GRID))
    paths = _bridge_rows(t, seed, start, stop)
    return np.max(np.square(paths) / (2.0 * t * (1.0 - t)), axis=1)


def ep_sup_tail_chunk(params: TailBoundParams, n: int, seed: int, start: int, stop: int) -> np.ndarray:
    """sup over [t1, t2] of n K(G_n(t), t): window ends plus both step ends of every U_{n:i} inside"""
    t1, t2 = _window(params)
    u = uniform_order_stats_matrix(n, seed, start, stop)
    g1 = np.count_nonzero(u <= t1, axis=1) / n
    g2 = np.count_nonzero(u <= t2, axis=1) / n
    best = np.maximum(n * _kl(g1, t1), n * _kl(g2, t2))
    inside = (u > t1) & (u <= t2)
    right = np.arange(1, n + 1) / n
    left = np.arange(n) / n
    terms = np.maximum(n * _kl(right, u), n * _kl(left, u))
    terms = np.where(inside, terms, -np.inf)
    return np.maximum(best, np.max(terms, axis=1))


def ep_orderstat_tail_chunk(params: TailBoundParams, n: int, seed: int, start: int, stop: int) -> np.ndarray:
    """max over t_ni in [t1, t2] of (n+1) K(t_ni, U_{n:i}); 0 when no grid point falls in the window"""
    t1, t2 = _window(params)
    t = np.arange(1, n + 1) / (n + 1)
    inside = (t >= t1) & (t <= t2)
    u = uniform_order_stats_matrix(n, seed, start, stop)
    if not np.any(inside):
        return np.zeros(stop - start)
    return np.max((n + 1) * _kl(t[inside], u[:, inside]), axis=1)


def clopper_pearson_upper(k: int, reps: int, level: float = UCL_LEVEL) -> float:
    """One-sided upper confidence limit for a binomial proportion"""
    if k >= reps:
        return 1.0
    return float(stats.beta.ppf(level, k + 1, reps - k))


class LimitService:
    """Brownian bridge limit of the penalized statistics and sub-exponential tail checks"""

    def __init__(self, runner: Optional[MonteCarloRunner] = None):
        self.runner = runner or MonteCarloRunner()

    def simulate_bridge(self, m: int, key: RngKey) -> BridgePath:
        t = logit_grid(m)
        values = _bridge_rows(t, key.seed, key.stream_index, key.stream_index + 1)[0]
        return BridgePath(grid=t, values=values)

    def stat_limit(self, path: BridgePath, spec: PenaltySpec) -> StatisticResult:
        """Grid maximum of U(t)^2 / (2t(1-t)) - C(t) - nu D(t); argmax_index is the grid index"""
        terms = _limit_terms(path.grid, path.values, spec.nu)
        k = int(np.argmax(terms))
        return StatisticResult(
            value=float(terms[k]),
            argmax_location=float(path.grid[k]),
            argmax_index=k,
            family=StatisticFamily.LIMIT,
        )

    def sample_limit_statistic(self, spec: PenaltySpec, m: int, reps: int, seed: int) -> np.ndarray:
        logit_grid(m)
        return self.runner.run(partial(limit_chunk, m, spec.nu, seed), reps)

    def estimate_limit_quantile(self, spec: PenaltySpec, alpha: float, m: int, reps: int, seed: int) -> QuantileTable:
        """(1 - alpha)-quantile of grid T_nu; stored with family LIMIT and n = m"""
        if reps < MIN_REPS:
            raise DomainError("estimate_limit_quantile", "reps", reps, f">= {MIN_REPS}")
        if not 0.0 < alpha < 1.0:
            raise DomainError("estimate_limit_quantile", "alpha", alpha, "(0, 1)")
        logger.info("Estimating limit quantile: nu=%s alpha=%s m=%d reps=%d seed=%d", spec.nu, alpha, m, reps, seed)
        samples = self.sample_limit_statistic(spec, m, reps, seed)
        kappa, std_err = empirical_quantile(samples, alpha)
        return QuantileTable(
            family=StatisticFamily.LIMIT, n=m, nu=spec.nu, alpha=alpha, reps=reps, seed=seed, kappa=kappa, std_err=std_err
        )

    def limit_report(self, spec: PenaltySpec, alpha: float, m: int, reps: int, seed: int) -> LimitReport:
        """Estimates at m and 2m with the same streams; their difference is the grid sensitivity"""
        table = self.estimate_limit_quantile(spec, alpha, m, reps, seed)
        doubled = self.estimate_limit_quantile(spec, alpha, 2 * m, reps, seed)
        sensitivity = doubled.kappa - table.kappa
        logger.info("Limit kappa %.5g at m=%d, %.5g at m=%d", table.kappa, m, doubled.kappa, 2 * m)
        return LimitReport(table=table, kappa_2m=doubled.kappa, std_err_2m=doubled.std_err, sensitivity=sensitivity)

    def tail_check(
        self,
        process: TailProcess,
        params: TailBoundParams,
        reps: int,
        seed: int,
        n: int = DEFAULT_TAIL_N,
    ) -> TailCheckResult:
        """
        Exceedance frequency of the window supremum for every eta, with a
        99% one-sided Clopper-Pearson upper limit compared against
        M exp(-exp(-c) eta).
        """
        if process is TailProcess.BRIDGE_SQ:
            fn = partial(bridge_tail_chunk, params, seed)
            size = None
        elif process is TailProcess.EP_SUP:
            fn = partial(ep_sup_tail_chunk, params, n, seed)
            size = n
        else:
            fn = partial(ep_orderstat_tail_chunk, params, n, seed)
            size = n
        sups = self.runner.run(fn, reps)

        rows = []
        for eta in params.eta:
            k = int(np.count_nonzero(sups >= eta))
            ucl = clopper_pearson_upper(k, reps)
            bound = params.bound(eta)
            rows.append(
                TailCheckRow(eta=eta, exceedances=k, frequency=k / reps, ucl=ucl, bound=bound, passed=ucl <= bound)
            )
            if ucl > bound:
                logger.warning("%s tail check failed at eta=%s: ucl %.4g > bound %.4g", process.value, eta, ucl, bound)
        return TailCheckResult(process=process, params=params, reps=reps, n=size, rows=rows)

    def fit_exponential_tail(
        self, samples: np.ndarray, eta_lo: float = 4.0, eta_hi: float = 10.0, points: int = 13
    ) -> ExponentialTailFit:
        """Least-squares line through log P(T > eta) on an eta grid"""
        samples = np.asarray(samples, dtype=float)
        eta = np.linspace(eta_lo, eta_hi, points)
        tail = np.array([np.mean(samples > e) for e in eta])
        keep = tail > 0.0
        if np.count_nonzero(keep) < 2:
            raise ConvergenceError(f"fewer than two thresholds in [{eta_lo}, {eta_hi}] are exceeded")
        slope, intercept = np.polyfit(eta[keep], np.log(tail[keep]), 1)
        return ExponentialTailFit(m_o=float(math.exp(intercept)), l_o=float(-slope), eta_lo=eta_lo, eta_hi=eta_hi)

    def argmax_edge_fraction(self, spec: PenaltySpec, m: int, reps: int, seed: int, cells: int = 10) -> float:
        """Fraction of paths whose argmax lies within `cells` grid cells of either end"""
        index = self.runner.run(partial(argmax_chunk, m, spec.nu, seed), reps)
        edge = (index < cells) | (index >= m - cells)
        return float(np.mean(edge))
