from functools import partial
from typing import Callable, Iterable, List, Optional, Sequence
import logging
import math

import numpy as np
from scipy import optimize, special

from lilbands.core.special_functions import LOG_4
from lilbands.exceptions import DomainError, ModelSpecError
from lilbands.models.cdf_model import CdfModel
from lilbands.models.enums import StatisticFamily
from lilbands.models.gof import RateEstimate
from lilbands.models.mixture import DeltaResult, LlrSummary, NonRejectionPoint, PowerRow, SparseMixtureParams
from lilbands.models.statistic import PenaltySpec
from lilbands.models.quantile_table import QuantileTable
from lilbands.models.sample import RngKey
from lilbands.services.gof_service import GofService, rejection_chunk
from lilbands.services.monte_carlo import MonteCarloRunner
from lilbands.services.quantile_service import QuantileService

logger = logging.getLogger(__name__)

GRID_SIZE = 4096
TAIL_PROB = 1e-12
LLR_THRESHOLD = 0.1

Calibration = Callable[[int], SparseMixtureParams]


def detection_boundary(beta: float) -> float:
    """r*(beta) = beta - 1/2 on (1/2, 3/4] and (1 - sqrt(1 - beta))^2 on [3/4, 1)"""
    if not 0.5 < beta < 1.0:
        raise DomainError("detection_boundary", "beta", beta, "(1/2, 1)")
    if beta <= 0.75:
        return beta - 0.5
    return (1.0 - math.sqrt(1.0 - beta)) ** 2


def calibrate_dense(n: int, beta: float, r: float) -> SparseMixtureParams:
    """eps = n^-beta, mu = sqrt(2 r log n)"""
    return SparseMixtureParams(
        n=n, calibration="dense", beta=beta, r=r, eps=n ** (-beta), mu=math.sqrt(2.0 * r * math.log(n))
    )


def calibrate_sparse(n: int, beta: float, s_exp: float) -> SparseMixtureParams:
    """eps = n^-beta, pi_n = sqrt(n) eps, mu = sqrt(2 s log(1 / pi_n)); needs pi_n < 1"""
    eps = n ** (-beta)
    pi_n = math.sqrt(n) * eps
    if not pi_n < 1.0:
        raise DomainError("calibrate_sparse", "beta", beta, f"> 1/2 so that sqrt(n) n^-beta < 1 at n={n}")
    mu = math.sqrt(2.0 * s_exp * math.log(1.0 / pi_n))
    return SparseMixtureParams(n=n, calibration="sparse", beta=beta, s_exp=s_exp, eps=eps, mu=mu)


def calibrate_explicit(n: int, eps: float, mu: float) -> SparseMixtureParams:
    return SparseMixtureParams(n=n, calibration="explicit", eps=eps, mu=mu)


def _log_ratio(model: CdfModel, null: CdfModel, n: int, x: np.ndarray) -> np.ndarray:
    """log of sqrt(n)|F - F_o| / (sqrt(Gamma(F_o) F_o (1 - F_o)) + Gamma(F_o) / sqrt(n)), -inf where F = F_o"""
    log_cdf_o = null.logcdf(x)
    log_sf_o = null.logsf(x)
    # difference taken on the side where both tails are small
    lower_side = log_cdf_o <= log_sf_o
    diff = np.where(
        lower_side,
        np.asarray(model.cdf(x), dtype=float) - np.asarray(null.cdf(x), dtype=float),
        np.asarray(null.sf(x), dtype=float) - np.asarray(model.sf(x), dtype=float),
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        log_num = 0.5 * math.log(n) + np.log(np.abs(diff))
        log_var = log_cdf_o + log_sf_o
        c_val = np.maximum(np.log1p(-(LOG_4 + log_var)), 0.0)
        log_gamma = np.log1p(c_val)
        log_den = np.logaddexp(0.5 * (log_gamma + log_var), log_gamma - 0.5 * math.log(n))
        value = log_num - log_den
    return np.where(np.isfinite(value), value, -np.inf)


class MixtureService:
    """Sparse Gaussian mixture detection: Delta_n, power and null LLR concentration"""

    def __init__(
        self,
        runner: Optional[MonteCarloRunner] = None,
        gof_service: Optional[GofService] = None,
        quantile_service: Optional[QuantileService] = None,
    ):
        self.runner = runner or MonteCarloRunner()
        self.gof_service = gof_service or GofService(self.runner)
        self.quantile_service = quantile_service or QuantileService(runner=self.runner)

    def search_grid(self, model: CdfModel, null: CdfModel, grid_size: int = GRID_SIZE) -> np.ndarray:
        """Logit-spaced probabilities in [1e-12, 1 - 1e-12] mapped through F_o^-1, extended to reach mu +- 10"""
        edge = special.logit(TAIL_PROB)
        probs = special.expit(np.linspace(edge, -edge, grid_size))
        x = np.asarray(null.quantile(probs), dtype=float)
        extra_points = max(grid_size // 8, 2)
        x_hi = max(float(x[-1]), model.mu + 10.0)
        if x_hi > x[-1]:
            x = np.concatenate([x, np.linspace(x[-1], x_hi, extra_points)[1:]])
        # mirror image for a shift to the left
        x_lo = min(float(x[0]), model.mu - 10.0) if model.mu < 0.0 else float(x[0])
        if x_lo < x[0]:
            x = np.concatenate([np.linspace(x_lo, x[0], extra_points)[:-1], x])
        return x

    def delta_between(self, model: CdfModel, null: CdfModel, n: int, grid_size: int = GRID_SIZE) -> DeltaResult:
        """
        Delta_n(F, F_o): coarse grid maximum of the normalized deviation, then a
        golden-section refinement inside the best grid cell.
        """
        x = self.search_grid(model, null, grid_size)
        log_ratio = _log_ratio(model, null, n, x)
        if not np.any(np.isfinite(log_ratio)):
            return DeltaResult(delta=0.0, argmax_x=float(x[0]))
        if np.any(np.isnan(np.asarray(model.cdf(x), dtype=float))):
            raise ModelSpecError("model CDF is not finite on the search range")

        k = int(np.argmax(log_ratio))
        best_x, best = float(x[k]), float(log_ratio[k])
        if 0 < k < x.size - 1:
            objective = lambda point: -float(_log_ratio(model, null, n, np.asarray([point]))[0])  # noqa: E731
            try:
                refined = optimize.minimize_scalar(objective, bracket=(x[k - 1], x[k], x[k + 1]), method="golden")
            except ValueError:
                refined = optimize.minimize_scalar(objective, bounds=(x[k - 1], x[k + 1]), method="bounded")
            if np.isfinite(refined.fun) and -refined.fun > best:
                best_x, best = float(refined.x), float(-refined.fun)
        return DeltaResult(delta=math.exp(best), argmax_x=best_x)

    def delta_n(self, params: SparseMixtureParams, grid_size: int = GRID_SIZE) -> DeltaResult:
        """Delta_n of the calibrated mixture against the standard normal"""
        return self.delta_between(params.model, CdfModel.std_normal(), params.n, grid_size)

    def power_sim(
        self,
        params: SparseMixtureParams,
        spec: PenaltySpec,
        alpha: float,
        table: QuantileTable,
        reps: int,
        seed: int,
    ) -> RateEstimate:
        """Rejection frequency of F_o = Phi for samples from the mixture"""
        return self.gof_service.power_vs_fixed_alt(
            CdfModel.std_normal(), params.model, params.n, spec, alpha, table, reps, seed
        )

    def power_grid(
        self,
        calibration: Calibration,
        n_grid: Sequence[int],
        spec: PenaltySpec,
        alpha: float,
        reps: int,
        seed: int,
        table_reps: int,
    ) -> List[PowerRow]:
        """(n, eps, mu, delta_n, rejection rate, se) for every n"""
        rows = []
        for n in n_grid:
            params = calibration(n)
            delta = self.delta_n(params)
            table = self.quantile_service.get_or_estimate(StatisticFamily.NEW_SUP, n, spec, alpha, table_reps, seed)
            rate = self.power_sim(params, spec, alpha, table, reps, seed + 1)
            logger.info("n=%d eps=%.4g mu=%.4g: delta_n=%.4g power=%.4f", n, params.eps, params.mu, delta.delta, rate.rate)
            rows.append(
                PowerRow(
                    n=n,
                    eps=params.eps,
                    mu=params.mu,
                    delta_n=delta.delta,
                    rejection_rate=rate.rate,
                    se=rate.std_err,
                    s_exp=params.s_exp,
                )
            )
        return rows

    def nonrejection_curve(
        self,
        pairs: Iterable[SparseMixtureParams],
        spec: PenaltySpec,
        kappa: float,
        reps: int,
        seed: int,
    ) -> List[NonRejectionPoint]:
        """Non-rejection frequency of Phi at fixed kappa against Delta_n, sorted by Delta_n"""
        points = []
        null = CdfModel.std_normal()
        for params in pairs:
            delta = self.delta_n(params)
            rejected = self.runner.run(
                partial(rejection_chunk, null, params.model, params.n, spec.nu, kappa, seed), reps
            )
            keep = 1.0 - float(np.mean(rejected))
            points.append(
                NonRejectionPoint(
                    n=params.n,
                    eps=params.eps,
                    mu=params.mu,
                    delta_n=delta.delta,
                    nonrejection=keep,
                    std_err=math.sqrt(keep * (1.0 - keep) / reps),
                )
            )
        return sorted(points, key=lambda point: point.delta_n)

    def llr_null_sim(self, params: SparseMixtureParams, reps: int, seed: int) -> LlrSummary:
        """
        Null behavior of the log-likelihood ratio sum_i log(1 + V_n(X_i)),
        V_n(x) = eps (exp(mu x - mu^2 / 2) - 1), for X_i ~ Phi.
        """
        s_exp = params.s_exp
        guaranteed = s_exp is None or s_exp < 1.0
        if not guaranteed:
            logger.warning("s_exp=%s >= 1: the null LLR need not concentrate", s_exp)
        draws = self.runner.run(partial(llr_chunk, params.n, params.eps, params.mu, seed), reps)
        llr, sum_v = draws[:, 0], draws[:, 1]

        pi_n = params.pi_n
        var_theory = pi_n**2 * math.expm1(params.mu**2)
        if s_exp is not None and pi_n > 0.0:
            bound = pi_n ** (2.0 * (1.0 - s_exp)) - pi_n**2
        else:
            bound = var_theory
        centered_sq = np.square(sum_v - np.mean(sum_v))
        return LlrSummary(
            reps=reps,
            mean=float(np.mean(llr)),
            variance=float(np.var(llr, ddof=1)) if reps > 1 else 0.0,
            exceed_fraction=float(np.mean(np.abs(llr) > LLR_THRESHOLD)),
            second_moment_bound=bound,
            var_v_theory=var_theory,
            var_v_empirical=float(np.var(sum_v, ddof=1)) if reps > 1 else 0.0,
            var_v_std_err=float(np.std(centered_sq, ddof=1) / math.sqrt(reps)) if reps > 1 else 0.0,
            concentration_guaranteed=guaranteed,
        )


def llr_chunk(n: int, eps: float, mu: float, seed: int, start: int, stop: int) -> np.ndarray:
    """Per replicate (sum log(1 + V), sum V) over n standard normal draws"""
    out = np.empty((stop - start, 2))
    for row, stream in enumerate(range(start, stop)):
        x = RngKey(seed=seed, stream_index=stream).generator().standard_normal(n)
        v = eps * np.expm1(mu * x - 0.5 * mu * mu)
        out[row, 0] = np.sum(np.log1p(v))
        out[row, 1] = np.sum(v)
    return out
