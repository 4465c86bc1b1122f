from functools import partial
from typing import Optional, Tuple
import logging
import math

import numpy as np

from lilbands.core.sampling import sample_matrix
from lilbands.core.special_functions import ONE_MINUS_ULP
from lilbands.core.statistics import batch_statistic, stat_new_sup, stat_union_intersection, surrogate_pvalues
from lilbands.exceptions import TableMismatchError
from lilbands.models.cdf_model import CdfModel
from lilbands.models.enums import StatisticFamily
from lilbands.models.gof import GofReport, RateEstimate
from lilbands.models.quantile_table import QuantileTable
from lilbands.models.sample import SortedSample, UniformOrderStats
from lilbands.models.statistic import PenaltySpec
from lilbands.services.monte_carlo import MonteCarloRunner, statistic_chunk

logger = logging.getLogger(__name__)

_TINY = float(np.finfo(float).tiny)


def to_unit_interval(u: np.ndarray) -> np.ndarray:
    """Clip probability-integral transforms into the open interval (0, 1)"""
    return np.clip(u, _TINY, ONE_MINUS_ULP)


def transform(model: CdfModel, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    (F_o(x), 1 - F_o(x), lost) with the second part taken from the survival
    function, both clipped into (0, 1]. `lost` marks points whose relevant
    tail underflowed to 0 or 1 and had to be moved inside.
    """
    u = np.asarray(model.cdf(x), dtype=float)
    v = np.asarray(model.sf(x), dtype=float)
    lost = np.where(u > 0.5, v <= 0.0, u <= 0.0)
    return to_unit_interval(u), np.clip(v, _TINY, 1.0), lost


def rejection_chunk(
    model_null: CdfModel,
    model_alt: CdfModel,
    n: int,
    nu: float,
    kappa: float,
    seed: int,
    start: int,
    stop: int,
) -> np.ndarray:
    """True where the new supremum test rejects model_null for a sample from model_alt"""
    x = sample_matrix(model_alt, n, seed, start, stop)
    u, v, _ = transform(model_null, x)
    return batch_statistic(StatisticFamily.NEW_SUP, u, nu, complements=v) > kappa


def check_table(table: QuantileTable, n: int, spec: PenaltySpec, alpha: float) -> None:
    if not table.matches(StatisticFamily.NEW_SUP, n, spec.nu, alpha):
        raise TableMismatchError(
            f"need a {StatisticFamily.NEW_SUP.value} table for n={n}, nu={spec.nu}, alpha={alpha}; "
            f"got {table.family.value} n={table.n} nu={table.nu} alpha={table.alpha}",
            found=table,
        )


class GofService:
    """Goodness-of-fit tests of a continuous F_o with the penalized supremum statistic"""

    def __init__(self, runner: Optional[MonteCarloRunner] = None):
        self.runner = runner or MonteCarloRunner()

    def gof_test(
        self,
        data: SortedSample,
        model: CdfModel,
        spec: PenaltySpec,
        alpha: float,
        table: QuantileTable,
        pvalue_reps: int,
        seed: int,
        kappa: Optional[float] = None,
    ) -> GofReport:
        """
        Test data against model. The statistic is evaluated on F_o(X_{n:i});
        the p-value is (1 + #{simulated >= observed}) / (pvalue_reps + 1) and
        `kappa`, when given, replaces the table's critical value.
        """
        check_table(table, data.n, spec, alpha)
        u, v, lost = transform(model, data.values)
        u, v = u.reshape(data.n), v.reshape(data.n)
        repeated = (np.diff(u) == 0.0) & (np.diff(v) == 0.0)
        ties = bool(np.any(repeated))
        if ties:
            logger.warning("Ties in F_o(X): %d repeated values; the model may not be continuous here",
                           int(np.sum(repeated)))
        if np.any(lost):
            logger.warning("%d transformed values at exactly 0 or 1 were moved inside (0, 1)", int(np.sum(lost)))

        order_stats = UniformOrderStats(n=data.n, values=u, complements=v)
        result = stat_new_sup(order_stats, spec)

        simulated = self.runner.run(
            partial(statistic_chunk, StatisticFamily.NEW_SUP, data.n, spec.nu, seed), pvalue_reps
        )
        p_value = (1.0 + float(np.count_nonzero(simulated >= result.value))) / (pvalue_reps + 1.0)

        critical = table.kappa if kappa is None else float(kappa)
        if result.argmax_index == 0:
            argmax_x = float(model.quantile(0.5))
        else:
            argmax_x = float(data.values[result.argmax_index - 1])

        report = GofReport(
            statistic=result.value,
            kappa=critical,
            p_value=p_value,
            reject=result.value > critical,
            argmax_x=argmax_x,
            n=data.n,
            nu=spec.nu,
            alpha=alpha,
            reps=pvalue_reps,
            seed=seed,
            model=model.spec or model.kind.value,
            ties_present=ties or data.ties_present,
            surrogate_min_pvalue=float(np.min(surrogate_pvalues(order_stats))),
            ui_statistic=stat_union_intersection(order_stats).value,
        )
        logger.info("GoF statistic %.6g vs kappa %.6g: p=%.4g reject=%s", report.statistic, critical, p_value, report.reject)
        return report

    def power_vs_fixed_alt(
        self,
        model_null: CdfModel,
        model_alt: CdfModel,
        n: int,
        spec: PenaltySpec,
        alpha: float,
        table: QuantileTable,
        reps: int,
        seed: int,
        kappa: Optional[float] = None,
    ) -> RateEstimate:
        """Rejection frequency of model_null over `reps` samples drawn from model_alt"""
        check_table(table, n, spec, alpha)
        critical = table.kappa if kappa is None else float(kappa)
        rejected = self.runner.run(
            partial(rejection_chunk, model_null, model_alt, n, spec.nu, critical, seed), reps
        )
        rate = float(np.mean(rejected))
        return RateEstimate(rate=rate, std_err=math.sqrt(rate * (1.0 - rate) / reps), reps=reps)
