from functools import partial
from pathlib import Path
from typing import Optional, TextIO, Tuple, Union
import logging
import math

import numpy as np

from lilbands.core.config import settings
from lilbands.core.sampling import uniform_order_stats_matrix
from lilbands.core.special_functions import (
    ONE_MINUS_ULP,
    _beta_quantile,
    _penalty_sum,
    invert_k_upper_flagged,
)
from lilbands.exceptions import DomainError, TableMismatchError
from lilbands.models.band import BandBudget, BandComparison, ConfidenceBand, CoverageResult
from lilbands.models.enums import BandMethod
from lilbands.models.quantile_table import QuantileTable
from lilbands.models.sample import SortedSample
from lilbands.models.statistic import PenaltySpec
from lilbands.services.monte_carlo import MonteCarloRunner
from lilbands.utils.io_utils import write_csv

logger = logging.getLogger(__name__)

ISOTONIC_WARN = 1e-9
RATIO_GUARD = 1e-15
SMALL_J = 10

CSV_HEADER = ("j", "s_nj", "lower", "upper", "centered_lower", "centered_upper")
CSV_HEADER_CENTERED = ("j", "s_nj", "centered_lower", "centered_upper")


def coverage_chunk(lower: np.ndarray, upper: np.ndarray, n: int, seed: int, start: int, stop: int) -> np.ndarray:
    """True where the band covers F(t) = t: a_j <= U_{n:j} for j >= 1 and U_{n:j+1} <= b_j for j < n"""
    u = uniform_order_stats_matrix(n, seed, start, stop)
    return np.all(lower[1:] <= u, axis=1) & np.all(u <= upper[:-1], axis=1)


class BandService:
    """Construction, evaluation and comparison of confidence bands"""

    def __init__(self, runner: Optional[MonteCarloRunner] = None):
        self.runner = runner or MonteCarloRunner()

    def _finalize(
        self,
        n: int,
        method: BandMethod,
        lower: np.ndarray,
        upper: np.ndarray,
        kappa: float,
        nu: Optional[float],
        alpha: Optional[float],
        saturated: int,
    ) -> ConfidenceBand:
        """Clamp into [0, 1], make both limits nondecreasing in j and pin the endpoints"""
        grid = np.arange(n + 1) / n
        lower = np.clip(lower, 0.0, 1.0)
        upper = np.clip(upper, 0.0, 1.0)
        lower[0] = 0.0
        upper[n] = 1.0

        # F is nondecreasing, so F <= b_k on every later interval; the tightened band has the same coverage event
        upper_iso = np.minimum.accumulate(upper[::-1])[::-1]
        lower_iso = np.maximum.accumulate(lower)
        shift = max(float(np.max(upper - upper_iso)), float(np.max(lower_iso - lower)))
        if shift > ISOTONIC_WARN:
            logger.warning("%s band for n=%d was not monotone; isotonization moved a limit by %.3g", method.value, n, shift)

        lower_iso = np.minimum(lower_iso, grid)
        upper_iso = np.maximum(upper_iso, grid)
        if saturated:
            logger.warning("%s band for n=%d: %d limits saturated at 1 - ulp", method.value, n, saturated)
        return ConfidenceBand(
            n=n,
            method=method,
            lower=lower_iso,
            upper=upper_iso,
            kappa_used=kappa,
            nu=nu,
            alpha=alpha,
            saturated=saturated,
        )

    def _reflected(
        self,
        n: int,
        method: BandMethod,
        s: np.ndarray,
        gamma: np.ndarray,
        kappa: float,
        nu: Optional[float],
        alpha: Optional[float],
    ) -> ConfidenceBand:
        """b_j = invert_k_upper(s_j, gamma_j) for j < n, b_n = 1 and a_j = 1 - b_{n-j}"""
        upper = np.ones(n + 1)
        upper[:n], saturated = invert_k_upper_flagged(s, gamma)
        lower = 1.0 - upper[::-1]
        return self._finalize(n, method, lower, upper, kappa, nu, alpha, int(np.count_nonzero(saturated)))

    # === constructions ===

    def band_budget(self, n: int, spec: PenaltySpec, kappa: float, t: float) -> BandBudget:
        """gamma_n(t) = (C(t) + nu D(t) + kappa) / (n + 1)"""
        gamma = (float(_penalty_sum(np.asarray(t, dtype=float), spec.nu)) + kappa) / (n + 1)
        return BandBudget(t=t, gamma=max(gamma, 0.0))

    def band_budget_bj(self, n: int, kappa_bj: float, t: float = 0.5) -> BandBudget:
        """The Berk-Jones budget kappa / n is the same at every t"""
        return BandBudget(t=t, gamma=max(kappa_bj / n, 0.0))

    def band_new(self, n: int, spec: PenaltySpec, kappa: float, alpha: Optional[float] = None) -> ConfidenceBand:
        if n < 1:
            raise DomainError("band_new", "n", n, ">= 1")
        t = np.arange(1, n + 1) / (n + 1)  # t_{n,j+1} for j = 0..n-1
        gamma = (_penalty_sum(t, spec.nu) + kappa) / (n + 1)
        if np.any(gamma < 0.0):
            logger.warning("kappa=%s gives a negative budget at %d points; using 0", kappa, int(np.sum(gamma < 0.0)))
            gamma = np.maximum(gamma, 0.0)
        logger.debug("NEW band n=%d: gamma_n(t_n1)=%s", n, gamma[0])
        return self._reflected(n, BandMethod.NEW, t, gamma, kappa, spec.nu, alpha)

    def band_bjo(self, n: int, kappa_bj: float, alpha: Optional[float] = None) -> ConfidenceBand:
        if n < 1:
            raise DomainError("band_bjo", "n", n, ">= 1")
        s = np.arange(n) / n
        gamma = np.full(n, max(kappa_bj / n, 0.0))
        return self._reflected(n, BandMethod.BJO, s, gamma, kappa_bj, None, alpha)

    def band_ks(self, n: int, kappa_ks: float, alpha: Optional[float] = None) -> ConfidenceBand:
        if n < 1:
            raise DomainError("band_ks", "n", n, ">= 1")
        if kappa_ks < 0.0:
            raise DomainError("band_ks", "kappa_ks", kappa_ks, "[0, inf)")
        s = np.arange(n + 1) / n
        half = kappa_ks / math.sqrt(n)
        return self._finalize(
            n, BandMethod.KS, np.maximum(0.0, s - half), np.minimum(1.0, s + half), kappa_ks, None, alpha, 0
        )

    def band_ui(self, n: int, kappa_ui: float, alpha: Optional[float] = None) -> ConfidenceBand:
        """
        a_j = B_{nj}^{-1}(kappa) for j >= 1 with B_{nj} = Beta(j, n + 1 - j);
        b_j = B_{n,j+1}^{-1}(1 - kappa) for j < n.
        """
        if n < 1:
            raise DomainError("band_ui", "n", n, ">= 1")
        if not 0.0 < kappa_ui < 0.5:
            raise DomainError("band_ui", "kappa_ui", kappa_ui, "(0, 1/2)")
        j = np.arange(1, n + 1, dtype=float)
        lower = np.zeros(n + 1)
        lower[1:] = _beta_quantile(j, n + 1.0 - j, kappa_ui)
        upper = np.ones(n + 1)
        upper[:n] = _beta_quantile(j, n + 1.0 - j, 1.0 - kappa_ui)
        saturated = int(np.count_nonzero(upper[:n] > ONE_MINUS_ULP))
        upper[:n] = np.minimum(upper[:n], ONE_MINUS_ULP)
        return self._finalize(n, BandMethod.UI, lower, upper, kappa_ui, None, alpha, saturated)

    def band_from_table(self, method: BandMethod, table: QuantileTable, spec: Optional[PenaltySpec] = None) -> ConfidenceBand:
        """Build the band calibrated by `table`, checking the method/family pairing"""
        if table.family is not method.family:
            raise TableMismatchError(
                f"{method.value} band needs a {method.family.value} table, got {table.family.value}", found=table
            )
        if method is BandMethod.NEW:
            spec = spec or PenaltySpec(nu=table.nu)
            if not math.isclose(spec.nu, table.nu, rel_tol=1e-12):
                raise TableMismatchError(f"table has nu={table.nu}, band requested nu={spec.nu}", found=table)
            return self.band_new(table.n, spec, table.kappa, table.alpha)
        if method is BandMethod.BJO:
            return self.band_bjo(table.n, table.kappa, table.alpha)
        if method is BandMethod.KS:
            return self.band_ks(table.n, table.kappa, table.alpha)
        return self.band_ui(table.n, table.kappa, table.alpha)

    # === use ===

    def band_evaluate(self, band: ConfidenceBand, data: SortedSample, x: float) -> Tuple[float, float]:
        """(a_j, b_j) for X_{n:j} <= x < X_{n:j+1}"""
        if band.n != data.n:
            raise DomainError("band_evaluate", "data.n", data.n, f"the band size n={band.n}")
        j = int(np.searchsorted(data.values, x, side="right"))
        return float(band.lower[j]), float(band.upper[j])

    def band_compare(self, b1: ConfidenceBand, b2: ConfidenceBand) -> BandComparison:
        if b1.n != b2.n:
            raise DomainError("band_compare", "b2.n", b2.n, f"equal to b1.n={b1.n}")
        n = b1.n
        s = b1.s_nj

        def ratio(num: np.ndarray, den: np.ndarray) -> Optional[float]:
            keep = den >= RATIO_GUARD
            return float(np.max(num[keep] / den[keep])) if np.any(keep) else None

        up1, up2 = b1.upper[:n] - s[:n], b2.upper[:n] - s[:n]
        lo1, lo2 = s[1:] - b1.lower[1:], s[1:] - b2.lower[1:]
        small = slice(0, min(SMALL_J, n - 1) + 1)
        return BandComparison(
            n=n,
            max_upper_ratio=ratio(up1, up2),
            max_lower_ratio=ratio(lo1, lo2),
            small_j_upper_ratio=ratio(up1[small], up2[small]),
            max_half_width_1=float(max(np.max(b1.upper - s), np.max(s - b1.lower))),
            max_half_width_2=float(max(np.max(b2.upper - s), np.max(s - b2.lower))),
            lil_scale=math.sqrt(math.log(math.log(n)) / (2 * n)) if n >= 3 else None,
            root_n_scale=1.0 / math.sqrt(n),
        )

    def tail_limits(self, band: ConfidenceBand) -> Tuple[float, float]:
        """(b_{n0}, 1 - a_{nn}), the limits for F at -inf and 1 - F at +inf"""
        return float(band.upper[0]), float(1.0 - band.lower[band.n])

    def band_coverage_sim(
        self,
        method: BandMethod,
        n: int,
        spec: PenaltySpec,
        alpha: float,
        table: QuantileTable,
        reps: int,
        seed: int,
    ) -> CoverageResult:
        """Fraction of uniform samples whose band-at-data covers the identity"""
        if table.n != n or not math.isclose(table.alpha, alpha, rel_tol=1e-12):
            raise TableMismatchError(f"table (n={table.n}, alpha={table.alpha}) does not match n={n}, alpha={alpha}", found=table)
        band = self.band_from_table(method, table, spec)
        covered = self.runner.run(partial(coverage_chunk, band.lower, band.upper, n, seed), reps)
        coverage = float(np.mean(covered))
        std_err = math.sqrt(coverage * (1.0 - coverage) / reps)
        logger.info("Coverage of %s band (n=%d): %.4f +/- %.4f", method.value, n, coverage, std_err)
        return CoverageResult(coverage=coverage, std_err=std_err, reps=reps)

    def export_band_csv(
        self,
        band: ConfidenceBand,
        target: Union[Path, str, TextIO],
        centered_only: bool = False,
        digits: Optional[int] = None,
    ) -> None:
        digits = digits or settings.CSV_SIGNIFICANT_DIGITS
        s = band.s_nj
        if centered_only:
            header = CSV_HEADER_CENTERED
            rows = [(j, s[j], band.centered_lower[j], band.centered_upper[j]) for j in range(band.n + 1)]
        else:
            header = CSV_HEADER
            rows = [
                (j, s[j], band.lower[j], band.upper[j], band.centered_lower[j], band.centered_upper[j])
                for j in range(band.n + 1)
            ]
        if isinstance(target, (str, Path)):
            with open(target, "w", encoding="utf-8", newline="\n") as handle:
                write_csv(header, rows, handle, digits)
        else:
            write_csv(header, rows, target, digits)
