from functools import partial
from pathlib import Path
from typing import Optional, Tuple
import json
import logging
import math

import numpy as np
from pydantic import ValidationError
from scipy import stats

from lilbands.core.config import settings
from lilbands.exceptions import CacheParseError, DomainError, TableMismatchError
from lilbands.models.enums import StatisticFamily
from lilbands.models.quantile_table import QuantileTable, table_file_name
from lilbands.models.statistic import PenaltySpec
from lilbands.services.monte_carlo import MonteCarloRunner, statistic_chunk
from lilbands.utils.io_utils import format_number, write_text_atomic

logger = logging.getLogger(__name__)

MIN_REPS = 100
_TABLE_FIELDS = ("family", "n", "nu", "alpha", "reps", "seed", "kappa", "std_err")


def empirical_quantile(samples: np.ndarray, alpha: float, lower_tail: bool = False) -> Tuple[float, float]:
    """
    Order statistic of rank ceil((1 - alpha) R), or ceil(alpha R) for a
    lower-tail family, with its asymptotic standard error
    sqrt(p(1-p)/R) / f(kappa) from a Silverman-bandwidth KDE.
    """
    ordered = np.sort(np.asarray(samples, dtype=float))
    reps = ordered.size
    level = alpha if lower_tail else 1.0 - alpha
    rank = min(reps, max(1, math.ceil(round(level * reps, 9))))
    kappa = float(ordered[rank - 1])
    return kappa, _quantile_std_err(ordered, kappa, level)


def _quantile_std_err(ordered: np.ndarray, kappa: float, level: float) -> float:
    try:
        density = float(stats.gaussian_kde(ordered, bw_method="silverman")(kappa)[0])
    except (np.linalg.LinAlgError, ValueError) as e:
        logger.warning("KDE at the quantile failed (%s); reporting std_err = 0", e)
        return 0.0
    if not math.isfinite(density) or density <= 0.0:
        logger.warning("KDE density at the quantile is %s; reporting std_err = 0", density)
        return 0.0
    return math.sqrt(level * (1.0 - level) / ordered.size) / density


def _nu_key(family: StatisticFamily, nu: float) -> float:
    return float(nu) if family.uses_nu else 0.0


def table_to_json(table: QuantileTable) -> str:
    """Fixed field order, 17 significant digits"""
    digits = settings.JSON_SIGNIFICANT_DIGITS
    lines = []
    for name in _TABLE_FIELDS:
        value = getattr(table, name)
        if name == "family":
            rendered = f'"{table.family.value}"'
        elif name in ("nu", "alpha", "kappa", "std_err"):
            rendered = format_number(float(value), digits)
        else:
            rendered = str(int(value))
        lines.append(f'  "{name}": {rendered}')
    return "{\n" + ",\n".join(lines) + "\n}\n"


def table_from_json(text: str, path: Path) -> QuantileTable:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise CacheParseError(f"invalid JSON ({e.msg} at line {e.lineno})", path) from None
    if not isinstance(payload, dict) or set(payload) != set(_TABLE_FIELDS):
        raise CacheParseError(f"expected exactly the fields {', '.join(_TABLE_FIELDS)}", path)
    try:
        return QuantileTable.model_validate(payload)
    except ValidationError as e:
        raise CacheParseError(f"invalid table: {e.errors()[0]['msg']}", path) from None


class QuantileService:
    """Monte-Carlo critical values and their on-disk cache"""

    def __init__(self, cache_dir: Optional[Path] = None, runner: Optional[MonteCarloRunner] = None):
        self.cache_dir = Path(cache_dir) if cache_dir is not None else settings.cache_path
        self.runner = runner or MonteCarloRunner()

    def estimate_quantile(
        self,
        family: StatisticFamily,
        n: int,
        spec: PenaltySpec,
        alpha: float,
        reps: int,
        seed: int,
    ) -> QuantileTable:
        """Simulate `reps` uniform samples of size n, one Philox stream per replicate"""
        if family is StatisticFamily.LIMIT:
            raise DomainError("estimate_quantile", "family", family.value, "a finite-sample family")
        if reps < MIN_REPS:
            raise DomainError("estimate_quantile", "reps", reps, f">= {MIN_REPS}")
        if not 0.0 < alpha < 1.0:
            raise DomainError("estimate_quantile", "alpha", alpha, "(0, 1)")
        if n < 1:
            raise DomainError("estimate_quantile", "n", n, ">= 1")

        nu = _nu_key(family, spec.nu)
        logger.info("Estimating %s quantile: n=%d nu=%s alpha=%s reps=%d seed=%d", family.value, n, nu, alpha, reps, seed)
        samples = self.runner.run(partial(statistic_chunk, family, n, nu, seed), reps)
        kappa, std_err = empirical_quantile(samples, alpha, lower_tail=family.lower_tail)
        logger.info("Estimated kappa %s (std_err %s)", kappa, std_err)
        return QuantileTable(
            family=family, n=n, nu=nu, alpha=alpha, reps=reps, seed=seed, kappa=kappa, std_err=std_err
        )

    # === cache ===

    def _path(self, family: StatisticFamily, n: int, nu: float, alpha: float,
              reps: Optional[int] = None, seed: Optional[int] = None,
              cache_dir: Optional[Path] = None) -> Path:
        return Path(cache_dir or self.cache_dir) / table_file_name(family, n, nu, alpha, reps, seed)

    def _read(self, path: Path) -> QuantileTable:
        return table_from_json(path.read_text(encoding="utf-8"), path)

    def store_table(self, table: QuantileTable, cache_dir: Optional[Path] = None) -> str:
        """
        Write the table atomically and return its file name.

        The canonical file holds the first run stored for a key; a run with
        different (reps, seed) goes to a `_r<reps>_s<seed>` variant file.
        """
        nu = _nu_key(table.family, table.nu)
        canonical = self._path(table.family, table.n, nu, table.alpha, cache_dir=cache_dir)
        target = canonical
        if canonical.exists():
            try:
                existing = self._read(canonical)
            except CacheParseError as e:
                logger.warning("Replacing unreadable cache entry: %s", e)
                existing = None
            if existing is not None and (existing.reps, existing.seed) != (table.reps, table.seed):
                target = self._path(table.family, table.n, nu, table.alpha, table.reps, table.seed, cache_dir)
        write_text_atomic(target, table_to_json(table))
        logger.info("Stored quantile table %s", target)
        return target.name

    def load_table(
        self,
        family: StatisticFamily,
        n: int,
        nu: float,
        alpha: float,
        cache_dir: Optional[Path] = None,
        reps: Optional[int] = None,
        seed: Optional[int] = None,
    ) -> Optional[QuantileTable]:
        """
        Cached table for (family, n, nu, alpha), or None.

        When reps and seed are given, only a table of that run is returned;
        if the cache holds a different run for the key, TableMismatchError
        carries it as `found`.
        """
        nu = _nu_key(family, nu)
        canonical = self._path(family, n, nu, alpha, cache_dir=cache_dir)
        table = self._read(canonical) if canonical.exists() else None
        if table is not None and not table.matches(family, n, nu, alpha):
            raise CacheParseError("content does not match the file name", canonical)
        if reps is None and seed is None:
            return table
        if table is not None and (reps is None or table.reps == reps) and (seed is None or table.seed == seed):
            return table

        if reps is not None and seed is not None:
            variant = self._path(family, n, nu, alpha, reps, seed, cache_dir)
            if variant.exists():
                return self._read(variant)
        if table is not None:
            raise TableMismatchError(
                f"cached {family.value} table for n={n} has reps={table.reps} seed={table.seed}, "
                f"requested reps={reps} seed={seed}",
                found=table,
            )
        return None

    def get_or_estimate(
        self,
        family: StatisticFamily,
        n: int,
        spec: PenaltySpec,
        alpha: float,
        reps: int,
        seed: int,
        cache_dir: Optional[Path] = None,
    ) -> QuantileTable:
        """Cache lookup by full key; estimate and store on a miss"""
        try:
            table = self.load_table(family, n, spec.nu, alpha, cache_dir=cache_dir, reps=reps, seed=seed)
        except TableMismatchError as e:
            logger.warning("%s; estimating the requested run", e.message)
            table = None
        if table is not None:
            logger.info("Using cached %s table: kappa=%s", family.value, table.kappa)
            return table
        table = self.estimate_quantile(family, n, spec, alpha, reps, seed)
        self.store_table(table, cache_dir=cache_dir)
        return table
