"""
Seeded random generation.

Every replicate r of a Monte-Carlo run draws from its own Philox stream
keyed by (seed, r), so a run is reproducible bit for bit regardless of
how replicates are scheduled over workers.
"""

import logging
from typing import TYPE_CHECKING, Any

import numpy as np

from lilbands.exceptions import ModelSpecError, SampleValidationError
from lilbands.models.enums import CdfKind
from lilbands.models.sample import RngKey, SortedSample, UniformOrderStats

if TYPE_CHECKING:
    from lilbands.models.cdf_model import CdfModel

logger = logging.getLogger(__name__)


def _order_stats_from(rng: np.random.Generator, n: int) -> np.ndarray:
    # (S_1, ..., S_n) / S_{n+1} for exponential partial sums S_i
    sums = np.cumsum(rng.standard_exponential(n + 1))
    return sums[:n] / sums[n]


def gen_uniform_order_stats(n: int, key: RngKey) -> UniformOrderStats:
    """Exact uniform order statistics from normalized exponential spacings, sorted by construction"""
    if n < 1:
        raise SampleValidationError(f"sample size must be positive, got n={n}")
    return UniformOrderStats(n=n, values=_order_stats_from(key.generator(), n))


def uniform_order_stats_matrix(n: int, seed: int, start: int, stop: int) -> np.ndarray:
    """Rows r = start..stop-1, each the order statistics of stream (seed, r)"""
    if n < 1:
        raise SampleValidationError(f"sample size must be positive, got n={n}")
    out = np.empty((stop - start, n))
    for row, stream in enumerate(range(start, stop)):
        out[row] = _order_stats_from(RngKey(seed=seed, stream_index=stream).generator(), n)
    return out


def gen_gaussian(n: int, key: RngKey) -> np.ndarray:
    """n independent standard normal variates"""
    return key.generator().standard_normal(n)


def _draw(rng: np.random.Generator, n: int, model: "CdfModel") -> np.ndarray:
    if model.kind is CdfKind.GAUSS_MIXTURE:
        # component coin, then a standard normal shifted by mu on heads
        coin = rng.random(n) < model.eps
        return np.sort(rng.standard_normal(n) + model.mu * coin)
    values = np.asarray(model.quantile(_order_stats_from(rng, n)), dtype=float)
    if not np.all(np.isfinite(values)):
        raise ModelSpecError(f"model {model.spec or model.kind.value} cannot be sampled by inversion")
    return values


def gen_sample(n: int, key: RngKey, model: "CdfModel") -> SortedSample:
    """Sorted draw of size n from model: inverse-CDF sampling, or by component for mixtures"""
    if n < 1:
        raise SampleValidationError(f"sample size must be positive, got n={n}")
    values = _draw(key.generator(), n, model)
    return SortedSample(n=n, values=values, ties_present=bool(np.any(np.diff(values) == 0.0)))


def sample_matrix(model: "CdfModel", n: int, seed: int, start: int, stop: int) -> np.ndarray:
    """Sorted draws from model for streams start..stop-1, one per row"""
    out = np.empty((stop - start, n))
    for row, stream in enumerate(range(start, stop)):
        out[row] = _draw(RngKey(seed=seed, stream_index=stream).generator(), n, model)
    return out


def ecdf_at(sample: SortedSample, x: Any) -> Any:
    """#{values <= x} / n"""
    count = np.searchsorted(sample.values, np.asarray(x, dtype=float), side="right")
    value = count / sample.n
    return float(value) if np.ndim(value) == 0 else value


def ecdf_left_at(sample: SortedSample, x: Any) -> Any:
    """#{values < x} / n, the left limit of ecdf_at"""
    count = np.searchsorted(sample.values, np.asarray(x, dtype=float), side="left")
    value = count / sample.n
    return float(value) if np.ndim(value) == 0 else value
