from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Optional, Tuple
import logging

import numpy as np

from lilbands.core.config import settings
from lilbands.core.sampling import uniform_order_stats_matrix
from lilbands.core.statistics import batch_statistic
from lilbands.models.enums import StatisticFamily

logger = logging.getLogger(__name__)

ChunkFn = Callable[[int, int], np.ndarray]


def statistic_chunk(family: StatisticFamily, n: int, nu: float, seed: int, start: int, stop: int) -> np.ndarray:
    """Statistic of the uniform samples drawn from streams start..stop-1"""
    return batch_statistic(family, uniform_order_stats_matrix(n, seed, start, stop), nu)


class MonteCarloRunner:
    """
    Runs replicates 0..reps-1 in fixed-size chunks of stream indices.

    chunk_fn(start, stop) must be picklable (a module-level function or a
    functools.partial of one) and return one row per replicate. Chunk results
    are concatenated in stream order, so the output does not depend on the
    number of workers.
    """

    def __init__(self, threads: Optional[int] = None, chunk_size: Optional[int] = None):
        self.threads = max(1, threads or settings.DEFAULT_THREADS)
        self.chunk_size = max(1, chunk_size or settings.MC_CHUNK_SIZE)

    def chunks(self, reps: int) -> List[Tuple[int, int]]:
        return [(start, min(start + self.chunk_size, reps)) for start in range(0, reps, self.chunk_size)]

    def run(self, chunk_fn: ChunkFn, reps: int) -> np.ndarray:
        if reps < 1:
            raise ValueError(f"reps must be positive, got {reps}")
        bounds = self.chunks(reps)
        starts = [start for start, _ in bounds]
        stops = [stop for _, stop in bounds]

        if self.threads == 1 or len(bounds) == 1:
            logger.debug("Running %d replicates in %d chunks in-process", reps, len(bounds))
            parts = [chunk_fn(start, stop) for start, stop in bounds]
        else:
            logger.debug("Running %d replicates in %d chunks on %d workers", reps, len(bounds), self.threads)
            with ProcessPoolExecutor(max_workers=self.threads) as pool:
                parts = list(pool.map(chunk_fn, starts, stops))

        return np.concatenate(parts, axis=0)
