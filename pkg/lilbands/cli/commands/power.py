from functools import partial
from typing import List, Tuple
import logging

from lilbands.cli.commands import emit, render_csv, render_json
from lilbands.cli.config import RunConfig
from lilbands.models.enums import OutputFormat
from lilbands.models.mixture import PowerRow
from lilbands.models.statistic import PenaltySpec
from lilbands.services import get_mixture_service
from lilbands.services.mixture_service import (
    Calibration,
    calibrate_dense,
    calibrate_explicit,
    calibrate_sparse,
    detection_boundary,
)

logger = logging.getLogger(__name__)

DEFAULT_SPARSE_S = (0.5, 1.25)
HEADER = ("n", "eps", "mu", "delta_n", "rejection_rate", "se")


def calibrations(config: RunConfig) -> Tuple[List[Calibration], bool]:
    """Calibrations to run and whether they are sparse (one per s exponent)"""
    if config.eps is not None:
        mu = config.mu if config.mu is not None else 0.0
        return [partial(calibrate_explicit, eps=config.eps, mu=mu)], False
    assert config.beta is not None
    if config.r is not None:
        logger.info("Dense calibration: beta=%s r=%s, boundary r*=%s", config.beta, config.r,
                    detection_boundary(config.beta))
        return [partial(calibrate_dense, beta=config.beta, r=config.r)], False
    exponents = config.sparse_s or list(DEFAULT_SPARSE_S)
    return [partial(calibrate_sparse, beta=config.beta, s_exp=s) for s in exponents], True


def run(config: RunConfig) -> int:
    """Delta_n and rejection rate of the new test against Phi over the n-grid"""
    service = get_mixture_service()
    spec = PenaltySpec(nu=config.nu)
    plans, sparse = calibrations(config)
    rows: List[PowerRow] = []
    for calibration in plans:
        rows.extend(
            service.power_grid(calibration, config.n_grid, spec, config.alpha, config.power_reps, config.seed, config.reps)
        )

    header = HEADER + ("s_exp",) if sparse else HEADER
    if config.output_format() is OutputFormat.JSON:
        text = render_json([{name: getattr(row, name) for name in header} for row in rows])
    else:
        text = render_csv(header, [tuple(getattr(row, name) for name in header) for row in rows])
    emit(text, config.out)
    return 0
