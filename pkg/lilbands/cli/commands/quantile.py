import json
import logging

from lilbands.cli.commands import emit, render_csv, render_json
from lilbands.cli.config import RunConfig
from lilbands.models.enums import OutputFormat
from lilbands.models.statistic import PenaltySpec
from lilbands.services import get_quantile_service

logger = logging.getLogger(__name__)

HEADER = ("family", "n", "nu", "alpha", "reps", "seed", "kappa", "std_err")


def run(config: RunConfig) -> int:
    """Critical value for one (family, n, nu, alpha), from the cache or freshly simulated"""
    assert config.n is not None
    table = get_quantile_service().get_or_estimate(
        config.family, config.n, PenaltySpec(nu=config.nu), config.alpha, config.reps, config.seed
    )
    if config.output_format() is OutputFormat.JSON:
        text = render_json(json.loads(table.model_dump_json()))
    else:
        row = (table.family.value,) + tuple(getattr(table, name) for name in HEADER[1:])
        text = render_csv(HEADER, [row])
    emit(text, config.out)
    return 0
