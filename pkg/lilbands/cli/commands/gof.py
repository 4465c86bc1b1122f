import json
import logging

from lilbands.cli.commands import emit, render_csv, render_json
from lilbands.cli.config import RunConfig
from lilbands.models.enums import OutputFormat, StatisticFamily
from lilbands.models.sample import SortedSample
from lilbands.models.statistic import PenaltySpec
from lilbands.services import get_gof_service, get_quantile_service
from lilbands.utils.io_utils import read_data_file
from lilbands.utils.model_spec import parse_model_spec

logger = logging.getLogger(__name__)


def run(config: RunConfig) -> int:
    """
    Test the data in --input against --cdf. The decision is part of the
    report, so a rejection still exits 0.
    """
    assert config.input is not None
    model = parse_model_spec(config.cdf)
    data = SortedSample.from_values(read_data_file(config.input, column=config.column))
    spec = PenaltySpec(nu=config.nu)
    table = get_quantile_service().get_or_estimate(
        StatisticFamily.NEW_SUP, data.n, spec, config.alpha, config.reps, config.seed
    )
    report = get_gof_service().gof_test(data, model, spec, config.alpha, table, config.pvalue_reps, config.seed)

    payload = json.loads(report.model_dump_json())
    if config.output_format(default=OutputFormat.JSON) is OutputFormat.JSON:
        text = render_json(payload)
    else:
        header = tuple(payload)
        text = render_csv(header, [tuple(getattr(report, name) for name in header)])
    emit(text, config.out)
    return 0
