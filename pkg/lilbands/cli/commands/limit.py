import logging

from lilbands.cli.commands import emit, render_csv, render_json
from lilbands.cli.config import RunConfig
from lilbands.models.enums import OutputFormat, TailProcess
from lilbands.models.limit import TailBoundParams
from lilbands.models.statistic import PenaltySpec
from lilbands.services import get_limit_service, get_quantile_service

logger = logging.getLogger(__name__)

HEADER = ("nu", "alpha", "m", "reps", "seed", "kappa", "std_err", "kappa_2m", "std_err_2m", "sensitivity")
TAIL_HEADER = ("process", "eta", "exceedances", "frequency", "ucl", "bound", "passed")
TAIL_CHECK_REPS = 2000


def run(config: RunConfig) -> int:
    """Limit quantile at m and 2m; with --tail-check, the window tail checks as a second block"""
    service = get_limit_service()
    report = service.limit_report(PenaltySpec(nu=config.nu), config.alpha, config.m, config.reps, config.seed)
    get_quantile_service().store_table(report.table)
    table = report.table
    summary = (config.nu, config.alpha, config.m, table.reps, table.seed, table.kappa, table.std_err,
               report.kappa_2m, report.std_err_2m, report.sensitivity)

    checks = []
    if config.tail_check:
        params = TailBoundParams()
        reps = min(config.reps, TAIL_CHECK_REPS)
        checks = [service.tail_check(process, params, reps, config.seed) for process in TailProcess]
        for check in checks:
            logger.info("%s tail check %s", check.process.value, "passed" if check.passed else "failed")

    tail_rows = [
        (check.process.value, row.eta, row.exceedances, row.frequency, row.ucl, row.bound, row.passed)
        for check in checks
        for row in check.rows
    ]
    if config.output_format() is OutputFormat.JSON:
        payload = {"limit": dict(zip(HEADER, summary))}
        if config.tail_check:
            payload["tail_checks"] = [dict(zip(TAIL_HEADER, row)) for row in tail_rows]
        text = render_json(payload)
    else:
        text = render_csv(HEADER, [summary])
        if config.tail_check:
            text += "\n" + render_csv(TAIL_HEADER, tail_rows)
    emit(text, config.out)
    return 0
