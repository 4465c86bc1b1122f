import io
import logging

from lilbands.cli.commands import emit, render_json
from lilbands.cli.config import RunConfig
from lilbands.models.enums import OutputFormat
from lilbands.models.statistic import PenaltySpec
from lilbands.services import get_band_service, get_quantile_service

logger = logging.getLogger(__name__)


def run(config: RunConfig) -> int:
    """Band limits a_nj, b_nj for j = 0..n calibrated by the method's quantile table"""
    assert config.n is not None
    spec = PenaltySpec(nu=config.nu)
    table = get_quantile_service().get_or_estimate(
        config.method.family, config.n, spec, config.alpha, config.reps, config.seed
    )
    band_service = get_band_service()
    band = band_service.band_from_table(config.method, table, spec)
    logger.info("%s band for n=%d from kappa=%s", band.method.value, band.n, band.kappa_used)

    if config.output_format() is OutputFormat.JSON:
        columns = {"j": list(range(band.n + 1)), "s_nj": band.s_nj.tolist()}
        if not config.centered:
            columns.update(lower=band.lower.tolist(), upper=band.upper.tolist())
        columns.update(centered_lower=band.centered_lower.tolist(), centered_upper=band.centered_upper.tolist())
        payload = {
            "method": band.method.value,
            "n": band.n,
            "nu": band.nu,
            "alpha": band.alpha,
            "kappa": band.kappa_used,
            "saturated": band.saturated,
            "columns": columns,
        }
        text = render_json(payload)
    else:
        buffer = io.StringIO(newline="\n")
        band_service.export_band_csv(band, buffer, centered_only=config.centered)
        text = buffer.getvalue()
    emit(text, config.out)
    return 0
