"""
Services module initialization
"""

from lilbands.core.config import settings
from lilbands.services.band_service import BandService
from lilbands.services.gof_service import GofService
from lilbands.services.limit_service import LimitService
from lilbands.services.mixture_service import MixtureService
from lilbands.services.monte_carlo import MonteCarloRunner
from lilbands.services.quantile_service import QuantileService

# Global service instances
_runner: MonteCarloRunner | None = None
_quantile_service: QuantileService | None = None
_band_service: BandService | None = None
_gof_service: GofService | None = None
_mixture_service: MixtureService | None = None
_limit_service: LimitService | None = None


def get_runner() -> MonteCarloRunner:
    """Get the global Monte-Carlo runner (singleton)"""
    global _runner
    if _runner is None:
        _runner = MonteCarloRunner(threads=settings.DEFAULT_THREADS, chunk_size=settings.MC_CHUNK_SIZE)
    return _runner


def set_runner(runner: MonteCarloRunner) -> None:
    """Replace the global runner and drop services built on the old one"""
    global _runner, _quantile_service, _band_service, _gof_service, _mixture_service, _limit_service
    _runner = runner
    _quantile_service = _band_service = _gof_service = _mixture_service = _limit_service = None


def get_quantile_service() -> QuantileService:
    global _quantile_service
    if _quantile_service is None:
        _quantile_service = QuantileService(runner=get_runner())
    return _quantile_service


def set_quantile_service(service: QuantileService) -> None:
    global _quantile_service
    _quantile_service = service


def get_band_service() -> BandService:
    global _band_service
    if _band_service is None:
        _band_service = BandService(get_runner())
    return _band_service


def get_gof_service() -> GofService:
    global _gof_service
    if _gof_service is None:
        _gof_service = GofService(get_runner())
    return _gof_service


def get_mixture_service() -> MixtureService:
    global _mixture_service
    if _mixture_service is None:
        _mixture_service = MixtureService(get_runner(), get_gof_service(), get_quantile_service())
    return _mixture_service


def get_limit_service() -> LimitService:
    global _limit_service
    if _limit_service is None:
        _limit_service = LimitService(get_runner())
    return _limit_service
