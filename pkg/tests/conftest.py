"""
Pytest configuration and fixtures for testing
"""

import pytest

from lilbands.models.enums import StatisticFamily
from lilbands.models.quantile_table import QuantileTable
from lilbands.models.statistic import PenaltySpec
from lilbands.services import set_runner
from lilbands.services.band_service import BandService
from lilbands.services.gof_service import GofService
from lilbands.services.limit_service import LimitService
from lilbands.services.mixture_service import MixtureService
from lilbands.services.monte_carlo import MonteCarloRunner
from lilbands.services.quantile_service import QuantileService


@pytest.fixture(autouse=True)
def reset_global_services():
    """The CLI installs global services; every test starts from fresh ones"""
    set_runner(MonteCarloRunner(threads=1, chunk_size=64))
    yield
    set_runner(MonteCarloRunner(threads=1, chunk_size=64))


@pytest.fixture
def runner():
    """In-process runner with small chunks"""
    return MonteCarloRunner(threads=1, chunk_size=64)


@pytest.fixture
def cache_dir(tmp_path):
    """Empty quantile table cache"""
    path = tmp_path / "cache"
    path.mkdir()
    return path


@pytest.fixture
def spec():
    return PenaltySpec(nu=1.1)


@pytest.fixture
def quantile_service(cache_dir, runner):
    return QuantileService(cache_dir=cache_dir, runner=runner)


@pytest.fixture
def band_service(runner):
    return BandService(runner)


@pytest.fixture
def gof_service(runner):
    return GofService(runner)


@pytest.fixture
def mixture_service(runner, gof_service, quantile_service):
    return MixtureService(runner, gof_service, quantile_service)


@pytest.fixture
def limit_service(runner):
    return LimitService(runner)


@pytest.fixture
def small_new_sup_table(quantile_service, spec):
    """Critical value of the supremum statistic for n = 30 from 400 replicates"""
    return quantile_service.estimate_quantile(StatisticFamily.NEW_SUP, 30, spec, 0.05, 400, 7)


@pytest.fixture
def fixed_table():
    """Hand-made table for tests that do not need a simulated kappa"""
    def make(family=StatisticFamily.NEW_SUP, n=30, nu=1.1, alpha=0.05, kappa=5.0, reps=1000, seed=1):
        return QuantileTable(family=family, n=n, nu=nu, alpha=alpha, reps=reps, seed=seed, kappa=kappa, std_err=0.01)
    return make
