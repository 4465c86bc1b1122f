"""
Tests for the Brownian bridge limit and the sub-exponential tail checks
"""

import math
from functools import partial

import numpy as np
import pytest
from scipy import stats

from lilbands.exceptions import ConvergenceError, DomainError
from lilbands.models.enums import StatisticFamily, TailProcess
from lilbands.models.limit import BridgePath, TailBoundParams
from lilbands.models.sample import RngKey
from lilbands.models.statistic import PenaltySpec
from lilbands.services.limit_service import LimitService, argmax_chunk, clopper_pearson_upper, limit_chunk, logit_grid
from lilbands.services.monte_carlo import MonteCarloRunner, statistic_chunk


class TestGrid:
    def test_three_points(self):
        np.testing.assert_allclose(logit_grid(3), [1 / 13, 0.5, 12 / 13], rtol=1e-12)

    def test_symmetric_and_increasing(self):
        t = logit_grid(1000)
        assert np.all(np.diff(t) > 0.0)
        np.testing.assert_allclose(t, 1.0 - t[::-1], atol=1e-15)

    def test_rejects_tiny_grid(self):
        with pytest.raises(DomainError):
            logit_grid(2)


class TestBridge:
    """simulate_bridge produces Brownian bridge marginals"""

    def test_path_is_reproducible(self, limit_service):
        first = limit_service.simulate_bridge(50, RngKey(seed=3, stream_index=4))
        second = limit_service.simulate_bridge(50, RngKey(seed=3, stream_index=4))
        np.testing.assert_array_equal(first.values, second.values)

    def test_covariance(self, limit_service):
        """Var U(t) = t(1 - t) and Cov(U(s), U(t)) = s(1 - t) for s < t"""
        m = 21
        paths = np.array([limit_service.simulate_bridge(m, RngKey(seed=5, stream_index=k)).values for k in range(3000)])
        t = logit_grid(m)
        center = m // 2
        assert np.var(paths[:, center]) == pytest.approx(0.25, rel=0.1)
        s_idx, t_idx = 7, 15
        cov = np.cov(paths[:, s_idx], paths[:, t_idx])[0, 1]
        assert cov == pytest.approx(t[s_idx] * (1 - t[t_idx]), abs=0.02)

    def test_stat_on_known_path(self, limit_service):
        path = BridgePath(grid=np.array([0.25, 0.5, 0.75]), values=np.array([0.0, 0.5, 0.0]))
        result = limit_service.stat_limit(path, PenaltySpec(nu=1.1))
        assert result.value == pytest.approx(0.5)
        assert result.argmax_index == 1
        assert result.argmax_location == 0.5
        assert result.family is StatisticFamily.LIMIT

    def test_path_validation(self):
        with pytest.raises(ValueError):
            BridgePath(grid=np.array([0.5, 0.25]), values=np.zeros(2))


class TestLimitQuantile:
    def test_estimate(self, limit_service, spec):
        table = limit_service.estimate_limit_quantile(spec, 0.05, 200, 400, 9)
        assert table.family is StatisticFamily.LIMIT
        assert table.n == 200
        assert table.nu == 1.1
        assert 1.5 < table.kappa < 8.0

    def test_independent_of_workers(self, spec):
        serial = LimitService(MonteCarloRunner(threads=1, chunk_size=32)).sample_limit_statistic(spec, 100, 64, 2)
        parallel = LimitService(MonteCarloRunner(threads=2, chunk_size=32)).sample_limit_statistic(spec, 100, 64, 2)
        np.testing.assert_array_equal(serial, parallel)

    def test_report_sensitivity(self, limit_service, spec):
        report = limit_service.limit_report(spec, 0.1, 100, 200, 4)
        assert report.sensitivity == report.kappa_2m - report.table.kappa
        assert report.table.n == 100

    def test_rejects_few_replicates(self, limit_service, spec):
        with pytest.raises(DomainError):
            limit_service.estimate_limit_quantile(spec, 0.05, 100, 50, 1)

    def test_argmax_stays_away_from_edges(self, limit_service, spec):
        fraction = limit_service.argmax_edge_fraction(spec, 200, 300, 6)
        assert 0.0 <= fraction < 0.5

    def test_chunks_reduce_single_paths(self, limit_service, spec):
        """Chunk maxima and their positions equal stat_limit on the same paths"""
        maxima = limit_chunk(300, spec.nu, 9, 3, 8)
        index = argmax_chunk(300, spec.nu, 9, 3, 8)
        for row, stream in enumerate(range(3, 8)):
            path = limit_service.simulate_bridge(300, RngKey(seed=9, stream_index=stream))
            result = limit_service.stat_limit(path, spec)
            assert maxima[row] == result.value
            assert index[row] == result.argmax_index


@pytest.mark.slow
class TestConvergence:
    def test_order_statistic_form_near_limit(self, runner, limit_service, spec):
        """Two-sample KS distance between n = 8000 and the grid limit at m = 10^5, 5000 replicates each"""
        finite = runner.run(partial(statistic_chunk, StatisticFamily.NEW_ORDERSTAT, 8000, spec.nu, 20140301), 5000)
        limit = limit_service.sample_limit_statistic(spec, 100_000, 5000, 20140302)
        assert stats.ks_2samp(finite, limit).statistic <= 0.03


class TestTailChecks:
    """Exceedance frequencies against M exp(-L(c) eta)"""

    def test_clopper_pearson(self):
        assert clopper_pearson_upper(0, 100) == pytest.approx(stats.beta.ppf(0.99, 1, 100))
        assert clopper_pearson_upper(0, 100) == pytest.approx(1 - 0.01 ** (1 / 100))
        assert clopper_pearson_upper(100, 100) == 1.0

    def test_bound(self):
        params = TailBoundParams()
        assert params.bound(4.0) == pytest.approx(2.0 * math.exp(-4.0 * math.exp(-1.0)))

    @pytest.mark.parametrize("process", list(TailProcess))
    def test_default_window_passes(self, limit_service, process):
        result = limit_service.tail_check(process, TailBoundParams(), 500, 3, n=100)
        assert result.passed
        assert [row.eta for row in result.rows] == [2.0, 4.0, 6.0]
        assert result.n == (None if process is TailProcess.BRIDGE_SQ else 100)
        assert all(row.frequency <= row.ucl for row in result.rows)

    def test_empty_window_has_no_exceedances(self, limit_service):
        """No t_ni falls in a window beyond n / (n + 1)"""
        params = TailBoundParams(a=10.0, c=0.0)
        result = limit_service.tail_check(TailProcess.EP_ORDERSTAT, params, 200, 1, n=200)
        assert all(row.exceedances == 0 for row in result.rows)

    def test_failure_is_reported(self, limit_service, caplog):
        """A bound just below 1 at a tiny threshold cannot hold"""
        params = TailBoundParams(m_const=1.0, c=10.0, eta=[0.01])
        result = limit_service.tail_check(TailProcess.BRIDGE_SQ, params, 200, 2)
        assert not result.passed
        assert result.rows[0].exceedances == 200
        assert "tail check failed" in caplog.text

    def test_rejects_bad_eta(self):
        with pytest.raises(ValueError):
            TailBoundParams(eta=[])


class TestExponentialFit:
    def test_recovers_unit_rate(self, limit_service):
        samples = np.random.default_rng(0).exponential(size=20000)
        fit = limit_service.fit_exponential_tail(samples, 0.5, 4.0, 8)
        assert fit.l_o == pytest.approx(1.0, abs=0.1)
        assert fit.m_o == pytest.approx(1.0, abs=0.15)

    def test_too_few_exceedances(self, limit_service):
        with pytest.raises(ConvergenceError):
            limit_service.fit_exponential_tail(np.linspace(0.0, 1.0, 100))
