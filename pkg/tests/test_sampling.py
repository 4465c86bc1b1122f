"""
Tests for seeded generation of order statistics and samples
"""

import numpy as np
import pytest
from scipy import stats

from lilbands.core.sampling import (
    ecdf_at,
    ecdf_left_at,
    gen_gaussian,
    gen_sample,
    gen_uniform_order_stats,
    sample_matrix,
    uniform_order_stats_matrix,
)
from lilbands.exceptions import SampleValidationError
from lilbands.models.cdf_model import CdfModel
from lilbands.models.sample import RngKey, SortedSample


class TestRngKey:
    """Philox streams addressed by (seed, stream_index)"""

    def test_same_key_same_stream(self):
        key = RngKey(seed=42, stream_index=3)
        np.testing.assert_array_equal(key.generator().random(5), RngKey(seed=42, stream_index=3).generator().random(5))

    def test_streams_differ(self):
        """Neighbouring stream indices and seeds give different draws"""
        a = RngKey(seed=42, stream_index=0).generator().random(5)
        b = RngKey(seed=42, stream_index=1).generator().random(5)
        c = RngKey(seed=43, stream_index=0).generator().random(5)
        assert not np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_rejects_negative_seed(self):
        with pytest.raises(ValueError):
            RngKey(seed=-1)


class TestUniformOrderStats:
    """gen_uniform_order_stats and the replicate matrix"""

    def test_sorted_inside_unit_interval(self):
        u = gen_uniform_order_stats(200, RngKey(seed=1))
        assert u.n == 200
        assert np.all(np.diff(u.values) >= 0.0)
        assert np.all((u.values > 0.0) & (u.values < 1.0))

    def test_matrix_rows_match_single_draws(self):
        """Row r of the matrix is the draw of stream r, whatever the chunk start"""
        matrix = uniform_order_stats_matrix(10, 5, 3, 6)
        for row, stream in enumerate(range(3, 6)):
            single = gen_uniform_order_stats(10, RngKey(seed=5, stream_index=stream))
            np.testing.assert_array_equal(matrix[row], single.values)

    def test_marginal_law(self):
        """U_{n:i} ~ Beta(i, n + 1 - i): the median order statistic averages 1/2"""
        matrix = uniform_order_stats_matrix(5, 9, 0, 4000)
        assert matrix[:, 2].mean() == pytest.approx(0.5, abs=0.01)
        pvalue = stats.kstest(matrix[:, 0], stats.beta(1, 5).cdf).pvalue
        assert pvalue > 1e-4

    def test_rejects_empty_sample(self):
        with pytest.raises(SampleValidationError):
            gen_uniform_order_stats(0, RngKey(seed=1))


class TestModelSamples:
    """gen_sample, sample_matrix and the Gaussian helper"""

    def test_gaussian_is_reproducible(self):
        key = RngKey(seed=8, stream_index=2)
        np.testing.assert_array_equal(gen_gaussian(50, key), gen_gaussian(50, key))

    def test_normal_sample_is_sorted(self):
        sample = gen_sample(100, RngKey(seed=2), CdfModel.std_normal())
        assert sample.n == 100
        assert np.all(np.diff(sample.values) >= 0.0)
        assert not sample.ties_present

    def test_model_sample_delegates(self):
        """CdfModel.sample draws the same values as gen_sample"""
        model = CdfModel.mixture(0.2, 3.0)
        key = RngKey(seed=4, stream_index=1)
        np.testing.assert_array_equal(model.sample(30, key).values, gen_sample(30, key, model).values)

    def test_mixture_fraction(self):
        """About eps of a well-separated mixture lies near mu"""
        values = sample_matrix(CdfModel.mixture(0.3, 12.0), 1000, 6, 0, 1).ravel()
        assert np.mean(values > 6.0) == pytest.approx(0.3, abs=0.05)

    def test_uniform_model_matches_order_stats(self):
        """Inverse-CDF sampling of the uniform model reproduces the order statistics"""
        key = RngKey(seed=12, stream_index=0)
        np.testing.assert_allclose(
            gen_sample(20, key, CdfModel.uniform()).values, gen_uniform_order_stats(20, key).values
        )


class TestEcdf:
    def test_right_and_left_limits(self):
        sample = SortedSample.from_values([3.0, 1.0, 2.0, 2.0])
        assert sample.ties_present
        assert ecdf_at(sample, 2.0) == 0.75
        assert ecdf_left_at(sample, 2.0) == 0.25
        np.testing.assert_array_equal(ecdf_at(sample, [0.0, 5.0]), [0.0, 1.0])
