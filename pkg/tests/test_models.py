"""
Tests for the pydantic models, the CDF model grammar and the run configuration
"""

import math
from pathlib import Path

import numpy as np
import pytest
from pydantic import ValidationError

from lilbands.cli.config import RunConfig
from lilbands.exceptions import ModelSpecError
from lilbands.models.cdf_model import CdfModel
from lilbands.models.enums import BandMethod, CdfKind, OutputFormat, StatisticFamily
from lilbands.models.special import BetaParams, PenaltyValue
from lilbands.models.statistic import GridPoint, PenaltySpec, StatisticResult
from lilbands.utils.model_spec import parse_model_spec


class TestEnums:
    def test_band_method_family(self):
        assert BandMethod.NEW.family is StatisticFamily.NEW_ORDERSTAT
        assert BandMethod.BJO.family is StatisticFamily.BERK_JONES
        assert BandMethod.KS.family is StatisticFamily.KS
        assert BandMethod.UI.family is StatisticFamily.UNION_INTERSECTION

    def test_family_flags(self):
        assert StatisticFamily.NEW_SUP.uses_nu
        assert not StatisticFamily.KS.uses_nu
        assert StatisticFamily.UNION_INTERSECTION.lower_tail
        assert not StatisticFamily.BERK_JONES.lower_tail


class TestSmallModels:
    def test_penalty_spec_needs_nu_above_one(self):
        assert PenaltySpec().nu == 1.1
        with pytest.raises(ValidationError):
            PenaltySpec(nu=1.0)

    def test_grid_point(self):
        point = GridPoint(n=4, j=2)
        assert point.t_nj == 0.4
        assert point.s_nj == 0.5
        with pytest.raises(ValidationError):
            GridPoint(n=4, j=5)

    def test_statistic_result_must_be_finite(self):
        with pytest.raises(ValidationError):
            StatisticResult(value=math.inf, argmax_location=0.5, argmax_index=1, family=StatisticFamily.KS)

    def test_penalty_value_relations(self):
        with pytest.raises(ValidationError):
            PenaltyValue(c_val=1.0, d_val=0.1, gamma_cap=2.0)

    def test_beta_params(self):
        assert BetaParams.order_statistic(10, 3) == BetaParams(shape_a=3, shape_b=8)
        params = BetaParams.from_mean_and_size(0.25, 8.0)
        assert (params.shape_a, params.shape_b) == (2.0, 6.0)
        with pytest.raises(ValidationError):
            BetaParams(shape_a=0.0, shape_b=1.0)


class TestCdfModel:
    """Evaluation, tails and quantiles of the hypothesized CDFs"""

    def test_normal(self):
        model = CdfModel.std_normal()
        assert model.cdf(0.0) == 0.5
        assert model.quantile(0.975) == pytest.approx(1.959964, abs=1e-6)
        assert model.sf(40.0) > 0.0

    def test_uniform(self):
        model = CdfModel.uniform()
        np.testing.assert_array_equal(model.cdf([-1.0, 0.3, 2.0]), [0.0, 0.3, 1.0])
        assert model.quantile(0.3) == 0.3

    def test_mixture_quantile_inverts_cdf(self):
        model = CdfModel.mixture(0.1, 3.0)
        p = np.array([1e-6, 0.2, 0.5, 0.9, 0.999])
        np.testing.assert_allclose(model.cdf(model.quantile(p)), p, rtol=1e-9)

    def test_mixture_log_tails(self):
        model = CdfModel.mixture(0.2, 2.0)
        x = np.array([-3.0, 0.0, 4.0])
        np.testing.assert_allclose(model.logcdf(x), np.log(model.cdf(x)), rtol=1e-12)
        np.testing.assert_allclose(model.logsf(x), np.log(model.sf(x)), rtol=1e-12)

    def test_tabulated(self):
        model = CdfModel.tabulated([0.0, 1.0, 3.0], [0.0, 0.5, 1.0])
        assert model.cdf(2.0) == 0.75
        assert model.quantile(0.75) == 2.0
        with pytest.raises(ModelSpecError):
            model.cdf(4.0)

    def test_tabulated_validation(self):
        with pytest.raises(ValidationError):
            CdfModel.tabulated([0.0, 0.0], [0.0, 1.0])
        with pytest.raises(ValidationError):
            CdfModel.tabulated([0.0, 1.0], [0.6, 0.5])

    def test_quantile_rejects_probability(self):
        with pytest.raises(ModelSpecError):
            CdfModel.std_normal().quantile(1.5)


class TestModelSpecGrammar:
    """parse_model_spec"""

    def test_named_models(self):
        assert parse_model_spec("normal").kind is CdfKind.STD_NORMAL
        assert parse_model_spec(" uniform ").kind is CdfKind.UNIFORM01

    def test_mixture(self):
        model = parse_model_spec("mixture:0.05:10")
        assert model.kind is CdfKind.GAUSS_MIXTURE
        assert (model.eps, model.mu) == (0.05, 10.0)

    def test_zero_weight_mixture_is_normal(self):
        assert parse_model_spec("mixture:0.0:1.0") == parse_model_spec("normal")

    @pytest.mark.parametrize(
        "spec", ["mixture:1.0:2", "mixture:-0.1:2", "mixture:0.1", "mixture:a:b", "gamma", "normal:1", "table:"]
    )
    def test_invalid(self, spec):
        with pytest.raises(ModelSpecError):
            parse_model_spec(spec)

    def test_table(self, tmp_path):
        path = tmp_path / "knots.csv"
        path.write_text("x,p\n-1,0\n0,0.5\n1,1\n", encoding="utf-8")
        model = parse_model_spec(f"table:{path}")
        assert model.kind is CdfKind.TABULATED
        assert model.cdf(0.5) == 0.75

    def test_table_without_p_column(self, tmp_path):
        path = tmp_path / "knots.csv"
        path.write_text("x,q\n-1,0\n1,1\n", encoding="utf-8")
        with pytest.raises(ModelSpecError):
            parse_model_spec(f"table:{path}")

    def test_table_not_monotone(self, tmp_path):
        path = tmp_path / "knots.csv"
        path.write_text("x,p\n-1,0.6\n1,0.5\n", encoding="utf-8")
        with pytest.raises(ModelSpecError):
            parse_model_spec(f"table:{path}")


class TestRunConfig:
    """Cross-field validation of the command line"""

    def test_defaults_come_from_settings(self):
        config = RunConfig(subcommand="quantile", n=10)
        assert config.nu == 1.1
        assert config.alpha == 0.05
        assert config.family is StatisticFamily.NEW_SUP
        assert config.output_format() is OutputFormat.CSV
        assert config.output_format(OutputFormat.JSON) is OutputFormat.JSON

    def test_explicit_format_wins(self):
        config = RunConfig(subcommand="gof", input=Path("x.txt"), format="csv")
        assert config.output_format(OutputFormat.JSON) is OutputFormat.CSV

    @pytest.mark.parametrize(
        "values",
        [
            {"subcommand": "quantile"},
            {"subcommand": "band"},
            {"subcommand": "gof"},
            {"subcommand": "power"},
            {"subcommand": "power", "eps": 0.1, "beta": 0.6},
            {"subcommand": "power", "beta": 0.6, "r": 0.3, "sparse_s": [0.5]},
            {"subcommand": "power", "eps": 0.1, "n_grid": [1]},
            {"subcommand": "power", "beta": 0.6, "sparse_s": [0.0]},
            {"subcommand": "quantile", "n": 10, "nu": 1.0},
            {"subcommand": "quantile", "n": 10, "reps": 10},
            {"subcommand": "quantile", "n": 10, "alpha": 1.0},
            {"subcommand": "shuffle"},
        ],
    )
    def test_invalid(self, values):
        with pytest.raises(ValidationError):
            RunConfig(**values)

    def test_power_modes(self):
        assert RunConfig(subcommand="power", eps=0.05, mu=10.0).eps == 0.05
        assert RunConfig(subcommand="power", beta=0.6, r=0.3).r == 0.3
        assert RunConfig(subcommand="power", beta=0.7).sparse_s == []
