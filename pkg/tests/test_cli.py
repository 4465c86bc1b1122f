"""
End-to-end tests of the lilbands command line
"""

import json
import logging

import pytest

from lilbands.cli.main import EXIT_INVALID, EXIT_IO, EXIT_OK, build_parser, main

GOF_DATA = "\n".join(str(v) for v in [-1.2, -0.8, -0.5, -0.3, -0.1, 0.0, 0.2, 0.4, 0.7, 1.1, 1.6, -1.9]) + "\n"


@pytest.fixture(autouse=True)
def restore_logging():
    """main() configures logging; keep its handlers from leaking into other tests"""
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    for handler in root.handlers:
        if handler not in handlers:
            root.removeHandler(handler)
    root.setLevel(level)


@pytest.fixture
def common(cache_dir):
    return ["--cache-dir", str(cache_dir), "--reps", "200", "--seed", "1", "--threads", "1"]


@pytest.fixture
def data_file(tmp_path):
    path = tmp_path / "data.txt"
    path.write_text("# twelve observations\n" + GOF_DATA, encoding="utf-8")
    return path


class TestParser:
    def test_help(self, capsys):
        with pytest.raises(SystemExit) as exc_info:
            main(["--help"])
        assert exc_info.value.code == 0
        assert "quantile" in capsys.readouterr().out

    def test_unknown_flag(self):
        with pytest.raises(SystemExit) as exc_info:
            main(["quantile", "--n", "10", "--bogus"])
        assert exc_info.value.code == 2

    def test_bad_list(self):
        with pytest.raises(SystemExit) as exc_info:
            build_parser().parse_args(["power", "--n-grid", "10,x"])
        assert exc_info.value.code == 2

    def test_subcommand_required(self):
        with pytest.raises(SystemExit):
            main([])


class TestQuantileCommand:
    def test_csv(self, capsys, common, cache_dir):
        assert main(["quantile", "--n", "10", "--family", "ks"] + common) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "family,n,nu,alpha,reps,seed,kappa,std_err"
        assert lines[1].startswith("ks,10,0,0.05,200,1,")
        assert (cache_dir / "ks_n10_nu0_a0.05.json").exists()

    def test_json(self, capsys, common):
        assert main(["quantile", "--n", "10", "--format", "json"] + common) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["family"] == "new-sup"
        assert payload["nu"] == 1.1
        assert payload["reps"] == 200

    def test_rerun_is_identical(self, capsys, common, tmp_path):
        """Same seed with a fresh cache reproduces the output byte for byte"""
        assert main(["quantile", "--n", "12"] + common) == EXIT_OK
        first = capsys.readouterr().out
        other = ["--cache-dir", str(tmp_path / "other")] + common[2:]
        assert main(["quantile", "--n", "12"] + other) == EXIT_OK
        assert capsys.readouterr().out == first

    def test_missing_n(self, capsys, common):
        assert main(["quantile"] + common) == EXIT_INVALID
        assert "needs --n" in capsys.readouterr().err

    def test_too_few_reps(self, cache_dir):
        assert main(["quantile", "--n", "10", "--reps", "50", "--cache-dir", str(cache_dir)]) == EXIT_INVALID

    def test_corrupt_cache(self, common, cache_dir):
        (cache_dir / "ks_n10_nu0_a0.05.json").write_text("{", encoding="utf-8")
        assert main(["quantile", "--n", "10", "--family", "ks"] + common) == EXIT_IO

    def test_out_file(self, capsys, common, tmp_path):
        target = tmp_path / "kappa.csv"
        assert main(["quantile", "--n", "10", "--out", str(target)] + common) == EXIT_OK
        assert capsys.readouterr().out == ""
        assert target.read_text(encoding="utf-8").startswith("family,")


class TestBandCommand:
    def test_full_csv(self, capsys, common):
        assert main(["band", "--n", "10", "--method", "ks"] + common) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "j,s_nj,lower,upper,centered_lower,centered_upper"
        assert len(lines) == 12

    def test_centered_csv(self, capsys, common):
        assert main(["band", "--n", "10", "--centered"] + common) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "j,s_nj,centered_lower,centered_upper"
        assert lines[1].startswith("0,0,0,")

    def test_json(self, capsys, common):
        assert main(["band", "--n", "8", "--method", "ui", "--format", "json"] + common) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["method"] == "ui"
        assert payload["nu"] is None
        assert len(payload["columns"]["upper"]) == 9
        assert payload["columns"]["lower"][0] == 0.0


class TestGofCommand:
    def test_json_report(self, capsys, common, data_file):
        args = ["gof", "--input", str(data_file), "--pvalue-reps", "99"] + common
        assert main(args) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["n"] == 12
        assert report["model"] == "normal"
        assert 0.0 < report["p_value"] <= 1.0
        assert report["reject"] == (report["statistic"] > report["kappa"])

    def test_csv_report(self, capsys, common, data_file):
        args = ["gof", "--input", str(data_file), "--pvalue-reps", "99", "--format", "csv"] + common
        assert main(args) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].startswith("statistic,kappa,p_value,reject,")
        assert len(lines) == 2

    def test_zero_weight_mixture_matches_normal(self, capsys, common, data_file):
        base = ["gof", "--input", str(data_file), "--pvalue-reps", "99"] + common
        assert main(base + ["--cdf", "normal"]) == EXIT_OK
        normal = capsys.readouterr().out
        assert main(base + ["--cdf", "mixture:0.0:1.0"]) == EXIT_OK
        assert capsys.readouterr().out == normal

    def test_column_input(self, capsys, common, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("id,x\n" + "".join(f"{i},{v}\n" for i, v in enumerate(GOF_DATA.split())), encoding="utf-8")
        assert main(["gof", "--input", str(path), "--column", "x", "--pvalue-reps", "99"] + common) == EXIT_OK
        assert json.loads(capsys.readouterr().out)["n"] == 12

    def test_empty_input(self, common, tmp_path):
        path = tmp_path / "empty.txt"
        path.write_text("# nothing here\n", encoding="utf-8")
        assert main(["gof", "--input", str(path)] + common) == EXIT_INVALID

    def test_bad_model(self, common, data_file):
        assert main(["gof", "--input", str(data_file), "--cdf", "gamma:2"] + common) == EXIT_INVALID

    def test_missing_file(self, common, tmp_path):
        assert main(["gof", "--input", str(tmp_path / "absent.txt")] + common) == EXIT_IO


class TestPowerCommand:
    def test_explicit_mixture(self, capsys, common):
        args = ["power", "--eps", "0.3", "--mu", "6", "--n-grid", "20", "--power-reps", "50"] + common
        assert main(args) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "n,eps,mu,delta_n,rejection_rate,se"
        assert lines[1].startswith("20,0.3,6,")

    def test_sparse_calibration(self, capsys, common):
        args = ["power", "--beta", "0.7", "--sparse-s", "0.5,1.25", "--n-grid", "30", "--power-reps", "20"] + common
        assert main(args) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "n,eps,mu,delta_n,rejection_rate,se,s_exp"
        assert len(lines) == 3

    def test_conflicting_modes(self, common):
        assert main(["power", "--eps", "0.1", "--beta", "0.6"] + common) == EXIT_INVALID


class TestLimitCommand:
    def test_summary(self, capsys, cache_dir):
        args = ["limit", "--m", "50", "--reps", "100", "--seed", "3", "--cache-dir", str(cache_dir)]
        assert main(args) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "nu,alpha,m,reps,seed,kappa,std_err,kappa_2m,std_err_2m,sensitivity"
        assert lines[1].startswith("1.1,0.05,50,100,3,")
        assert (cache_dir / "limit_n50_nu1.1_a0.05.json").exists()

    def test_tail_check_block(self, capsys, cache_dir):
        args = ["limit", "--m", "50", "--reps", "100", "--tail-check", "--cache-dir", str(cache_dir)]
        assert main(args) == EXIT_OK
        blocks = capsys.readouterr().out.split("\n\n")
        assert len(blocks) == 2
        tail_lines = blocks[1].splitlines()
        assert tail_lines[0] == "process,eta,exceedances,frequency,ucl,bound,passed"
        assert len(tail_lines) == 1 + 3 * 3

    def test_json(self, capsys, cache_dir):
        args = ["limit", "--m", "50", "--reps", "100", "--format", "json", "--cache-dir", str(cache_dir)]
        assert main(args) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["limit"]["m"] == 50
        assert "tail_checks" not in payload
