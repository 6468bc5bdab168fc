"""Command-line behaviour: outputs, exit codes, determinism, round trips."""

import json

import numpy as np
import pytest
from click.testing import CliRunner

from laprisk import RiskAssessment, advanced_composition
from laprisk.cli import main
from laprisk.composition import read_comparison_csv
from laprisk.sensitivity import read_cdf_csv, read_samples_csv


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, *args, expect=0):
    result = runner.invoke(main, list(args), catch_exceptions=False)
    assert result.exit_code == expect, result.output
    return result


def dataset_csv(tmp_path, n=60, seed=0):
    rng = np.random.default_rng(seed)
    features = rng.normal(size=(n, 2))
    response = features @ [0.7, -0.3] + 0.05 * rng.normal(size=n)
    path = tmp_path / "data.csv"
    rows = ["x0,x1,y"]
    for row, value in zip(features, response):
        rows.append(f"{float(row[0])!r},{float(row[1])!r},{float(value)!r}")
    path.write_text("\n".join(rows) + "\n")
    return path


class TestRiskCommand:
    def test_solve_calibration_level(self, runner):
        result = invoke(runner, "risk", "--case", "1", "--eps", "0.4", "--gamma", "0.6",
                        "--solve", "eps0")
        payload = json.loads(result.output)
        assert payload["eps0"] == pytest.approx(0.8, abs=0.05)
        assert payload["case"] == "explicit"
        assert payload["solved"] == "eps0"

    def test_full_confidence_level(self, runner):
        result = invoke(runner, "risk", "--case", "1", "--eps0", "1", "--gamma", "1",
                        "--k", "1")
        payload = json.loads(result.output)
        assert payload["eps"] == 1.0

    def test_forward_confidence(self, runner):
        result = invoke(runner, "risk", "--case", "1", "--eps0", "0.1", "--eps", "0.08")
        payload = json.loads(result.output)
        assert payload["gamma"] == pytest.approx(0.807919, abs=1e-6)
        assert RiskAssessment.from_dict(payload).case == "explicit"

    def test_conflicting_flags_usage_error(self, runner):
        result = runner.invoke(main, ["risk", "--case", "1", "--eps0", "0.5"])
        assert result.exit_code == 2

    def test_unachievable_target_exits_one(self, runner):
        result = runner.invoke(main, ["risk", "--case", "1", "--eps", "3.0",
                                      "--gamma", "0.5", "--solve", "eps0"])
        assert result.exit_code == 1

    def test_implicit_case_bound(self, runner):
        result = invoke(runner, "risk", "--case", "2", "--gamma2", "0.5", "--rho",
                        "0.01", "--n", "10000")
        payload = json.loads(result.output)
        assert payload["gamma"] == pytest.approx(0.36467, abs=1e-4)
        assert payload["case"] == "implicit"
        assert payload["eps"] is None

    def test_coupled_case_round_trip(self, runner):
        forward = invoke(runner, "risk", "--case", "3", "--eps", "0.4", "--eps0", "0.8",
                         "--eta", "1.0", "--gamma2", "0.9", "--rho", "0.01", "--n", "15000")
        bound = json.loads(forward.output)["gamma"]
        solved = invoke(runner, "risk", "--case", "3", "--eps", "0.4", "--gamma",
                        str(bound), "--eta", "1.0", "--gamma2", "0.9", "--rho", "0.01",
                        "--n", "15000", "--solve", "eps0")
        assert json.loads(solved.output)["eps0"] == pytest.approx(0.8, abs=1e-4)

    def test_coupled_case_missing_flags(self, runner):
        result = runner.invoke(main, ["risk", "--case", "3", "--eps", "0.4"])
        assert result.exit_code == 2


class TestSampleSizeCommand:
    def test_reference_plan(self, runner):
        result = invoke(runner, "sample-size", "--rho", "0.01", "--alpha", "0.9")
        assert json.loads(result.output)["n"] == 14979

    def test_bad_domain_exits_one(self, runner):
        result = runner.invoke(main, ["sample-size", "--rho", "2.0", "--alpha", "0.9"])
        assert result.exit_code == 1


class TestSensitivityCommand:
    def test_mean_query_run(self, runner, tmp_path):
        data = dataset_csv(tmp_path)
        samples_out = tmp_path / "samples.csv"
        cdf_out = tmp_path / "cdf.csv"
        result = invoke(runner, "sensitivity", "--data", str(data), "--query", "mean",
                        "--column", "2", "--target", "2", "--p", "10", "--n", "200",
                        "--gamma2", "0.9", "--rho", "0.05", "--seed", "3",
                        "--samples-out", str(samples_out), "--cdf-out", str(cdf_out))
        payload = json.loads(result.output)
        assert payload["seed"] == 3
        assert 0.0 < payload["sampled_sensitivity"] <= payload["max_sampled_sensitivity"]
        assert payload["sampled_sensitivity"] <= 0.1  # swap changes a [0,1] mean by <= 1/p
        samples = read_samples_csv(samples_out)
        assert len(samples) == 200
        values, levels = read_cdf_csv(cdf_out)
        assert len(values) == 200 and levels[-1] == 1.0

    def test_deterministic_output(self, runner, tmp_path):
        data = dataset_csv(tmp_path)
        args = ["sensitivity", "--data", str(data), "--query", "ridge", "--target", "2",
                "--p", "8", "--n", "50", "--gamma2", "0.85", "--seed", "11"]
        first = invoke(runner, *args)
        second = invoke(runner, *args)
        assert first.output == second.output

    def test_seed_environment_fallback(self, runner, tmp_path):
        data = dataset_csv(tmp_path)
        args = ["sensitivity", "--data", str(data), "--query", "mean", "--column", "2",
                "--target", "2", "--p", "5", "--n", "20", "--gamma2", "1.0"]
        via_env = runner.invoke(main, args, env={"PAR_SEED": "21"}, catch_exceptions=False)
        assert json.loads(via_env.output)["seed"] == 21

    def test_count_without_predicate(self, runner, tmp_path):
        data = dataset_csv(tmp_path)
        result = invoke(runner, "sensitivity", "--data", str(data), "--query", "count",
                        "--target", "2", "--p", "5", "--n", "20", "--gamma2", "1.0")
        payload = json.loads(result.output)
        assert payload["sampled_sensitivity"] == 0.0

    def test_missing_column_usage_error(self, runner, tmp_path):
        data = dataset_csv(tmp_path)
        result = runner.invoke(main, ["sensitivity", "--data", str(data), "--query",
                                      "sum", "--target", "2", "--p", "5", "--n", "10",
                                      "--gamma2", "1.0"])
        assert result.exit_code == 2


class TestComposeCommand:
    def test_table_dominance(self, runner, tmp_path):
        out = tmp_path / "table.csv"
        invoke(runner, "compose", "--eps0", "0.5", "--delta", "1e-5", "--n-max", "50",
               "--eps", "0.27", "--gamma", "0.61", "-o", str(out))
        rows = read_comparison_csv(out)
        assert len(rows) == 50
        assert rows[0].basic == 0.5
        assert all(row.par < row.advanced for row in rows)

    def test_default_pair_collapses_to_advanced(self, runner):
        result = invoke(runner, "compose", "--eps0", "0.2", "--n-max", "3")
        lines = result.output.strip().splitlines()
        assert lines[0] == "n,basic,advanced,par"
        for line, n in zip(lines[1:], range(1, 4)):
            fields = line.split(",")
            assert float(fields[3]) == pytest.approx(
                advanced_composition(0.2, n, 1e-5), rel=1e-12)

    def test_partial_pair_usage_error(self, runner):
        result = runner.invoke(main, ["compose", "--eps0", "0.5", "--n-max", "5",
                                      "--eps", "0.3"])
        assert result.exit_code == 2


class TestBudgetCommand:
    def test_optimised_budget(self, runner):
        result = invoke(runner, "budget", "--eps0", "0.5", "--E", "5500", "--c", "1",
                        "--Emin", "0", "--N", "100", "--optimize")
        payload = json.loads(result.output)
        assert payload["eps_min"] == pytest.approx(0.274, abs=1e-3)
        assert payload["budget"] == pytest.approx(37805.86, abs=1.0)
        assert payload["budget_eps0"] == pytest.approx(74434.41, abs=1e-9)  # 2-decimal output
        assert payload["savings"] == pytest.approx(36628.53, abs=2.0)

    def test_feasible_window(self, runner):
        result = invoke(runner, "budget", "--eps0", "0.5", "--E", "5500", "--N", "100",
                        "--mae-max", "3", "--budget-cap", "60000", "--optimize")
        payload = json.loads(result.output)
        assert payload["feasible"] is True
        assert payload["eps_lower"] == pytest.approx(1 / 3.0, abs=1e-6)
        assert payload["eps_upper"] is not None

    def test_infeasible_window_exits_one(self, runner):
        result = runner.invoke(main, ["budget", "--eps0", "0.5", "--E", "5500", "--N",
                                      "100", "--mae-max", "2", "--budget-cap", "60000",
                                      "--optimize"], catch_exceptions=False)
        assert result.exit_code == 1
        payload = json.loads(result.output)
        assert payload["feasible"] is False
        assert payload["eps_lower"] == pytest.approx(0.5)

    def test_budget_below_floor_exits_one(self, runner):
        result = runner.invoke(main, ["budget", "--eps0", "0.5", "--E", "5500", "--N",
                                      "100", "--mae-max", "2", "--budget-cap", "100"])
        assert result.exit_code == 1

    def test_curve_output(self, runner, tmp_path):
        curve = tmp_path / "curve.csv"
        invoke(runner, "budget", "--eps0", "0.5", "--E", "5500", "--curve-out",
               str(curve), "--curve-points", "10")
        lines = curve.read_text().splitlines()
        assert lines[0] == "eps,budget"
        assert len(lines) == 11

    def test_missing_required_flag_usage_error(self, runner):
        result = runner.invoke(main, ["budget", "--eps0", "0.5"])
        assert result.exit_code == 2


class TestVerifyCommand:
    @pytest.mark.parametrize("target", ["composition", "cost", "overlap"])
    def test_deterministic_targets_pass(self, runner, target):
        result = invoke(runner, "verify", "--target", target)
        payload = json.loads(result.output)
        assert payload["pass"] is True
        assert all(set(check) >= {"analytic", "mc_estimate", "stderr", "gap", "pass"}
                   for check in payload["checks"])

    def test_simulation_target_passes(self, runner):
        result = invoke(runner, "verify", "--target", "gamma1", "--samples", "100000",
                        "--seed", "4")
        payload = json.loads(result.output)
        assert payload["pass"] is True
        assert payload["seed"] == 4

    def test_byte_determinism(self, runner):
        args = ["verify", "--target", "gamma1", "--samples", "50000", "--seed", "9"]
        first = invoke(runner, *args)
        second = invoke(runner, *args)
        assert first.output == second.output
