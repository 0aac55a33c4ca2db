"""
Tests for CLI and Report Writer Modules

Tests cover:
- Table commands (sphfn, heat, plancherel, abel) written as '#'-headed CSV
- Report commands (mass, beurling, verdict, selftest) written as JSON
- Exit codes: 0 ok, 1 numerical failure, 2 usage error, 3 selftest failure
- Flat JSON run configuration and the --quad-* overrides
- read_table_csv() / read_report_json() parsing what the writers produce
- Byte-identical output for repeated runs
"""

import io
import json
import math
from unittest.mock import patch

import pytest
import numpy as np
import pandas as pd

from cli.harmonic_cli import (
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_SELFTEST,
    EXIT_USAGE,
    parse_profile,
    run,
)
from cli.report_writer import (
    REPORT_KEYS,
    RunConfig,
    build_report,
    config_hash,
    load_run_config,
    read_report_json,
    read_table_csv,
    render_report_json,
    render_table_csv,
)
from common.errors import ConfigError, TruncationError
from space.symmetric_space import model_space
from transforms.quadrature import default_quadrature
from transforms.spherical_transform import abel_transform


# -------------------------------------------------------------------
# Fixtures
# -------------------------------------------------------------------

def invoke(*argv):
    """Run the CLI on argv; return (exit code, captured stdout text)."""
    out = io.StringIO()
    code = run(list(argv), stdout=out)
    return code, out.getvalue()


@pytest.fixture
def config_file(tmp_path):
    """Write a run configuration and return its path."""
    def _write(document):
        path = tmp_path / "run.json"
        path.write_text(json.dumps(document))
        return str(path)
    return _write


@pytest.fixture
def gaussian_table(tmp_path):
    """CSV tabulation of e^{-t²} on [0, 8]."""
    grid = np.linspace(0, 8, 161)
    path = tmp_path / "gaussian.csv"
    pd.DataFrame({"grid": grid, "value": np.exp(-grid ** 2)}).to_csv(path, index=False)
    return str(path)


# -------------------------------------------------------------------
# Table Command Tests
# -------------------------------------------------------------------

class TestTableCommands:
    def test_sphfn_h3_value(self):
        code, text = invoke("sphfn", "--space", "h3", "--lambda", "2", "--t", "1.5")
        assert code == EXIT_OK
        table = read_table_csv(text)
        assert table["header"]["space"] == "h3"
        assert table["header"]["operation"] == "sphfn"
        assert list(table["frame"].columns) == ["grid", "value"]
        assert table["frame"]["value"].iloc[0] == pytest.approx(0.0331379, abs=1e-7)
        assert table["frame"]["value"].iloc[0] == pytest.approx(math.sin(3) / (2 * math.sinh(1.5)), abs=1e-9)

    def test_sphfn_complex_columns(self):
        code, text = invoke("sphfn", "--lambda", "1", "--lambda-im", "0.5", "--t-end", "2", "--points", "5")
        assert code == EXIT_OK
        frame = read_table_csv(text)["frame"]
        assert list(frame.columns) == ["grid", "value_re", "value_im"]
        assert len(frame) == 5

    def test_sphfn_json(self):
        code, text = invoke("sphfn", "--lambda", "2", "--t", "1.5", "--format", "json")
        assert code == EXIT_OK
        report = read_report_json(text)
        assert report["operation"] == "sphfn"
        assert report["details"]["values"][0] == pytest.approx(0.0331379, abs=1e-7)

    def test_heat_to_file(self, tmp_path):
        path = tmp_path / "heat.csv"
        code, text = invoke("heat", "--time", "1", "--r-max", "5", "--points", "11", "--output", str(path))
        assert code == EXIT_OK
        assert text == ""
        table = read_table_csv(str(path))
        assert len(table["frame"]) == 11
        assert table["frame"]["value"].iloc[0] == pytest.approx((4 * math.pi) ** -1.5 * math.exp(-1), rel=1e-12)

    def test_heat_quadrature_method(self):
        _, closed = invoke("heat", "--time", "1", "--r-max", "4", "--points", "5", "--method", "closed")
        _, numeric = invoke("heat", "--time", "1", "--r-max", "4", "--points", "5", "--method", "quad")
        a = read_table_csv(closed)["frame"]["value"].to_numpy()
        b = read_table_csv(numeric)["frame"]["value"].to_numpy()
        assert np.allclose(a, b, atol=1e-8)

    def test_plancherel(self):
        code, text = invoke("plancherel", "--space", "h3", "--lambda-max", "4", "--points", "5")
        assert code == EXIT_OK
        frame = read_table_csv(text)["frame"]
        assert np.allclose(frame["value"], frame["grid"] ** 2)

    def test_abel_heat(self):
        code, text = invoke("abel", "--profile", "heat:0.5", "--s-max", "3", "--points", "7")
        assert code == EXIT_OK
        frame = read_table_csv(text)["frame"]
        s = frame["grid"].to_numpy()
        expected = (2 * math.pi) ** -0.5 * math.exp(-0.5) * np.exp(-s ** 2 / 2)
        assert np.allclose(frame["value"], expected, rtol=1e-10)

    def test_abel_table_profile(self, gaussian_table):
        code, text = invoke("abel", "--profile", f"table:{gaussian_table}", "--s-max", "2", "--points", "5")
        assert code == EXIT_OK
        assert len(read_table_csv(text)["frame"]) == 5

    def test_abel_uses_abel_transform(self):
        with patch("cli.harmonic_cli.abel_transform", wraps=abel_transform) as spy:
            code, _ = invoke("abel", "--profile", "gaussian:1", "--s-max", "2", "--points", "5")
        assert code == EXIT_OK
        assert spy.call_count == 1
        assert spy.call_args.kwargs["spectrum"] is not None

    def test_abel_too_few_points(self):
        code, _ = invoke("abel", "--profile", "heat:1", "--s-max", "2", "--points", "3")
        assert code == EXIT_USAGE


# -------------------------------------------------------------------
# Report Command Tests
# -------------------------------------------------------------------

class TestReportCommands:
    def test_mass(self):
        code, text = invoke("mass", "--space", "h3", "--time", "1")
        assert code == EXIT_OK
        report = read_report_json(text)
        assert abs(report["value"] - 1.0) < 1e-6
        assert set(REPORT_KEYS) <= set(report)

    def test_verdict_hardy(self):
        code, text = invoke("verdict", "hardy", "--a", "0.25", "--b", "1")
        assert code == EXIT_OK
        report = read_report_json(text)
        assert report["operation"] == "verdict:hardy"
        assert report["verdict"] == "HeatKernelMultiple"
        assert report["cited_case"] == "hardy(b)"
        assert report["details"]["heat_time"] == 1.0

    def test_verdict_beurling_k_types(self):
        _, text = invoke("verdict", "beurling", "--space", "h3", "--d", "6")
        report = read_report_json(text)
        assert report["details"]["F"] == ["(0,0)", "(1,-1)", "(1,1)"]
        assert report["details"]["deg_bound"] == 1.5

    def test_verdict_cp_infinite_exponent(self):
        code, text = invoke("verdict", "cp", "--a", "0.25", "--b", "1", "--p1", "inf", "--p2", "inf",
                            "--m", "0", "--n", "0")
        assert code == EXIT_OK
        report = read_report_json(text)
        assert report["verdict"] == "HeatKernelMultiple"
        assert report["config"]["params"]["p2"] == "inf"

    def test_beurling(self):
        code, text = invoke("beurling", "--space", "h3", "--profile", "heat:1", "--d", "8")
        assert code == EXIT_OK
        report = read_report_json(text)
        assert report["classification"] == "converged"
        assert report["ladder"] == [2.0, 4.0, 8.0, 16.0, 32.0, 64.0]
        assert report["value"] is not None
        assert report["details"]["ridge_agrees"] is True

    def test_beurling_csv_ladder(self):
        code, text = invoke("beurling", "--profile", "heat:1", "--d", "3", "--format", "csv")
        assert code == EXIT_OK
        frame = read_table_csv(text)["frame"]
        assert list(frame["grid"]) == [2.0, 4.0, 8.0, 16.0, 32.0, 64.0]

    def test_demange(self):
        code, text = invoke("demange", "--space1", "h3", "--space2", "h3", "--profile1", "heat:1",
                            "--profile2", "zero", "--d", "8")
        assert code == EXIT_OK
        report = read_report_json(text)
        assert report["classification"] == ["converged", "converged"]
        assert report["value"][1] == 0.0

    def test_selftest_quick(self):
        code, text = invoke("selftest")
        assert code == EXIT_OK
        report = read_report_json(text)
        assert report["value"] == "SUCCESS"
        assert report["details"]["suite"] == "quick"

    def test_selftest_failure_exit_code(self):
        failing = {"suite": "quick", "status": "FAILURE", "checks": [{"check": "check_heat", "issues": ["x"]}]}
        with patch("cli.harmonic_cli.run_selftest", return_value=failing):
            code, text = invoke("selftest")
        assert code == EXIT_SELFTEST
        assert read_report_json(text)["value"] == "FAILURE"


# -------------------------------------------------------------------
# Exit Code Tests
# -------------------------------------------------------------------

class TestExitCodes:
    def test_help(self, capsys):
        assert run(["--help"]) == EXIT_OK

    def test_missing_required(self, capsys):
        assert run(["heat", "--time", "1"]) == EXIT_USAGE

    def test_unknown_space(self):
        assert invoke("sphfn", "--space", "octonionic(2)", "--lambda", "1", "--t", "1")[0] == EXIT_USAGE

    def test_bad_profile(self):
        assert invoke("beurling", "--profile", "heat:-1", "--d", "8")[0] == EXIT_USAGE
        assert invoke("beurling", "--profile", "lorentzian:1", "--d", "8")[0] == EXIT_USAGE

    def test_csv_for_report_command(self):
        assert invoke("mass", "--time", "1", "--format", "csv")[0] == EXIT_USAGE

    def test_closed_form_off_h3(self):
        code, _ = invoke("heat", "--space", "real_hyperbolic(2)", "--time", "1", "--r-max", "2", "--method", "closed")
        assert code == EXIT_USAGE

    def test_numerical_failure(self):
        with patch("cli.harmonic_cli.total_mass", side_effect=TruncationError("tail too heavy", 1.0)):
            assert invoke("mass", "--time", "1")[0] == EXIT_NUMERICAL

    def test_bad_override(self):
        assert invoke("mass", "--time", "1", "--quad-panels", "0")[0] == EXIT_USAGE


# -------------------------------------------------------------------
# Configuration Tests
# -------------------------------------------------------------------

class TestRunConfig:
    def test_config_file_space(self, config_file):
        path = config_file({"space": "complex_hyperbolic(2)"})
        code, text = invoke("plancherel", "--lambda-max", "2", "--points", "3", "--config", path)
        assert code == EXIT_OK
        assert read_table_csv(text)["header"]["space"] == "complex_hyperbolic(2)"

    def test_flag_overrides_file(self, config_file):
        path = config_file({"space": "complex_hyperbolic(2)"})
        _, text = invoke("plancherel", "--space", "h3", "--lambda-max", "2", "--points", "3", "--config", path)
        assert read_table_csv(text)["header"]["space"] == "h3"

    def test_unknown_key(self, config_file):
        path = config_file({"space": "h3", "colour": "blue"})
        assert invoke("mass", "--time", "1", "--config", path)[0] == EXIT_USAGE

    def test_load_errors(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        with pytest.raises(ConfigError):
            load_run_config(str(bad))
        listing = tmp_path / "list.json"
        listing.write_text("[1, 2]")
        with pytest.raises(ConfigError):
            load_run_config(str(listing))

    def test_validation(self):
        with pytest.raises(ConfigError):
            RunConfig(t_max=-1.0)
        with pytest.raises(ConfigError):
            RunConfig(panels_per_unit=2.5)
        with pytest.raises(ConfigError):
            RunConfig(output_format="xml")

    def test_quadrature_overrides(self):
        quad = RunConfig(panels_per_unit=32, t_max=20.0).quadrature(default_quadrature())
        assert quad.panels_per_unit == 32
        assert quad.t_max == 20.0
        assert quad.lambda_max == default_quadrature().lambda_max

    def test_merged_ignores_none(self):
        merged = RunConfig(space="h3", t_max=20.0).merged(space=None, t_max=30.0)
        assert merged.space == "h3" and merged.t_max == 30.0

    def test_override_reaches_header(self):
        _, default = invoke("sphfn", "--lambda", "1", "--t", "1")
        _, refined = invoke("sphfn", "--lambda", "1", "--t", "1", "--quad-panels", "32")
        assert read_table_csv(default)["header"]["config_hash"] != read_table_csv(refined)["header"]["config_hash"]


# -------------------------------------------------------------------
# Writer and Parser Tests
# -------------------------------------------------------------------

class TestWritersAndParsers:
    def test_config_hash(self):
        assert len(config_hash({"a": 1})) == 12
        assert config_hash({"a": 1, "b": 2}) == config_hash({"b": 2, "a": 1})
        assert config_hash({"a": 1}) != config_hash({"a": 2})

    def test_csv_values_survive(self):
        values = np.array([1 / 3, math.pi, 1e-300, -2.5e17])
        text = render_table_csv(np.arange(4.0), values, "h3", "test", {})
        parsed = read_table_csv(text)["frame"]["value"].to_numpy()
        assert np.array_equal(parsed, values)

    def test_report_keys_present(self):
        report = json.loads(render_report_json(build_report("mass", {}, value=np.float64(1.0))))
        assert all(key in report for key in REPORT_KEYS)
        assert report["value"] == 1.0
        assert report["verdict"] is None

    def test_read_report_requires_keys(self):
        with pytest.raises(ConfigError):
            read_report_json(json.dumps({"operation": "mass"}))

    def test_deterministic_output(self):
        argv = ("beurling", "--profile", "heat:1", "--d", "8")
        assert invoke(*argv)[1] == invoke(*argv)[1]
        argv = ("sphfn", "--space", "quaternionic_hyperbolic(2)", "--lambda", "3", "--t-end", "4", "--points", "9")
        assert invoke(*argv)[1] == invoke(*argv)[1]


class TestParseProfile:
    def test_heat(self):
        f, fhat = parse_profile("heat:2", model_space("h3"), default_quadrature())
        assert f.kind == "heat" and fhat.kind == "heat_spectral"

    def test_zero(self):
        f, fhat = parse_profile("zero", model_space("h3"), default_quadrature())
        assert f.kind == fhat.kind == "zero"

    def test_missing_table(self, tmp_path):
        with pytest.raises(ConfigError):
            parse_profile(f"table:{tmp_path / 'absent.csv'}", model_space("h3"), default_quadrature())
