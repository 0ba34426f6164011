"""Command-line entry points, config resolution and exit codes."""

import os

import numpy as np
import pytest

from hmcflow.cli import run_cli
from hmcflow.validation import read_profile_csv

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DEFAULT_BALL_CFG = os.path.join(ROOT, "configs", "validate_ball.cfg")


def run(tmp_path, *argv):
    out = str(tmp_path / "out")
    return run_cli(list(argv) + ["--out", out]), out


def test_equilibria_writes_reference_roots(tmp_path):
    code, out = run(tmp_path, "equilibria", "--beta", "1.2")
    assert code == 0
    roots = read_profile_csv(os.path.join(out, "equilibria.csv"))
    assert roots["m_plus"][0] == pytest.approx(0.6585, abs=5e-4)
    assert roots["m_minus"][0] == pytest.approx(-roots["m_plus"][0], abs=1e-12)
    assert roots["m_zero"][0] == pytest.approx(0.0, abs=1e-12)


def test_resolved_config_written(tmp_path):
    code, out = run(tmp_path, "equilibria", "--beta", "1.35")
    assert code == 0
    lines = open(os.path.join(out, "resolved.cfg")).read().splitlines()
    cfg = dict(line.split(" = ", 1) for line in lines)
    assert cfg["beta"] == "1.35"
    assert "kernel.kind" in cfg and "grid.n1" in cfg


def test_config_file_and_flag_precedence(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("beta = 1.5\nforcing_a = 0.01\n")
    code, out = run(tmp_path, "equilibria", "--config", str(path),
                    "--set", "beta=1.4")
    assert code == 0
    lines = open(os.path.join(out, "resolved.cfg")).read().splitlines()
    cfg = dict(line.split(" = ", 1) for line in lines)
    assert cfg["beta"] == "1.4"          # --set beats the file
    assert cfg["forcing_a"] == "0.01"    # file beats the default


def test_unknown_subcommand_is_usage_error(tmp_path, capsys):
    assert run_cli(["frobnicate"]) == 2
    capsys.readouterr()


def test_missing_subcommand_is_usage_error(capsys):
    assert run_cli([]) == 2
    capsys.readouterr()


def test_malformed_config_is_usage_error(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("beta 1.2\n")
    code, _ = run(tmp_path, "equilibria", "--config", str(path))
    assert code == 2


def test_missing_config_is_usage_error(tmp_path):
    code, _ = run(tmp_path, "equilibria", "--config",
                  str(tmp_path / "absent.cfg"))
    assert code == 2


def test_subcritical_beta_is_numerical_failure(tmp_path):
    code, _ = run(tmp_path, "equilibria", "--beta", "0.8")
    assert code == 1


def test_instanton_csv(tmp_path):
    code, out = run(tmp_path, "instanton", "--beta", "1.2")
    assert code == 0
    cols = read_profile_csv(os.path.join(out, "instanton.csv"))
    m = cols["m"]
    assert np.all(np.diff(m) >= 0)
    assert m[-1] == pytest.approx(0.6585, abs=5e-4)
    assert np.all(cols["dm"] >= 0)


def test_theta_csv(tmp_path):
    code, out = run(tmp_path, "theta", "--beta", "1.2")
    assert code == 0
    cols = read_profile_csv(os.path.join(out, "theta.csv"))
    assert cols["theta"][0] > 0
    assert cols["norm_factor"][0] > 0


def test_evolve_writes_snapshots_and_diagnostics(tmp_path):
    code, out = run(
        tmp_path, "evolve", "--eps", "0.2", "--dt", "0.01", "--t-end", "0.02",
        "--set", "grid.n1=33", "--set", "grid.n2=33", "--set", "grid.n3=17",
        "--set", "grid.box=-1.6,1.6,-1.6,1.6,-0.8,0.8",
        "--set", "snapshots=0.02")
    assert code == 0
    assert os.path.exists(os.path.join(out, "snapshot_0000.field"))
    diag = read_profile_csv(os.path.join(out, "diagnostics.csv"))
    assert len(diag["t"]) == 3
    assert np.all(np.abs(diag["max"]) <= 1.0)


def test_profiles_from_field_file(tmp_path):
    code, out = run(
        tmp_path, "evolve", "--eps", "0.2", "--dt", "0.01", "--t-end", "0.01",
        "--set", "grid.n1=33", "--set", "grid.n2=33", "--set", "grid.n3=17",
        "--set", "grid.box=-1.6,1.6,-1.6,1.6,-0.8,0.8",
        "--set", "snapshots=0.01")
    assert code == 0
    field = os.path.join(out, "snapshot_0000.field")
    code2 = run_cli(["profiles", "--field", field,
                     "--out", str(tmp_path / "prof")])
    assert code2 == 0
    for axis in ("x1", "x3"):
        cols = read_profile_csv(str(tmp_path / "prof" / f"profile_{axis}.csv"))
        assert len(cols["s"]) > 4


def test_validate_ball_default_config(tmp_path):
    code, out = run(tmp_path, "validate-ball", "--config", DEFAULT_BALL_CFG)
    assert code == 0
    report = read_profile_csv(os.path.join(out, "report.csv"))
    assert len(report["t"]) == 4
    assert report["hausdorff"].max() <= 2.0 * 0.15


def test_calibrate_cylinder(tmp_path):
    code, out = run(
        tmp_path, "calibrate", "--eps", "0.2", "--dt", "0.02",
        "--t-end", "0.2",
        "--set", "grid.n1=49", "--set", "grid.n2=49", "--set", "grid.n3=9",
        "--set", "grid.box=-1.6,1.6,-1.6,1.6,-0.4,0.4",
        "--set", "shape.radius=1.2")
    assert code == 0
    cal = read_profile_csv(os.path.join(out, "calibration.csv"))
    assert cal["theta"][0] > 0
    assert cal["r_squared"][0] > 0.95


def test_se2_run(tmp_path):
    code, out = run(
        tmp_path, "se2", "--eps", "0.2", "--dt", "0.01", "--t-end", "0.02",
        "--set", "grid.n1=33", "--set", "grid.n2=33", "--set", "grid.n3=16",
        "--set", "grid.box=-1.6,1.6,-1.6,1.6,0,0",
        "--set", "shape.radius=1.0", "--set", "snapshots=0.02")
    assert code == 0
    diag = read_profile_csv(os.path.join(out, "diagnostics.csv"))
    assert len(diag["t"]) == 3
