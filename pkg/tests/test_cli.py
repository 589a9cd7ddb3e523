"""Command-line interface: exit codes, file outputs, determinism."""
import json
import subprocess
import sys

import pytest

from curved3body import cli
from curved3body import dynamics as dyn
from curved3body import homographic as hom


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_help_and_unknown_command():
    with pytest.raises(SystemExit) as exc:
        cli.main(["--help"])
    assert exc.value.code == 0
    with pytest.raises(SystemExit) as exc:
        cli.main(["frobnicate"])
    assert exc.value.code == 2


def test_missing_required_flag_is_usage_error(capsys):
    code, _, err = run_cli(capsys, "simulate", "--kind", "lagrangian",
                           "--c", "1", "--m", "1", "--r0", "0.5")
    assert code == 2
    assert "--kappa" in err


def test_invalid_parameter_values(capsys):
    code, _, err = run_cli(capsys, "fixedpoints", "--kind", "lagrangian",
                           "--kappa", "0", "--c", "1", "--m", "1")
    assert code == 2
    code, _, err = run_cli(capsys, "fixedpoints", "--kind", "lagrangian",
                           "--kappa", "1", "--c", "1", "--m", "-1")
    assert code == 2
    code, _, err = run_cli(capsys, "fixedpoints", "--kind", "hyperbolic",
                           "--kappa", "-1", "--c", "1", "--m", "1")
    assert code == 2


def test_simulate_collapse_exits_singular(capsys, tmp_path):
    out = tmp_path / "collapse.jsonl"
    code, stdout, _ = run_cli(capsys, "simulate", "--kind", "lagrangian",
                              "--kappa", "1", "--c", "0", "--m", "1",
                              "--r0", "0.5", "--nu0", "0",
                              "--out", str(out))
    assert code == 3
    assert "COLLISION_APPROACH" in stdout
    # the partial series is still written
    series = dyn.TrajectorySeries.from_jsonl(out)
    assert series.reason == dyn.COLLISION_APPROACH


def test_simulate_bounded_orbit(capsys, tmp_path):
    out = tmp_path / "orbit.csv"
    code, stdout, _ = run_cli(capsys, "simulate", "--kind", "eulerian",
                              "--kappa", "1", "--c", "2", "--m", "2",
                              "--r0", "0.7756", "--t-end", "8",
                              "--out", str(out), "--csv")
    assert code == 0
    assert "reason=T_END" in stdout
    header = out.read_text().splitlines()[0]
    cfg = json.loads(header.split("# config:", 1)[1])
    assert cfg["run_config"]["command"] == "simulate"
    assert cfg["run_config"]["kappa"] == 1.0


def test_simulate_hyperbolic_relative_equilibrium(capsys):
    code, stdout, _ = run_cli(capsys, "simulate", "--kind", "hyperbolic",
                              "--kappa", "-1", "--m", "1", "--rho0", "1.5",
                              "--t-end", "4")
    assert code == 0
    drift = float(stdout.split("energy_drift=")[1].split()[0])
    assert drift < 1e-10


def test_reduce_periodic_and_boundary(capsys, tmp_path):
    out = tmp_path / "reduced.csv"
    code, stdout, _ = run_cli(capsys, "reduce", "--kind", "eulerian",
                              "--kappa", "1", "--c", "2", "--m", "2",
                              "--r0", "0.5", "--t-end", "20",
                              "--out", str(out), "--csv")
    assert code == 0
    back = hom.ReducedSeries.from_csv(out)
    assert back.reason == dyn.T_END
    assert len(back) > 10
    # equator-bound orbit terminates early with the singular exit code
    code, stdout, _ = run_cli(capsys, "reduce", "--kind", "lagrangian",
                              "--kappa", "1", "--c", "1", "--m", "0.24",
                              "--r0", "0.9", "--t-end", "20")
    assert code == 3
    assert "BOUNDARY_APPROACH" in stdout


def test_reduce_escape_radius_stop(capsys):
    code, stdout, _ = run_cli(capsys, "reduce", "--kind", "lagrangian",
                              "--kappa", "-2", "--c", "0.333", "--m", "0.5",
                              "--r0", "1.5", "--nu0", "0.5", "--t-end", "400",
                              "--escape-radius", "10")
    assert code == 0
    assert "reason=ESCAPE" in stdout


def test_fixedpoints_known_values(capsys):
    code, stdout, _ = run_cli(capsys, "fixedpoints", "--kind", "lagrangian",
                              "--kappa", "-0.3", "--c", "0.23", "--m", "0.12")
    assert code == 0
    doc = json.loads(stdout)
    rs = [rec["r"] for rec in doc["records"]]
    stabilities = [rec["stability"] for rec in doc["records"]]
    assert len(rs) == 2
    assert abs(rs[0] - 1.0882233) < 1e-6 and abs(rs[1] - 2.0007055) < 1e-6
    assert stabilities == ["CENTER", "SADDLE"]


def test_fixedpoints_existence_cases(capsys):
    code, stdout, _ = run_cli(capsys, "fixedpoints", "--kind", "eulerian",
                              "--kappa", "-2", "--c", "2", "--m", "4")
    assert code == 0
    doc = json.loads(stdout)
    assert doc["records"] == []
    assert doc["diagnostics"]["existence_sign"] == -1
    code, stdout, _ = run_cli(capsys, "fixedpoints", "--kind", "eulerian",
                              "--kappa", "1", "--c", "2", "--m", "2")
    doc = json.loads(stdout)
    assert len(doc["records"]) == 1


def test_portrait_single_cell(capsys):
    code, stdout, _ = run_cli(capsys, "portrait", "--kind", "eulerian",
                              "--kappa", "1", "--c", "2", "--m", "2",
                              "--r-min", "0.77563459", "--r-max", "0.77563459",
                              "--nu-min", "0", "--nu-max", "0",
                              "--grid", "1x1", "--t-span", "20")
    assert code == 0
    assert "EQUILIBRIUM=1" in stdout


def test_portrait_preset_with_grid_override(capsys, tmp_path):
    out = tmp_path / "fig1b.json"
    code, stdout, _ = run_cli(capsys, "portrait", "--preset", "fig1b",
                              "--grid", "3x3", "--out", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    tags = {cell["class"] for row in doc["cells"] for cell in row}
    assert "PERIODIC" in tags and "EQUATOR_ASYMPTOTIC" in tags
    assert doc["config"]["run_config"]["preset"] == "fig1b"


def test_portrait_bad_grid(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["portrait", "--preset", "fig1b", "--grid", "axb"])
    assert exc.value.code == 2


def test_verify_single_check(capsys):
    code, stdout, _ = run_cli(capsys, "verify", "--check", "resultant",
                              "--trials", "50")
    assert code == 0
    assert "PASS" in stdout and "1/1 checks passed" in stdout


def test_verify_unequal_mass_check(capsys):
    code, stdout, _ = run_cli(capsys, "verify", "--check", "unequal-mass")
    assert code == 0
    assert "1/1 checks passed" in stdout


def test_outputs_are_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    argv = ["simulate", "--kind", "lagrangian", "--kappa", "-0.5",
            "--c", "0.7", "--m", "1", "--r0", "1.2", "--t-end", "5"]
    assert cli.main(argv + ["--out", str(a)]) == 0
    assert cli.main(argv + ["--out", str(b)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()


def test_console_entry_point_runs():
    proc = subprocess.run([sys.executable, "-m", "curved3body.cli", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "simulate" in proc.stdout
