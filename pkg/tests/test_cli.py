import csv
import json
import subprocess
import sys

import pytest

from maxdirac import cli
from maxdirac.solver import ConfigError

FAST = ["--Z", "20", "--grid", "8", "--box", "8", "--starts", "1"]


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_config_file_parsing(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text("# comment\natomic_number = 12\nalpha_fs=0.0073  # inline\n\ndisable_self_field = yes\n")
    assert cli.read_config_file(p) == {"Z": 12, "alpha_fs": 0.0073, "disable_self_field": True}


@pytest.mark.parametrize("body", ["colour = red\n", "atomic_number\n", "grid_points = many\n",
                                  "disable_self_field = maybe\n"])
def test_config_file_errors(tmp_path, body):
    p = tmp_path / "bad.cfg"
    p.write_text(body)
    with pytest.raises(ConfigError):
        cli.read_config_file(p)


def test_flags_override_file(tmp_path, capsys):
    p = tmp_path / "run.cfg"
    p.write_text("atomic_number = 12\ngrid_points = 8\nbox_length = 8\n")
    out = tmp_path / "r.json"
    code, _, _ = run(["solve", "--config", str(p), "--Z", "10", "--starts", "1", "--output", str(out)], capsys)
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["config_echo"]["atomic_number"] == 10
    assert doc["config_echo"]["grid_points"] == 8


def test_solve_report_schema(tmp_path, capsys):
    prof, hist = tmp_path / "p.csv", tmp_path / "h.csv"
    code, out, _ = run(["solve", *FAST, "--profile-csv", str(prof), "--history-csv", str(hist)], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["schema_version"] == 1
    for key in ("mu", "lambda_W", "Lambda1_estimate", "I_parts", "upper_trace_mass", "residual_EL",
                "residual_T_dual", "iterations", "diagnostics", "config_echo", "units"):
        assert key in doc
    assert 0 < doc["mu"] < 1
    assert all(doc["diagnostics"].values())
    rows = list(csv.reader(prof.open()))
    assert rows[0] == ["r", "rho", "Phi", "J_abs"] and len(rows) > 1
    rows = list(csv.reader(hist.open()))
    assert rows[0] == ["iteration", "F", "mu", "residual_T_dual", "inner"]


def test_solve_rejects_supercritical(capsys):
    code, _, err = run(["solve", "--Z", "200"], capsys)
    assert code == 1
    assert "exceeds 1" in err


def test_solve_unknown_config_key(tmp_path, capsys):
    p = tmp_path / "bad.cfg"
    p.write_text("nonsense = 1\n")
    code, _, err = run(["solve", "--config", str(p)], capsys)
    assert code == 1 and "unknown key" in err


def test_solver_failure_exit_code(capsys):
    code, _, err = run(["solve", *FAST, "--max-iter-inner", "1"], capsys)
    assert code == 2
    assert "solver failure" in err


def test_verify(tmp_path, capsys):
    out = tmp_path / "v.json"
    code, text, _ = run(["verify", "--trials", "5", "--suite", "kato", "--suite", "apm", "--output", str(out)], capsys)
    assert code == 0
    assert "kato" in text and "apm" in text
    doc = json.loads(out.read_text())
    assert [s["name"] for s in doc["suites"]] == ["kato", "apm"]
    assert all(s["violations"] == 0 for s in doc["suites"])


@pytest.mark.parametrize("argv", [["verify", "--trials", "0"], ["sweep", "--param", "Z", "--values"],
                                  ["verify", "--suite", "nope"]])
def test_usage_errors(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(argv)
    assert exc.value.code == 2


def test_sweep_csv(tmp_path, capsys):
    out = tmp_path / "s.csv"
    code, _, _ = run(["sweep", "--param", "Z", "--values", "5", "20", *FAST[2:], "--output", str(out)], capsys)
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert [r["value"] for r in rows] == ["5", "20"]
    assert float(rows[0]["mu"]) > float(rows[1]["mu"])
    assert set(rows[0]) == set(cli.SWEEP_COLUMNS)


def test_sweep_rejects_bad_value(capsys):
    code, _, err = run(["sweep", "--param", "Z", "--values", "20", "300", *FAST[2:]], capsys)
    assert code == 1


def test_deterministic_subprocess(tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / "r.json"
        subprocess.run([sys.executable, "-m", "maxdirac.cli", "solve", *FAST, "--seed", "7", "--output", str(path)],
                       check=True)
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
