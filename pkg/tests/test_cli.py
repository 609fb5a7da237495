import json
import subprocess
import sys

import pytest

from stmaxwell.cli import parse_and_run
from stmaxwell.verify import COMPARE_COLUMNS, CONVERGENCE_COLUMNS


def test_converge_csv(tmp_path, capsys):
    out = tmp_path / "ex1.csv"
    assert parse_and_run(["converge", "--case", "ex1", "--ns", "6,8", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(CONVERGENCE_COLUMNS)
    assert len(lines) == 3
    assert "fitted" in capsys.readouterr().err


def test_output_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["converge", "--case", "ex3", "--ns", "5,7", "--mode", "tt", "--tt-tol", "1e-9"]
    assert parse_and_run(argv + ["--out", str(a)]) == 0
    assert parse_and_run(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_solve_json_and_export(tmp_path, capsys):
    rc = parse_and_run(["solve", "--case", "ex2", "--n", "6", "--format", "json", "--export", str(tmp_path / "f")])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["rows"][0]["N"] == 6
    assert (tmp_path / "f" / "Bz.f64").exists() and (tmp_path / "f" / "Bz.json").exists()


def test_solve_tt_export(tmp_path):
    argv = ["solve", "--case", "ex1", "--n", "6", "--mode", "tt", "--export", str(tmp_path), "--export-format", "tt"]
    assert parse_and_run(argv) == 0
    assert (tmp_path / "Ey.tt").read_bytes()[:4] == b"TT4D"


def test_timing_column(capsys):
    assert parse_and_run(["solve", "--case", "ex1", "--n", "5", "--timing"]) == 0
    row = capsys.readouterr().out.splitlines()[1]
    assert row.split(",")[-1] != ""


def test_condnum(capsys):
    assert parse_and_run(["condnum", "--op", "s_t_int", "--ns", "4,6,8"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "N,kappa" and lines[-1].startswith("slope,")


def test_compare(capsys):
    assert parse_and_run(["compare", "--case", "ex1", "--n", "6", "--tt-tol", "1e-10"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == ",".join(COMPARE_COLUMNS)
    assert float(lines[1].split(",")[-1]) <= 1e-8


@pytest.mark.parametrize(
    "argv",
    [
        ["solve", "--case", "ex9", "--n", "8"],
        ["solve", "--case", "ex1", "--n", "2"],
        ["converge", "--case", "ex1", "--ns", "8,6"],
        ["converge", "--case", "ex1", "--ns", "a,b"],
        ["solve", "--case", "ex1", "--n", "6", "--tt-tol", "-1"],
        ["condnum", "--op", "a_lap", "--ns", "4", "--kind", "nope"],
        [],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    assert parse_and_run(argv) == 2
    assert capsys.readouterr().err


def test_solver_failure_exits_1(monkeypatch, capsys):
    import stmaxwell.maxwell.wave as wave

    monkeypatch.setattr(wave, "RESIDUAL_LIMIT", 0.0)
    assert parse_and_run(["solve", "--case", "ex1", "--n", "5"]) == 1
    assert "residual" in capsys.readouterr().err


def test_all_failures_exit_1(monkeypatch):
    import stmaxwell.maxwell.wave as wave

    monkeypatch.setattr(wave, "RESIDUAL_LIMIT", 0.0)
    assert parse_and_run(["converge", "--case", "ex1", "--ns", "5,6"]) == 1


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "stmaxwell", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "converge" in r.stdout
