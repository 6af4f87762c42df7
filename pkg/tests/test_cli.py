import os

import pytest

from shadowaudit.cli import main

from conftest import FIXTURES, mutant_path

WORKBOOK = os.path.join(FIXTURES, "workbook.wbk")
MODEL = os.path.join(FIXTURES, "model.sdl")
BINDINGS = os.path.join(FIXTURES, "bindings.bnd")
DATA = os.path.join(FIXTURES, "model_data.dat")


def _audit_args(workbook=WORKBOOK, *extra):
    return [
        "audit", "--workbook", workbook, "--model", MODEL,
        "--bindings", BINDINGS, *extra,
    ]


def test_audit_clean_exit_zero(capsys):
    assert main(_audit_args()) == 0
    out = capsys.readouterr().out
    assert "FAIL: 0 /" in out


def test_audit_mutant_exit_one(capsys):
    assert main(_audit_args(mutant_path("dropped_term"))) == 1
    assert "FAIL" in capsys.readouterr().out


def test_audit_missing_file_exit_two(capsys):
    assert main(_audit_args(os.path.join(FIXTURES, "nope.wbk"))) == 2
    assert "error:" in capsys.readouterr().err


def test_audit_parse_error_exit_two(tmp_path, capsys):
    bad = tmp_path / "bad.wbk"
    bad.write_text("[sheet: S]\n=1+\n")
    assert main(_audit_args(str(bad))) == 2
    assert "error:" in capsys.readouterr().err


def test_random_requires_seed(capsys):
    assert main(_audit_args(WORKBOOK, "--random", "5")) == 2
    assert "--seed" in capsys.readouterr().err


def test_audit_csv_report_to_file(tmp_path):
    out = tmp_path / "report.csv"
    code = main(_audit_args(WORKBOOK, "--report", "csv", "--out", str(out)))
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("scenario_id,")


def test_audit_rerun_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["--report", "csv", "--random", "12", "--seed", "42"]
    assert main(_audit_args(WORKBOOK, *args, "--out", str(a))) == 0
    assert main(_audit_args(WORKBOOK, *args, "--out", str(b))) == 0
    assert a.read_bytes() == b.read_bytes()


def test_audit_loose_tolerance_hides_small_mutant(capsys):
    # The dropped-year mutant is a large error; even it passes at rel=10.
    code = main(_audit_args(mutant_path("dropped_term"), "--rel-tol", "10"))
    assert code == 0
    capsys.readouterr()


def test_eval_single_cell(capsys):
    assert main(["eval", "--workbook", WORKBOOK, "--cell", "Results!B1"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("Results!B1 = ")
    assert float(out.split("=")[1]) == (57 + 649 + 697) * 3.0


def test_eval_all_formula_cells(capsys):
    assert main(["eval", "--workbook", WORKBOOK]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 5 * 3 + 4  # 3 net-revenue rows per year + Results


def test_shadow_eval(capsys):
    assert main(["shadow-eval", "--model", MODEL, "--data", DATA]) == 0
    captured = capsys.readouterr()
    lines = captured.out.splitlines()
    values = dict(line.split(" = ") for line in lines)
    assert float(values["Investment(2001)"]) == (57 + 649 + 697) * 3.0
    assert "unused input parameter PricePerByte" in captured.err


def test_scenarios_subcommand(capsys):
    assert main(["scenarios", "--model", MODEL, "--bindings", BINDINGS,
                 "--suite", "oat"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 1 + 2 * 4
    assert lines[0].startswith("default: ")


def test_scenarios_rerun_byte_identical(capsys):
    args = ["scenarios", "--model", MODEL, "--bindings", BINDINGS,
            "--random", "7", "--seed", "42"]
    assert main(args) == 0
    first = capsys.readouterr().out
    assert main(args) == 0
    assert capsys.readouterr().out == first


def test_cost_model_default_grid(capsys):
    assert main(["cost-model"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "d,levels,traditional_minutes,around_minutes"
    assert len(lines) == 1 + 4 * 30  # dims 1..4, levels 1..30
    assert lines[1] == "1,1,3,6"


def test_cost_model_bad_range(capsys):
    assert main(["cost-model", "--levels", "5"]) == 2
    assert "error:" in capsys.readouterr().err


def test_audit_threads_env_matches(tmp_path, monkeypatch):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(_audit_args(WORKBOOK, "--report", "csv", "--out", str(a))) == 0
    monkeypatch.setenv("SHADOW_AUDIT_THREADS", "4")
    assert main(_audit_args(WORKBOOK, "--report", "csv", "--out", str(b))) == 0
    assert a.read_bytes() == b.read_bytes()
