import json
from pathlib import Path

import pytest

from ncelim.cli import main

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_sigma_x_instance(capsys):
    code, out, _ = run(capsys, "eliminate", PROBLEMS / "sigma_x.txt")
    assert code == 0
    assert "verdict: Infeasible" in out
    assert "[[0.7071067812], [-0.7071067812]]" in out
    assert "seed: 0" in out


def test_positive_constant_without_variables(capsys):
    code, out, _ = run(capsys, "eliminate", PROBLEMS / "pd_constant.txt")
    assert code == 0
    assert "verdict: StrictlyFeasible" in out


def test_neither_span_strict(capsys):
    code, out, _ = run(capsys, "eliminate", PROBLEMS / "neither.txt")
    assert code == 0
    assert "verdict: StrictlyFeasible" in out
    assert "Neither" in out


def test_mode_flag_overrides_header(capsys):
    code, out, _ = run(capsys, "eliminate", PROBLEMS / "sigma_x.txt", "--mode", "strict")
    assert code == 0
    assert "mode: strict" in out and "verdict: Infeasible" in out


def test_malformed_matrix_row(capsys, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("kind: subspace\nd: 2\n\n[B]\nmatrix: [[1, 0], [0]]\n")
    code, out, err = run(capsys, "classify", bad)
    assert code == 1
    assert out == ""
    assert "line 5, column" in err


def test_wrong_kind_is_an_input_error(capsys):
    code, _, err = run(capsys, "classify", PROBLEMS / "sigma_x.txt")
    assert code == 1 and "kind subspace" in err


def test_classify_identity_span(capsys):
    code, out, _ = run(capsys, "classify", PROBLEMS / "span_identity.txt")
    assert code == 0
    assert "status: Definite" in out
    assert "coefficients: (1)" in out


def test_formula_intscal_report(capsys):
    code, out, _ = run(capsys, "formula", PROBLEMS / "intscal.txt")
    assert "oracle: false; checker: no witness found" in out
    assert code == 2


def test_formula_prime_size_refuted(capsys):
    code, out, _ = run(capsys, "formula", PROBLEMS / "prime_size.txt")
    assert code == 0
    assert "verdict: Refuted" in out


def test_formula_size_flag(capsys):
    code, out, _ = run(capsys, "formula", PROBLEMS / "prime_size.txt", "--size", "5")
    assert code == 0
    assert "verdict: HoldsByOracle" in out and "s: 5" in out


def test_formula_syntax_error(capsys, tmp_path):
    bad = tmp_path / "f.txt"
    bad.write_text("kind: formula\ns: 2\n\n[formula]\nexists X: eq(X +)\n")
    code, _, err = run(capsys, "formula", bad)
    assert code == 1 and "column" in err


def test_spectrahedrop_and_lift(capsys):
    code, out, _ = run(capsys, "spectrahedrop", PROBLEMS / "drop.txt")
    assert code == 0 and "verdict: Feasible" in out
    code, out, _ = run(capsys, "lift", PROBLEMS / "lift_square.txt")
    assert code == 0 and "Feasible" in out


def test_reports_are_deterministic(capsys):
    first = run(capsys, "eliminate", PROBLEMS / "neither.txt", "--seed", "5")
    second = run(capsys, "eliminate", PROBLEMS / "neither.txt", "--seed", "5")
    assert first == second
    assert "seed: 5" in first[1]


def test_json_mirrors_text(capsys):
    _, text, _ = run(capsys, "eliminate", PROBLEMS / "sigma_x.txt")
    code, out, _ = run(capsys, "eliminate", PROBLEMS / "sigma_x.txt", "--json")
    data = json.loads(out)
    assert code == 0
    keys = [line.split(":")[0] for line in text.splitlines() if line and not line.startswith(" ")]
    assert keys == list(data)
    assert data["verdict"] == "Infeasible"
    assert data["witness"] == ["[[0.7071067812], [-0.7071067812]]"]


def test_selftest_quick(capsys):
    code, out, _ = run(capsys, "selftest", "--trials", "3", "--criteria", "1,3,4")
    assert code == 0
    assert out.count("PASS criterion") == 3
    assert "failed: none" in out


def test_missing_file(capsys):
    code, _, err = run(capsys, "eliminate", PROBLEMS / "does_not_exist.txt")
    assert code == 1 and err.startswith("error:")
