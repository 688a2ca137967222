import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from meroforms.cli import EXIT_ERROR, EXIT_FAILED, EXIT_OK, EXIT_UNKNOWN, main
from meroforms.divisor import AbstractForm
from meroforms.errors import ParseError, SplitFieldRequired
from meroforms.parse import (
    equation_text,
    parse_branch_data,
    parse_equation,
    parse_expr,
    parse_form,
    parse_input,
    parse_residue,
)

EX1 = "y' = y^2*(y-1)^3*(y-2)^5"


# --- parsing ---------------------------------------------------------------


@pytest.mark.parametrize(
    "text",
    ["x^2", "(x+1)/(x-1)", "2x^3 - x/3", "1/(x^2*(x-1))", "(3/4)*(x - 1/2)^2", "-x"],
)
def test_expr_round_trip(text):
    f = parse_expr(text)
    assert parse_expr(f.to_expr()) == f


def test_expr_values():
    f = parse_expr("2x^2 + 1/2")
    assert f(Fraction(1)) == Fraction(5, 2)
    assert parse_expr("x^-1") == parse_expr("1/x")
    assert parse_expr("0.25*x") == parse_expr("x/4")


@pytest.mark.parametrize(
    "text",
    ["1/x dx", "dx", "(x^4 - 16) dx", "2/(x^5 - x^3) dx", "x dx/(x-1)^2", "(1/x^2 + 1/(x-1)^2) dx"],
)
def test_form_round_trip(text):
    omega = parse_form(text)
    assert parse_form(str(omega)) == omega


def test_equation_is_reciprocal_form():
    omega = parse_equation("y' = (1/2)*(y^5-y^3)")
    assert omega == parse_form("2/(x^5 - x^3) dx")
    assert parse_equation(equation_text(omega)) == omega


@pytest.mark.parametrize(
    "text, pos",
    [("1/(x", 4), ("x +* 2", 3), ("x $ 1", 2), ("y^2 dx", 0), ("x dx dx", None)],
)
def test_parse_errors_carry_position(text, pos):
    with pytest.raises(ParseError) as info:
        parse_form(text)
    if pos is not None:
        assert info.value.position == pos


def test_form_needs_dx_and_nonzero():
    with pytest.raises(ParseError):
        parse_form("x^2")
    with pytest.raises(Exception):
        parse_form("0 dx")


def test_non_split_poles_fail_early():
    with pytest.raises(SplitFieldRequired):
        parse_input("1/(x^2 + 1) dx")
    # zeros off Q are fine until something needs them
    assert parse_input("(x^2 + 1)/(x^3 - x) dx").form.polar_divisor().degree == -4  # infinity is a simple pole too


def test_input_dispatch():
    assert parse_input(EX1).kind == "equation"
    assert parse_input("1/x dx").kind == "form"
    assert parse_input("4; 3+1|2+2|2+2").kind == "branch"
    doc = {"divisor": [["@a", -1], ["@b", -1]], "residues": {"@a": "1", "@b": "-1"}}
    spec = parse_input(json.dumps(doc))
    assert spec.kind == "abstract" and isinstance(spec.form, AbstractForm)
    assert parse_input({"curve": [0, 2, -2], "zeros": [[3, 1]]}).kind == "curve"
    with pytest.raises(ParseError):
        parse_input("{not json")
    with pytest.raises(ParseError):
        parse_input({"unrelated": 1})


def test_branch_data_text():
    bd = parse_branch_data("4; 3+1|2+2|2+2")
    assert bd.d == 4 and str(bd) == "4; 3+1|2+2|2+2"
    assert parse_branch_data(str(bd)) == bd


def test_residue_text():
    r = parse_residue("1 + 2*sqrt2", basis=("1", "sqrt2"))
    assert r.coords == {"1": 1, "sqrt2": 2}


# --- command line ----------------------------------------------------------


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    doc = json.loads(out)
    assert doc["exit_status"] == code
    return code, doc


def test_cli_classify(capsys):
    code, doc = run_json(capsys, "classify", "1/(x^3 - x^2) dx")
    assert code == EXIT_OK and doc["type"] == "general"
    code, out, _ = run(capsys, "classify", "1/x dx")
    assert code == EXIT_OK and "exponential" in out


def test_cli_decide_worked_examples(capsys):
    code, doc = run_json(capsys, "decide", EX1)
    assert code == EXIT_OK and doc["verdict"] == "new"
    code, doc = run_json(capsys, "decide", "y' = (1/2)*(y^5-y^3)")
    assert code == EXIT_OK and doc["verdict"] == "old" and doc["witness"]


def test_cli_decide_unknown_exit(capsys):
    ex3 = {
        "divisor": [["@a1", 2], ["@a2", 1], ["@a3", 1], ["@a4", -1], ["@a5", -1], ["@a6", -2], ["@a7", -2]],
        "residues": {"@a4": "1", "@a5": "1", "@a6": "1", "@a7": "-3"},
    }
    code, doc = run_json(capsys, "decide", json.dumps(ex3), "--max-degree", "2", "--no-fast-path")
    assert code == EXIT_UNKNOWN and doc["verdict"] == "unknown"


def test_cli_hurwitz(capsys):
    code, doc = run_json(capsys, "hurwitz", "4; 3+1|2+2|2+2")
    assert code == EXIT_OK and doc["realizable"] == "no"
    code, doc = run_json(capsys, "hurwitz", "5; 4+1|3+2|2+2+1")
    assert code == EXIT_OK and doc["realizable"] == "yes" and doc["constellation"]
    code, doc = run_json(capsys, "hurwitz", "9; 3+3+3|3+3+3|2+2+2+2+1", "--rules-only")
    assert code == EXIT_UNKNOWN


def test_cli_pullback(capsys):
    code, doc = run_json(capsys, "pullback", "--phi", "x^2", "--eta", "1/(x^3 - x^2) dx")
    assert code == EXIT_OK and doc["laws"] == "pass"
    assert parse_form(doc["omega"]) == parse_form("2/(x^5 - x^3) dx")


def test_cli_construct_and_basis(capsys):
    code, doc = run_json(capsys, "construct", "--r", "1", "--n", "1", "--m", "2")
    assert code == EXIT_OK and len(doc["members"]) == 1
    code, doc = run_json(capsys, "construct", "--curve", "0,2,-2", "--r", "1", "--n", "2", "--m", "2")
    assert code == EXIT_OK and doc["genus"] == 1
    code, doc = run_json(capsys, "omega-basis", "--n", "2", "--m", "4", "--z0", "2")
    assert code == EXIT_OK and doc["rank"] == 4


@pytest.mark.parametrize(
    "argv, code_name",
    [
        (["classify", "1/(x"], "SyntaxError"),
        (["decide", "1/(x^2 + 1) dx"], "SplitFieldRequired"),
        (["hurwitz", "4; 2+2|2+2"], None),
        (["construct", "--r", "0", "--m", "2"], None),
        (["omega-basis", "--n", "2", "--m", "4", "--w", "5,5,5,5"], None),
    ],
)
def test_cli_errors(capsys, argv, code_name):
    code, doc = run_json(capsys, *argv)
    assert code == EXIT_ERROR and "message" in doc["error"]
    if code_name:
        assert doc["error"]["code"] == code_name
    if code_name == "SyntaxError":
        assert doc["error"]["position"] == 4
    if code_name == "SplitFieldRequired":
        assert doc["error"]["hint"]


def test_cli_error_text_goes_to_stderr(capsys):
    code, out, err = run(capsys, "classify", "1/(x")
    assert code == EXIT_ERROR and out == "" and "SyntaxError" in err


def test_cli_input_from_file_and_stdin(tmp_path, capsys, monkeypatch):
    src = tmp_path / "form.txt"
    src.write_text("1/(x^3 - x^2) dx\n")
    out = tmp_path / "out.json"
    code, _, _ = run(capsys, "classify", f"@{src}", "--out", str(out))
    assert code == EXIT_OK and json.loads(out.read_text())["type"] == "general"
    monkeypatch.setattr(sys, "stdin", io.StringIO("1/x dx"))
    code, doc = run_json(capsys, "classify", "-")
    assert code == EXIT_OK and doc["type"] == "exponential"


def test_cli_failed_exit_code_is_distinct():
    assert len({EXIT_OK, EXIT_FAILED, EXIT_ERROR, EXIT_UNKNOWN}) == 4


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "meroforms", "decide", EX1, "--format", "json"],
        capture_output=True, text=True, timeout=120,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"] == "new"
