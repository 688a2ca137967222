from fractions import Fraction as F

import pytest

from meroforms.classify import (
    EXACT,
    EXPONENTIAL,
    GENERAL,
    classify_type,
    exact_is_new,
    exponential_data,
    exponential_witness,
    q_linear_rank,
)
from meroforms.divisor import AbstractForm, Divisor, PointP1, ResidueVal, pullback_form
from meroforms.errors import PreconditionViolated
from meroforms.parse import parse_form

one = ResidueVal.rational(1)
s2 = ResidueVal.symbol("sqrt2")


def test_q_linear_rank():
    assert q_linear_rank([one, s2]) == 2
    assert q_linear_rank([ResidueVal.rational(F(2, 3)), ResidueVal.rational(F(-4, 5))]) == 1
    assert q_linear_rank([one, s2, one + s2]) == 2
    assert q_linear_rank([]) == 0


@pytest.mark.parametrize(
    "text, kind, rule",
    [
        ("1/(x^2*(x-1)) dx", GENERAL, "higher-and-simple-pole"),  # y' = y^3 - y^2
        ("1/x dx", EXPONENTIAL, "commensurable-simple-residues"),
        ("1/(x-1)^2 dx", EXACT, "all-residues-zero"),
        ("2*x dx", EXACT, "all-residues-zero"),
        ("1/(x^3 - x^2) dx", GENERAL, "higher-pole-nonzero-residue"),
        ("1/(x^2 - 1) dx", EXPONENTIAL, "commensurable-simple-residues"),
        ("(x^2 + 1)/(x^3 - x) dx", EXPONENTIAL, "commensurable-simple-residues"),
    ],
)
def test_classify_table(text, kind, rule):
    ft = classify_type(parse_form(text))
    assert ft.kind == kind and rule in ft.rules


def test_incommensurable_simple_poles_are_general():
    P = PointP1.parse
    div = Divisor([(P("@c1"), -1), (P("@c2"), -1), (P("@c3"), -1), (P("@z"), 1)])
    omega = AbstractForm(div, {P("@c1"): one, P("@c2"): s2, P("@c3"): -(one + s2)}, ["sqrt2"])
    ft = classify_type(omega)
    assert ft.kind == GENERAL and ft.rules == ["incommensurable-simple-residues"]


def test_exact_is_new():
    assert exact_is_new(parse_form("1/(x-3)^2 dx"))
    assert exact_is_new(parse_form("5 dx"))  # double pole at infinity only
    assert not exact_is_new(parse_form("2*x dx"))
    assert not exact_is_new(parse_form("(1/x^2 + 1/(x-1)^2) dx"))
    with pytest.raises(PreconditionViolated):
        exact_is_new(parse_form("1/x dx"))


def test_exact_evidence_is_an_antiderivative():
    omega = parse_form("(1/x^2 + 1/(x-1)^2) dx")
    ft = classify_type(omega)
    assert ft.evidence["antiderivative"] == "(-2*x + 1)/(x^2 - x)"


def test_exponential_data_is_canonical():
    rs = [ResidueVal.rational(F(2, 3)), ResidueVal.rational(F(-1, 2)), ResidueVal.rational(F(-1, 6))]
    c, ms = exponential_data(rs)
    assert c == ResidueVal.rational(F(1, 6)) and ms == [4, -3, -1]
    assert exponential_data([one, s2]) is None


@pytest.mark.parametrize("text", ["1/x dx", "3/(x^2 - 1) dx", "(1/x - 2/(x-1) + 1/(x-5)) dx"])
def test_exponential_witness_reproduces_form(text):
    omega = parse_form(text)
    phi, eta = exponential_witness(omega)
    assert phi.map_degree >= 2
    assert pullback_form(phi, eta) == omega


@pytest.mark.parametrize("c", [F(3), F(-2, 7)])
def test_scaling_keeps_type(c):
    for text in ["1/(x^3 - x^2) dx", "1/x dx", "1/(x-1)^2 dx"]:
        omega = parse_form(text)
        assert classify_type(omega.scale(c)).kind == classify_type(omega).kind
