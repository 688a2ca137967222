import pytest

from meroforms.decider import (
    NEW,
    OLD,
    UNKNOWN,
    VERIFIED,
    decide,
    degree_candidates,
    enumerate_candidates,
    fast_path,
    synthesize_witness,
)
from meroforms.divisor import AbstractForm, Divisor, PointP1, ResidueVal, pullback_form, verify_pullback_laws
from meroforms.errors import NotGeneralType, NotSynthesized
from meroforms.parse import parse_expr, parse_form, parse_input

P = PointP1.parse

EX1 = "y' = y^2*(y-1)^3*(y-2)^5"
EX2 = "y' = (1/2)*(y^5-y^3)"
EX3 = {
    "divisor": [["@a1", 2], ["@a2", 1], ["@a3", 1], ["@a4", -1], ["@a5", -1], ["@a6", -2], ["@a7", -2]],
    "residues": {"@a4": "1", "@a5": "1", "@a6": "1", "@a7": "-3"},
}


def form(x):
    return parse_input(x).form


def test_degree_candidates_worked_examples():
    assert degree_candidates(form(EX1)) == [3]
    assert degree_candidates(form(EX2)) == [2]
    assert degree_candidates(form(EX3)) == [2, 3]


def test_degree_candidates_needs_general_type():
    with pytest.raises(NotGeneralType):
        degree_candidates(parse_form("1/x dx"))


def test_example_two_has_one_candidate():
    cands = enumerate_candidates(form(EX2), 2)
    assert len(cands) == 1
    c = cands[0]
    assert str(c.branch_data) == "2; 2|2"
    assert c.ram_indices == {P(0): 2, P("inf"): 2, P(1): 1, P(-1): 1}
    assert c.eta_divisor.degree == -2
    assert sorted(n for _, n in c.eta_divisor.items()) == [-2, -1, 1]
    assert c.problems(form(EX2)) == []


@pytest.mark.parametrize("src, d", [(EX1, 3), (EX3, 2), (EX3, 3)])
def test_known_eliminations(src, d):
    assert enumerate_candidates(form(src), d) == []


def test_decide_worked_examples():
    assert decide(form(EX1)).verdict == NEW
    dec = decide(form(EX2))
    assert dec.verdict == OLD and dec.confidence == VERIFIED
    phi, eta = dec.witness
    assert phi == parse_expr("x^2") and eta == parse_form("1/(x^3 - x^2) dx")
    assert decide(form(EX3)).verdict == NEW


def test_new_by_exhaustion_is_stable_under_bigger_budget():
    for src in (EX1, EX3):
        omega = form(src)
        dec = decide(omega, use_fast_path=False)
        assert dec.verdict == NEW and dec.criterion == "exhaustion"
        for t in dec.trace:
            assert enumerate_candidates(omega, t["d"], node_budget=2 * 10**6) == []


@pytest.mark.parametrize(
    "src, criterion",
    [
        ("y' = y^3 - y^2", "one-zero-prime"),
        ("y' = y/(y+1)", "one-zero-prime"),
        ("y' = y^2*(y-1)*(y-3)^2", None),
    ],
)
def test_fast_path_agrees_with_full_search(src, criterion):
    omega = form(src)
    fast = fast_path(omega)
    if criterion is not None:
        assert fast.verdict == NEW and fast.criterion == criterion
    full = decide(omega, use_fast_path=False)
    if fast is not None and fast.verdict == NEW:
        assert full.verdict == NEW


def test_simple_pole_residue_example():
    # dx/(x-c1) + sqrt2 dx/(x-c2) + sqrt3 dx/(x-c3) + x dx
    one, s2, s3 = ResidueVal.rational(1), ResidueVal.symbol("sqrt2"), ResidueVal.symbol("sqrt3")
    div = Divisor(
        [(P("@c1"), -1), (P("@c2"), -1), (P("@c3"), -1), (P("inf"), -3)]
        + [(P(f"@z{i}"), 1) for i in range(1, 5)]
    )
    omega = AbstractForm(div, {P("@c1"): one, P("@c2"): s2, P("@c3"): s3, P("inf"): -(one + s2 + s3)}, ["sqrt2", "sqrt3"])
    dec = decide(omega)
    assert dec.verdict == NEW and dec.criterion == "simple-pole-residues"


def test_two_zero_prime():
    # zeros of orders 1 and 2, with 3 and 5 prime; nothing at infinity
    omega = parse_form("x*(x-1)^2/((x-2)^3*(x-3)^2) dx")
    assert str(omega.divisor()) == "[0] + 2[1] - 3[2] - 2[3]"
    dec = decide(omega)
    assert dec.verdict == NEW and dec.criterion == "two-zero-prime"


def test_exponential_and_exact_verdicts():
    dec = decide(parse_form("1/x dx"))
    assert dec.verdict == OLD and dec.confidence == VERIFIED
    assert decide(parse_form("1/(x-1)^2 dx")).verdict == NEW
    dec = decide(parse_form("(1/x^2 + 1/(x-1)^2) dx"))
    assert dec.verdict == OLD and dec.confidence == VERIFIED


def test_synthesize_power_map():
    omega = parse_form("1/x dx")
    (cand,) = enumerate_candidates(omega, 3, require_eta_zero=False)
    phi, eta = synthesize_witness(cand, omega)
    assert phi == parse_expr("x^3") and eta == parse_form("1/(3*x) dx")


def test_synthesize_rejects_three_branch_points():
    # a cubic with three critical values, pulled back from 0, 1 and infinity
    omega = pullback_form(parse_expr("x^2*(3 - 2*x)"), parse_form("1/(x^2*(x-1)) dx"))
    assert enumerate_candidates(omega, 2) == []
    (cand,) = enumerate_candidates(omega, 3)
    assert str(cand.branch_data) == "3; 2+1|2+1|3"
    with pytest.raises(NotSynthesized):
        synthesize_witness(cand, omega)
    assert decide(omega).verdict == OLD


@pytest.mark.parametrize(
    "phi, eta",
    [
        ("x^2", "1/(x^3 - x^2) dx"),
        ("x^2", "1/((x-1)*(x-4)^2) dx"),
        ("x^2", "x/((x-9)^3) dx"),
        ("x^2*(3 - 2*x)", "1/(x^2*(x-1)) dx"),
        ("x^3 - 3*x", "1/((x-2)^2*(x+2)) dx"),
        ("4*x*(1-x)", "x/((x-1)^3) dx"),
    ],
)
def test_pullbacks_are_never_new(phi, eta):
    phi, eta = parse_expr(phi), parse_form(eta)
    omega = pullback_form(phi, eta)
    assert verify_pullback_laws(phi, eta).ok
    dec = decide(omega)
    assert dec.verdict in (OLD, UNKNOWN)
    if dec.witness is not None:
        w_phi, w_eta = dec.witness
        assert pullback_form(w_phi, w_eta) == omega


def test_max_degree_gives_unknown():
    dec = decide(form(EX3), max_degree=2, use_fast_path=False)
    assert dec.verdict == UNKNOWN and dec.obstructions


def test_decision_json_is_stable():
    doc = decide(form(EX2)).to_json()
    for key in ("type", "verdict", "criterion", "confidence", "degree_trace", "certificate", "witness"):
        assert key in doc
    assert doc == decide(form(EX2)).to_json()
