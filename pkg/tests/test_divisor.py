from fractions import Fraction as F

import pytest
import sympy

from meroforms.arith import Poly, RatFunc
from meroforms.divisor import (
    INF,
    AbstractForm,
    Divisor,
    ExplicitForm,
    PointP1,
    ResidueVal,
    pullback_form,
    ramification_profile,
    verify_pullback_laws,
)
from meroforms.errors import ConstantMap, InvalidForm, SplitFieldRequired
from meroforms.parse import parse_expr, parse_form

P = PointP1.parse


def test_points_and_ordering():
    assert P("inf") is INF
    assert P("@a").is_generic and P("3/2").value == F(3, 2)
    pts = sorted([P("@zero10"), INF, P(2), P("@zero2"), P(-1)])
    assert [str(p) for p in pts] == ["-1", "2", "∞", "@zero2", "@zero10"]


def test_divisor_arithmetic():
    d = Divisor([(P(0), 2), (P(1), -1), (P(0), -2), (INF, -1)])
    assert d[P(0)] == 0 and P(0) not in d.support()
    assert d.degree == -2
    assert str(d) == "-[1] - [∞]"


@pytest.mark.parametrize(
    "text, expected",
    [
        ("1/(x^2*(x-1)^3*(x-2)^5) dx", "8[∞] - 2[0] - 3[1] - 5[2]"),  # y' = y^2 (y-1)^3 (y-2)^5
        ("dx", "-2[∞]"),
        ("2/(x^5 - x^3) dx", "3[∞] - [-1] - 3[0] - [1]"),  # poles at +-1, not +-i
    ],
)
def test_divisor_of_form(text, expected):
    omega = parse_form(text)
    assert str(omega.divisor()) == expected
    assert omega.divisor().degree == -2


def test_residues_of_form():
    r = parse_form("1/(x^3 - x^2) dx").residues()
    assert r[P(0)] == ResidueVal.rational(-1)
    assert r[P(1)] == ResidueVal.rational(1)
    assert r[INF].is_zero()
    r = parse_form("(x+1)/x dx").residues()
    assert r[P(0)] == ResidueVal.rational(1) and r[INF] == ResidueVal.rational(-1)


def test_residues_match_sympy():
    x = sympy.Symbol("x")
    f = (3 * x**2 - 1) / (x**2 * (x - 2) ** 3 * (2 * x + 1))
    omega = parse_form("(3*x^2 - 1)/(x^2*(x-2)^3*(2*x+1)) dx")
    for c in (0, 2, sympy.Rational(-1, 2)):
        want = sympy.residue(f, x, c)
        assert omega.residues()[P(str(c))] == ResidueVal.rational(F(str(want)))


def test_abstract_form_validation():
    basis = ["sqrt2", "sqrt3"]
    one, s2, s3 = ResidueVal.rational(1), ResidueVal.symbol("sqrt2"), ResidueVal.symbol("sqrt3")
    div = Divisor([(P("@c1"), -1), (P("@c2"), -1), (P("@c3"), -1), (INF, -3), (P("@z1"), 1), (P("@z2"), 1), (P("@z3"), 1), (P("@z4"), 1)])
    res = {P("@c1"): one, P("@c2"): s2, P("@c3"): s3, INF: -(one + s2 + s3)}
    omega = AbstractForm(div, res, basis)
    assert omega.residues() == res
    with pytest.raises(InvalidForm):
        AbstractForm(div, {P("@c1"): one, P("@c2"): s2, P("@c3"): s3, INF: -one}, basis)
    with pytest.raises(InvalidForm):
        AbstractForm(Divisor([(P("@a"), -1), (P("@b"), -1)]), {P("@a"): one}, [])
    with pytest.raises(InvalidForm):
        AbstractForm(Divisor([(P("@a"), -3)]), {}, [])


def test_residue_vals():
    a = ResidueVal({"1": 2, "s": -1})
    assert a - a == ResidueVal() and (a * 3).coords == {"1": 6, "s": -3}
    assert a.ratio_to(a * F(1, 2)) == 2
    assert ResidueVal.symbol("s").ratio_to(ResidueVal.rational(1)) is None


def test_pullback_examples():
    omega = pullback_form(parse_expr("x^2"), parse_form("1/(x^3 - x^2) dx"))
    assert omega == parse_form("2/(x^5 - x^3) dx")
    eta = parse_form("(x+3)/(x-1)^2 dx")
    assert pullback_form(parse_expr("x"), eta) == eta
    assert pullback_form(parse_expr("x^3"), parse_form("1/x dx")) == parse_form("3/x dx")
    with pytest.raises(ConstantMap):
        pullback_form(RatFunc(5), eta)


def test_pullback_composes():
    eta = parse_form("1/(x^2 - 1) dx")
    phi1, phi2 = parse_expr("x^2 + 1"), parse_expr("1/(x-2)")
    lhs = pullback_form(phi2.compose(phi1), eta)
    assert lhs == pullback_form(phi1, pullback_form(phi2, eta))


def test_ramification_profile():
    assert ramification_profile(parse_expr("x^2"), P(0)) == [(P(0), 2)]
    assert sorted(ramification_profile(parse_expr("x^2"), P(1))) == [(P(-1), 1), (P(1), 1)]
    # fibre of x^3 - 3x over -2, from an independent factorisation
    x = sympy.Symbol("x")
    want = sorted((P(str(r)), m) for r, m in sympy.roots(x**3 - 3 * x + 2).items())
    assert sorted(ramification_profile(parse_expr("x^3 - 3*x"), P(-2))) == want == [(P(-2), 1), (P(1), 2)]
    assert ramification_profile(parse_expr("x^2/(x-1)"), INF) == [(P(1), 1), (INF, 1)]
    assert sum(e for _, e in ramification_profile(parse_expr("(x^3 - x)/(x-3)"), P(0))) == 3
    with pytest.raises(SplitFieldRequired):
        ramification_profile(parse_expr("x^2"), P(2))


def test_verify_laws_example_two():
    rep = verify_pullback_laws(parse_expr("x^2"), parse_form("1/(x^3 - x^2) dx"))
    assert rep.ok
    assert rep.checked["order"] >= 3 and rep.checked["residue_scaling"] >= 2


def test_verify_laws_residue_scaling():
    phi, eta = parse_expr("x^3"), parse_form("1/x dx")
    omega = pullback_form(phi, eta)
    assert omega.residues()[P(0)] == ResidueVal.rational(3)
    assert verify_pullback_laws(phi, eta).ok
    assert verify_pullback_laws(parse_expr("x"), parse_form("(x+3)/(x-1)^2 dx")).ok


def test_explicit_form_rejects_zero():
    with pytest.raises(InvalidForm):
        ExplicitForm(RatFunc(Poly([])))
