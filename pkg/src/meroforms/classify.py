"""
Four-way type of a 1-form on P^1 (exact / exponential / Weierstrass / general).

Weierstrass type never occurs on the projective line: a nonconstant map from
a genus-0 curve onto an elliptic curve violates Riemann-Hurwitz, so
``classify_type`` only ever returns the other three.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .arith import RatFunc, antiderivative_without_logs, rank_over_q
from .divisor import ExplicitForm, OneFormP1, ResidueVal, as_form
from .errors import LimitExceeded, PreconditionViolated

EXACT = "exact"
EXPONENTIAL = "exponential"
WEIERSTRASS = "weierstrass"
GENERAL = "general"


@dataclass
class FormType:
    kind: str
    rules: list = field(default_factory=list)
    evidence: dict = field(default_factory=dict)

    def __str__(self):
        return f"{self.kind} ({', '.join(self.rules)})"

    def to_json(self):
        return {"type": self.kind, "rules": list(self.rules), "evidence": self.evidence}


def q_linear_rank(values: Sequence[ResidueVal]) -> int:
    """Rank over Q of the span of ``values`` (basis symbols taken as independent)."""
    syms = sorted({s for v in values for s in v.symbols()})
    rows = [[v.coords.get(s, Fraction(0)) for s in syms] for v in values]
    return rank_over_q(rows)


def commensurable(a: ResidueVal, b: ResidueVal) -> bool:
    return q_linear_rank([a, b]) <= 1


def exponential_data(residues: Sequence[ResidueVal]):
    """``(c, [m_i])`` with integer ``m_i`` and ``r_i == c * m_i``, or ``None``.

    ``c`` is ``r_1`` divided by the lcm of the denominators of ``r_i / r_1``.
    """
    r1 = residues[0]
    ratios = []
    for r in residues:
        q = r.ratio_to(r1)
        if q is None:
            return None
        ratios.append(q)
    lcm = 1
    for q in ratios:
        lcm = lcm * q.denominator // math.gcd(lcm, q.denominator)
    c = r1 / lcm
    ms = [int(q * lcm) for q in ratios]
    assert all(c * m == r for m, r in zip(ms, residues))
    return c, ms


def classify_type(omega) -> FormType:
    """Decide the type of ``omega`` from its pole orders and residues."""
    omega = as_form(omega)
    poles = omega.polar_divisor().poles()
    res = omega.residues()
    simple = [p for p, n in poles if n == -1]
    higher = [p for p, n in poles if n <= -2]
    nonzero_higher = [p for p in higher if not res[p].is_zero()]

    if all(res[p].is_zero() for p, _ in poles):
        ft = FormType(EXACT, ["all-residues-zero"])
        if isinstance(omega, ExplicitForm):
            h = antiderivative_without_logs(omega.f)
            assert h.derivative() == omega.f
            ft.evidence["antiderivative"] = h.to_expr()
        return ft

    rules = []
    if nonzero_higher:
        rules.append("higher-pole-nonzero-residue")
    if higher and simple:
        rules.append("higher-and-simple-pole")
    if rules:
        ft = FormType(GENERAL, rules)
        ft.evidence["higher_poles"] = [str(p) for p in higher]
        ft.evidence["simple_poles"] = [str(p) for p in simple]
        return ft

    # only simple poles, all with nonzero residue
    rs = [res[p] for p in simple]
    data = exponential_data(rs)
    if data is None:
        a, b = next(
            (res[p], res[q]) for i, p in enumerate(simple) for q in simple[i + 1:] if not commensurable(res[p], res[q])
        )
        return FormType(GENERAL, ["incommensurable-simple-residues"], {"pair": [str(a), str(b)]})
    c, ms = data
    ft = FormType(EXPONENTIAL, ["commensurable-simple-residues"])
    ft.evidence["c"] = c.to_json()
    ft.evidence["multiplicities"] = {str(p): m for p, m in zip(simple, ms)}
    return ft


def exact_is_new(omega, verdict: FormType | None = None) -> bool:
    """For an exact form: new iff its divisor is ``-2[c]`` for a single point."""
    omega = as_form(omega)
    verdict = verdict or classify_type(omega)
    if verdict.kind != EXACT:
        raise PreconditionViolated(f"form is {verdict.kind}, not exact")
    # no zeros at all: the polar part already has degree -2
    pd = omega.polar_divisor()
    return len(pd) == 1 and pd.degree == -2


WITNESS_DEGREE_CAP = 64


def exponential_witness(omega: ExplicitForm, max_degree: int = WITNESS_DEGREE_CAP):
    """``(phi, eta)`` with ``phi`` of degree >= 2 and ``phi^* eta == omega``.

    Uses ``omega = c dh/h`` for ``h = prod (x - c_i)**m_i``; when ``h`` is a
    Moebius map it is squared first.
    """
    res = omega.residues()
    finite = [(p, r) for p, r in sorted(res.items()) if p.is_finite and not r.is_zero()]
    data = exponential_data([r for _, r in finite])
    if data is None or not data[0].is_rational():
        raise PreconditionViolated("form is not exponential with rational constant")
    c, ms = data
    if sum(abs(m) for m in ms) > max_degree:
        raise LimitExceeded(f"power-map witness would have degree {sum(abs(m) for m in ms)} > {max_degree}")
    cq = c.coords.get("1", Fraction(0))
    h = RatFunc.from_factors(1, [(p.value, m) for (p, _), m in zip(finite, ms)])
    k = 1 if h.map_degree >= 2 else 2
    phi = h**k
    eta = ExplicitForm(RatFunc.const(cq / k) / RatFunc.x())
    return phi, eta
