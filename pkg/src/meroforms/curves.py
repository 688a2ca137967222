"""
Divisors of explicit 1-form classes on elliptic/hyperelliptic curves, the
integer sets D(n), sufficient criteria for a form to be new and of general
type, and constructions of families satisfying them.

Curves are ``y^2 = (x - e_1)...(x - e_{2g+1})``.  Ordinary points are stored as
``(x, sign)`` because ``y`` is usually irrational; the hyperelliptic involution
flips the sign and fixes the special points ``(e_i, 0)`` and infinity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .arith import Poly, RatFunc, format_rat, rank_over_q, to_rat
from .classify import q_linear_rank
from .divisor import INF, AbstractForm, Divisor, ExplicitForm, PointP1, ResidueVal, residue_sum
from .errors import (
    CoordinateCollision,
    HypothesisViolated,
    InfeasibleParameters,
    ResidueSumNonzero,
    ShapeMismatch,
)

# --- D(n) -------------------------------------------------------------------


def smallest_prime_factor(m: int) -> int:
    if m < 2:
        raise ValueError(f"{m} has no prime factor")
    if m % 2 == 0:
        return 2
    q = 3
    while q * q <= m:
        if m % q == 0:
            return q
        q += 2
    return m


def is_prime(m: int) -> bool:
    return m >= 2 and smallest_prime_factor(m) == m


class DSet:
    """Integers >= 2 whose only divisor <= n is 1 (smallest prime factor > n).

    The integer 1 is deliberately left out; see ``nth_element``.
    """

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("D(n) needs n >= 1")
        self.n = n

    def member(self, m: int) -> bool:
        return m >= 2 and smallest_prime_factor(m) > self.n

    __contains__ = member

    def __iter__(self):
        m = self.n + 1
        while True:
            if self.member(m):
                yield m
            m += 1

    def nth_element(self, k: int) -> int:
        """k-th member (1-based) in ascending order, counting from the least member > 1."""
        if k < 1:
            raise ValueError("k must be >= 1")
        return next(itertools.islice(iter(self), k - 1, None))

    def first(self, k: int, *, primes_only: bool = False) -> list[int]:
        it = (m for m in self if not primes_only or is_prime(m))
        return list(itertools.islice(it, k))

    def __repr__(self):
        return f"DSet({self.n})"


def d_set(n: int) -> DSet:
    return DSet(n)


# --- curves -----------------------------------------------------------------


@dataclass(frozen=True)
class HyperCurve:
    """``y^2 = prod (x - e_i)`` with ``2g + 1`` distinct rational roots."""

    roots: tuple

    def __post_init__(self):
        rs = tuple(to_rat(r) for r in self.roots)
        if len(rs) < 3 or len(rs) % 2 == 0:
            raise ValueError("need an odd number >= 3 of branch roots")
        if len(set(rs)) != len(rs):
            raise CoordinateCollision("branch roots must be distinct")
        object.__setattr__(self, "roots", rs)

    @property
    def genus(self) -> int:
        return (len(self.roots) - 1) // 2

    def __str__(self):
        f = "".join(
            "x" if e == 0 else (f"(x - {format_rat(e)})" if e > 0 else f"(x + {format_rat(-e)})") for e in self.roots
        )
        return f"y^2 = {f}"


@dataclass(frozen=True)
class CurvePoint:
    kind: str  # "ordinary" | "special" | "inf"
    x: object = None  # Fraction or generic label (str)
    sign: int = 0
    index: int = -1

    def involution(self) -> "CurvePoint":
        if self.kind == "ordinary":
            return CurvePoint("ordinary", self.x, -self.sign)
        return self

    def sort_key(self):
        order = {"ordinary": 0, "special": 1, "inf": 2}[self.kind]
        xk = (0, self.x, "") if isinstance(self.x, Fraction) else (1, Fraction(0), str(self.x or ""))
        return (order, xk, -self.sign, self.index)

    def __str__(self):
        if self.kind == "inf":
            return "∞"
        xs = format_rat(self.x) if isinstance(self.x, Fraction) else f"@{self.x}"
        if self.kind == "special":
            return f"({xs},0)"
        return f"({xs},{'+' if self.sign > 0 else '-'})"

    def to_json(self):
        return str(self)


CURVE_INF = CurvePoint("inf")


def ordinary(x, sign: int = 1) -> CurvePoint:
    x = x if isinstance(x, str) else to_rat(x)
    return CurvePoint("ordinary", x, 1 if sign > 0 else -1)


def special(curve: HyperCurve, i: int) -> CurvePoint:
    return CurvePoint("special", curve.roots[i], 0, i)


@dataclass
class CurveFormSpec:
    """Data of ``F(x) * prod (x - e_i)^{k_i} * y^l dx`` with ordinary zeros/poles.

    ``zeros`` is ``[(x, u)]``, ``simple_poles`` is ``[x]``, ``higher_poles`` is
    ``[(x, w)]``; every x-coordinate stands for the pair ``(x, +), (x, -)``.
    """

    zeros: list = field(default_factory=list)
    simple_poles: list = field(default_factory=list)
    higher_poles: list = field(default_factory=list)
    k: list = field(default_factory=list)
    l: int = 1

    def x_coordinates(self) -> list:
        return [x for x, _ in self.zeros] + list(self.simple_poles) + [x for x, _ in self.higher_poles]

    def to_json(self):
        fmt = lambda v: v if isinstance(v, str) else format_rat(to_rat(v))  # noqa: E731
        return {
            "zeros": [[fmt(x), u] for x, u in self.zeros],
            "simple_poles": [fmt(x) for x in self.simple_poles],
            "higher_poles": [[fmt(x), w] for x, w in self.higher_poles],
            "k": list(self.k),
            "l": self.l,
        }


def _norm_x(x):
    return x.lstrip("@") if isinstance(x, str) and not _looks_rational(x) else to_rat(x)


def _looks_rational(s: str) -> bool:
    try:
        Fraction(s)
        return True
    except ValueError:
        return False


def curve_form_divisor(curve: HyperCurve, spec: CurveFormSpec) -> Divisor:
    g = curve.genus
    k = list(spec.k) + [0] * (2 * g + 1 - len(spec.k))
    if len(k) != 2 * g + 1:
        raise ShapeMismatch(f"expected {2 * g + 1} special exponents, got {len(spec.k)}")
    xs = [_norm_x(x) for x in spec.x_coordinates()]
    if len(set(xs)) != len(xs):
        raise CoordinateCollision("x-coordinates of zeros and poles must be distinct")
    for x in xs:
        if x in curve.roots:
            raise CoordinateCollision(f"x = {format_rat(x)} is a branch root; use the special exponents")
    for _, u in spec.zeros:
        if u < 1:
            raise ShapeMismatch("zero orders must be >= 1")
    for _, w in spec.higher_poles:
        if w < 2:
            raise ShapeMismatch("higher pole orders must be >= 2")
    items = []
    for x, u in spec.zeros:
        x = _norm_x(x)
        items += [(ordinary(x, 1), u), (ordinary(x, -1), u)]
    for x in spec.simple_poles:
        x = _norm_x(x)
        items += [(ordinary(x, 1), -1), (ordinary(x, -1), -1)]
    for x, w in spec.higher_poles:
        x = _norm_x(x)
        items += [(ordinary(x, 1), -w), (ordinary(x, -1), -w)]
    l = spec.l
    for i, ki in enumerate(k):
        items.append((special(curve, i), 2 * ki + l + 1))
    n = len(spec.simple_poles)
    inf_order = (
        2 * n
        + sum(2 * w for _, w in spec.higher_poles)
        - sum(2 * u for _, u in spec.zeros)
        - sum(2 * ki for ki in k)
        - l * (2 * g + 1)
        - 3
    )
    items.append((CURVE_INF, inf_order))
    div = Divisor(items)
    assert div.degree == 2 * g - 2
    return div


def form_status(spec: CurveFormSpec) -> str:
    """Forms with even ``l`` live in C(x) and are pullbacks along the x-projection."""
    if spec.l % 2 == 0:
        return "old (defined in the subfield C(x))"
    return "undetermined"


# --- new-and-general-type criteria ---------------------------------------------


@dataclass
class CriterionResult:
    passed: bool
    rule: str
    reasons: list = field(default_factory=list)
    params: dict = field(default_factory=dict)

    def __bool__(self):
        return self.passed

    def to_json(self):
        return {"passed": self.passed, "rule": self.rule, "reasons": list(self.reasons), "params": self.params}


def _shape(div: Divisor):
    zeros = [n for _, n in div.zeros()]
    simple = div.simple_poles()
    ws = [-n for _, n in div.higher_poles()]
    return zeros, simple, ws


def _has_unique(values: Sequence[int]) -> bool:
    counts = {v: values.count(v) for v in values}
    return any(c == 1 for c in counts.values())


def check_main_lemma(genus: int, div: Divisor) -> CriterionResult:
    """Pole-order criterion: ``w_i - 1`` avoids small divisors and some ``w_i`` is unique."""
    if div.degree != 2 * genus - 2:
        raise ShapeMismatch(f"divisor degree {div.degree} != 2g-2 = {2 * genus - 2}")
    us, simple, ws = _shape(div)
    r, n, m = len(us), len(simple), len(ws)
    params = {"g": genus, "r": r, "n": n, "m": m, "u": us, "w": ws}
    if r == 0 or m < 2:
        raise ShapeMismatch(f"need r > 0 zeros and m >= 2 higher poles (r={r}, m={m})")
    if n > 0:
        bound = 2 * genus + r + n - 1
        params["D"] = bound
        D = DSet(bound)
        reasons = []
        bad = [w for w in ws if not D.member(w - 1)]
        if bad:
            reasons.append(f"w-1 not in D({bound}) for w in {bad}")
        if not _has_unique(ws):
            reasons.append("no pole order w_i is unique")
        if not reasons:
            return CriterionResult(True, "main-lemma-i", [], params)
        # zeros/poles swapped: the fibres over a simple and a higher pole bound
        # e_P at a zero by 2g+n+m-1 (2g+r+n-1 is not enough, r = 1 breaks it)
        star = 2 * genus + n + m - 1
        params["D_star"] = star
        bad_u = [u for u in us if not DSet(star).member(u + 1)]
        if not bad_u and len(set(us)) == len(us):
            return CriterionResult(True, "main-lemma-i-star", [], params)
        reasons.append(
            f"variant: u+1 not in D({star}) for u in {bad_u}" if bad_u else "variant: zero orders not distinct"
        )
        return CriterionResult(False, "main-lemma-i", reasons, params)
    bound = 2 * genus + r + m
    params["D"] = bound
    D = DSet(bound)
    reasons = []
    bad = [w for w in ws if not (is_prime(w - 1) and D.member(w - 1))]
    if bad:
        reasons.append(f"w-1 not a prime in D({bound}) for w in {bad}")
    if not _has_unique(ws):
        reasons.append("no pole order w_i is unique")
    need = sum(ws) - m
    if max(us) < need:
        reasons.append(f"largest zero order {max(us)} < sum(w) - m = {need}")
    return CriterionResult(not reasons, "main-lemma-ii", reasons, params)


def check_simple_pole_theorem(residues: Iterable[ResidueVal], genus: int) -> CriterionResult:
    """Residue criterion: >= 2g+2 poles with nonzero residue, any 2g+2 of them Q-independent.

    ``residues`` has one entry per pole.  Two poles carrying the same residue
    count as a dependent pair, which is what the pullback argument needs.
    """
    res = [ResidueVal.parse(r) for r in residues]
    nonzero = [r for r in res if not r.is_zero()]
    k = 2 * genus + 2
    params = {"g": genus, "nonzero": len(nonzero), "distinct": len(set(nonzero))}
    if len(nonzero) < k:
        return CriterionResult(False, "simple-pole-residues", [f"only {len(nonzero)} nonzero residues, need {k}"], params)
    for subset in itertools.combinations(nonzero, k):
        if q_linear_rank(subset) < k:
            return CriterionResult(
                False,
                "simple-pole-residues",
                ["Q-dependent residues: " + ", ".join(str(s) for s in subset)],
                params,
            )
    return CriterionResult(True, "simple-pole-residues", [], params)


# --- constructions --------------------------------------------------------------


def _w_values(m: int, bound: int, primes_only: bool) -> list[int]:
    q1, q2 = DSet(bound).first(2, primes_only=primes_only)
    return [q1 + 1] + [q2 + 1] * (m - 1)


def _spread(total: int, r: int, shift: int) -> list[int] | None:
    """``r`` positive integers summing to ``total``; ``shift`` moves weight off the first."""
    if total < r:
        return None
    us = [total - (r - 1)] + [1] * (r - 1)
    if shift and r >= 2:
        if us[0] - shift < 1:
            return None
        us[0] -= shift
        us[1] += shift
    return us


@dataclass
class FamilyMember:
    form: object  # ExplicitForm on P^1, or CurveFormSpec
    divisor: Divisor
    certificate: CriterionResult

    def to_json(self):
        out = {"divisor": str(self.divisor), "criterion": self.certificate.to_json()}
        if isinstance(self.form, CurveFormSpec):
            out["spec"] = self.form.to_json()
        else:
            out["form"] = str(self.form)
        return out


def construct_family(curve: HyperCurve | None, r: int, n: int, m: int, count: int = 3) -> list[FamilyMember]:
    """New, general-type forms with ``r`` zeros, ``n`` simple and ``m`` higher poles.

    ``curve=None`` means P^1.  Pole orders are the smallest admissible values
    with the first one unique; points sit at small distinct integers.
    """
    g = 0 if curve is None else curve.genus
    if r <= 0 or n < 0 or m < 2:
        raise InfeasibleParameters("need r > 0, n >= 0, m >= 2")
    if n == 0 and m - r < 2 - 2 * g:
        raise InfeasibleParameters(f"with no simple poles need m - r >= {2 - 2 * g}")
    if curve is None:
        return _family_p1(r, n, m, count)
    return _family_curve(curve, r, n, m, count)


def _family_p1(r, n, m, count):
    if n > 0:
        ws = _w_values(m, r + n - 1, primes_only=False)
    else:
        ws = _w_values(m, r + m, primes_only=True)
    total = n + sum(ws) - 2
    out = []
    for shift in range(count):
        us = _spread(total, r, shift)
        if us is None or (n == 0 and us[0] < sum(ws) - m):
            break
        factors = [(i + 1, u) for i, u in enumerate(us)]
        factors += [(r + j + 1, -1) for j in range(n)]
        factors += [(r + n + j + 1, -w) for j, w in enumerate(ws)]
        form = ExplicitForm(RatFunc.from_factors(1, factors))
        div = form.divisor()
        cert = check_main_lemma(0, div)
        assert cert.passed, cert
        out.append(FamilyMember(form, div, cert))
        if r == 1:
            break
    return out


def _family_curve(curve, r, n, m, count):
    g = curve.genus
    if n % 2:
        raise InfeasibleParameters("on a curve the number of simple poles must be even")
    m_special = 1 if m % 2 else 2
    pairs_w = (m - m_special) // 2
    if n > 0:
        zero_special = r % 2
        bound = 2 * g + r + n - 1
        q = DSet(bound).first(2)
    else:
        zero_special = 1 if r % 2 else 2
        bound = 2 * g + r + m
        q = DSet(bound).first(2, primes_only=True)
    if m_special + zero_special > 2 * g + 1:
        raise InfeasibleParameters(
            f"needs {m_special + zero_special} special points but the curve has {2 * g + 1} finite ones"
        )
    pairs_u = (r - zero_special) // 2
    special_ws = [q[0] + 1, q[1] + 1][:m_special]
    pair_w = q[1] + 1
    w_points = special_ws + [pair_w] * (2 * pairs_w)
    total_zero = n + sum(w_points) + 2 * g - 2  # infinity gets order 0

    xs = []
    cand = 1
    while len(xs) < pairs_u + n // 2 + pairs_w:
        if Fraction(cand) not in curve.roots:
            xs.append(Fraction(cand))
        cand += 1

    out, seen = [], set()
    for shift in range(count):
        # minimal orders everywhere, the first zero slot absorbs the rest
        special_us = [2] * zero_special
        pair_us = [1] * pairs_u
        rest = total_zero - sum(special_us) - 2 * sum(pair_us)
        if rest < 0 or rest % 2:
            raise InfeasibleParameters("zero orders cannot absorb the pole budget")
        if special_us:
            special_us[0] += rest
            if shift:
                if len(special_us) > 1:
                    special_us[0] -= 2 * shift
                    special_us[1] += 2 * shift
                elif pair_us:
                    special_us[0] -= 2 * shift
                    pair_us[0] += shift
        else:
            pair_us[0] += rest // 2
            if shift and len(pair_us) > 1:
                pair_us[0] -= shift
                pair_us[1] += shift
        if min(special_us + pair_us, default=1) < 1 or any(u < 2 for u in special_us):
            break
        orders = [0] * (2 * g + 1)
        for i, s in enumerate(special_us):
            orders[i] = s
        for j, w in enumerate(special_ws):
            orders[len(special_us) + j] = -w
        spec = CurveFormSpec(
            zeros=[(xs[i], u) for i, u in enumerate(pair_us)],
            simple_poles=xs[pairs_u:pairs_u + n // 2],
            higher_poles=[(x, pair_w) for x in xs[pairs_u + n // 2:]],
            k=[o // 2 - 1 for o in orders],
            l=1,
        )
        div = curve_form_divisor(curve, spec)
        assert div[CURVE_INF] == 0, div
        if div in seen:
            break
        seen.add(div)
        cert = check_main_lemma(g, div)
        if not cert.passed:
            if out:
                break
            raise InfeasibleParameters("; ".join(cert.reasons))
        out.append(FamilyMember(spec, div, cert))
    if not out:
        raise InfeasibleParameters("no admissible zero distribution")
    return out


# --- forms with prescribed polar divisor --------------------------------------------


class PrincipalPartForm:
    """A form on P^1 given by principal parts at finite points.

    ``parts`` maps a point to ``{order j: coefficient of 1/(x-P)^j}``.  There is
    no polynomial part, so infinity is at worst a simple pole whose residue is
    minus the sum of the finite residues.
    """

    def __init__(self, parts: dict):
        clean = {}
        for p, terms in parts.items():
            t = {j: ResidueVal.parse(c) for j, c in terms.items()}
            t = {j: c for j, c in t.items() if not c.is_zero()}
            if t:
                clean[PointP1.parse(p)] = t
        self.parts = clean

    def __add__(self, other: "PrincipalPartForm"):
        merged = {p: dict(t) for p, t in self.parts.items()}
        for p, t in other.parts.items():
            cur = merged.setdefault(p, {})
            for j, c in t.items():
                cur[j] = cur.get(j, ResidueVal()) + c
        return PrincipalPartForm(merged)

    def scale(self, c) -> "PrincipalPartForm":
        c = to_rat(c)
        return PrincipalPartForm({p: {j: v * c for j, v in t.items()} for p, t in self.parts.items()})

    def residues(self) -> dict:
        res = {p: t.get(1, ResidueVal()) for p, t in self.parts.items()}
        inf = -residue_sum(res.values())
        if not inf.is_zero():
            res[INF] = inf
        return res

    def polar_divisor(self) -> Divisor:
        items = [(p, -max(t)) for p, t in self.parts.items()]
        if not -residue_sum(t.get(1, ResidueVal()) for t in self.parts.values()).is_zero():
            items.append((INF, -1))
        return Divisor(items)

    def abstract(self, zero_prefix: str = "zero") -> AbstractForm:
        """Generic-coefficient view: the zeros are distinct symbolic simple zeros."""
        polar = self.polar_divisor()
        nz = -polar.degree - 2
        items = list(polar.items()) + [(PointP1.generic(f"{zero_prefix}{i + 1}"), 1) for i in range(nz)]
        res = {p: v for p, v in self.residues().items() if polar[p] < 0}
        basis = sorted({s for t in self.parts.values() for v in t.values() for s in v.symbols()})
        return AbstractForm(Divisor(items), res, basis)

    def columns(self) -> list:
        cols = [(p, j) for p, t in self.parts.items() for j in t]
        return sorted(cols, key=lambda c: (c[0].sort_key(), c[1]))

    def to_json(self):
        return {
            p.to_json(): {str(j): c.to_json() for j, c in sorted(t.items())}
            for p, t in sorted(self.parts.items())
        }


def check_dim_count_lemma(form, genus: int = 0) -> CriterionResult:
    """Polar-divisor criterion used for vector spaces of new forms."""
    if isinstance(form, PrincipalPartForm):
        div, res = form.polar_divisor(), form.residues()
    else:
        div, res = form.divisor(), form.residues()
    simple = div.simple_poles()
    higher = div.higher_poles()
    ws = [-n for _, n in higher]
    n, m = len(simple), len(higher)
    bound = 2 * genus + n + m + 1
    params = {"g": genus, "n": n, "m": m, "w": ws, "D": bound}
    reasons = []
    if n < 1:
        reasons.append("no simple pole")
    hres = [res.get(p, ResidueVal()) for p, _ in higher]
    if sum(1 for v in hres if not v.is_zero()) < 2:
        reasons.append("fewer than two higher poles with nonzero residue")
    D = DSet(bound)
    bad = [w for w in ws if not D.member(w - 1)]
    if bad:
        reasons.append(f"w-1 not in D({bound}) for w in {bad}")
    if not _has_unique(ws):
        reasons.append("no pole order w_i is unique")
    if q_linear_rank([v for v in hres if not v.is_zero()]) < 2:
        reasons.append("higher-pole residues span a Q-space of dimension < 2")
    return CriterionResult(not reasons, "dim-count-lemma", reasons, params)


def _specialize(v: ResidueVal, table: dict) -> Fraction:
    return sum((c * table[s] for s, c in v.coords.items()), Fraction(0))


def coefficient_rank(forms: Sequence[PrincipalPartForm]) -> int:
    """Rank of the forms after substituting distinct rationals for the symbols."""
    syms = sorted({s for f in forms for t in f.parts.values() for v in t.values() for s in v.symbols()})
    table = {"1": Fraction(1)}
    for i, s in enumerate(s for s in syms if s != "1"):
        table[s] = Fraction(2 * i + 3, i + 2) + i * i
    cols = sorted({c for f in forms for c in f.columns()}, key=lambda c: (c[0].sort_key(), c[1]))
    rows = [[_specialize(f.parts.get(p, {}).get(j, ResidueVal()), table) for p, j in cols] for f in forms]
    return rank_over_q(rows)


@dataclass
class OmegaDBasis:
    forms: list
    labels: list
    orders: dict
    third_element: int

    def abstract_forms(self) -> list:
        return [f.abstract() for f in self.forms]


def omega_D_basis(n: int, m: int, z0: int, ws: Sequence[int]) -> OmegaDBasis:
    """At least ``n * (m // 2)`` independent new forms in Omega(D) on P^1.

    ``D = R_1 + .. + R_n + z0*inf + w_1 S_1 + .. + w_m S_m`` with symbolic
    points.  Form ``(i, k)`` has simple poles at ``R_i`` and infinity and
    higher poles at ``S_{2k-1}, S_{2k}``, all coefficients fresh symbols.
    Every ``S`` gets an order ``v`` with ``v - 1`` in the D-set that covers any
    linear combination; odd-indexed ``S`` share one order and even-indexed ones
    get pairwise distinct orders, so every combination keeps a unique order.
    """
    ws = list(ws)
    if n < 1 or m < 2 or z0 < 1:
        raise HypothesisViolated("need n >= 1, m >= 2, z0 >= 1")
    if len(ws) != m:
        raise HypothesisViolated(f"expected {m} pole orders, got {len(ws)}")
    s = DSet(n + m + 1).nth_element(3)
    if any(w < s for w in ws):
        raise HypothesisViolated(f"every w_i must be >= {s} (third element of D({n + m + 1}))")
    half = m // 2
    bound = (n + 1) + 2 * half + 1
    members = DSet(bound).first(half + 1)
    a, bs = members[0] + 1, [q + 1 for q in members[1:]]
    orders = {}
    for k in range(half):
        orders[2 * k] = a
        orders[2 * k + 1] = bs[k]
    for j, v in orders.items():
        if v > ws[j]:
            raise HypothesisViolated(
                f"S{j + 1} needs pole order {v} (v-1 in D({bound})) but D allows only {ws[j]}"
            )
    R = [PointP1.generic(f"R{i + 1}") for i in range(n)]
    S = [PointP1.generic(f"S{j + 1}") for j in range(m)]
    forms, labels = [], []
    for i in range(n):
        for k in range(half):
            tag = f"{i + 1}_{k + 1}"
            parts = {R[i]: {1: ResidueVal.symbol(f"c{tag}")}}
            for j in (2 * k, 2 * k + 1):
                parts[S[j]] = {
                    1: ResidueVal.symbol(f"r{tag}_{j + 1}"),
                    orders[j]: ResidueVal.symbol(f"l{tag}_{j + 1}"),
                }
            forms.append(PrincipalPartForm(parts))
            labels.append((i + 1, k + 1))
    return OmegaDBasis(forms, labels, {str(S[j]): v for j, v in orders.items()}, s)


def simple_pole_form_from_residues(points: Sequence, residues: Sequence):
    """The form with simple poles exactly at ``points`` carrying ``residues``."""
    pts = [PointP1.parse(p) for p in points]
    res = [ResidueVal.parse(r) for r in residues]
    if len(pts) != len(res):
        raise ValueError("points and residues differ in length")
    if len(set(pts)) != len(pts):
        raise ValueError("points must be distinct")
    pairs = [(p, r) for p, r in zip(pts, res) if not r.is_zero()]
    if len(pairs) < 2:
        raise ValueError("need at least two nonzero residues")
    total = residue_sum(r for _, r in pairs)
    if not total.is_zero():
        raise ResidueSumNonzero(f"residues sum to {total}")
    if all(p.is_concrete and r.is_rational() for p, r in pairs):
        f = RatFunc.const(0)
        for p, r in pairs:
            if p.is_finite:
                f = f + RatFunc(Poly.const(r.coords.get("1", 0)), Poly.linear(p.value))
        form = ExplicitForm(f)
        got = form.residues()
        assert all(got.get(p) == r for p, r in pairs)
        return form
    items = [(p, -1) for p, _ in pairs]
    items += [(PointP1.generic(f"zero{i + 1}"), 1) for i in range(len(pairs) - 2)]
    basis = sorted({s for _, r in pairs for s in r.symbols()})
    return AbstractForm(Divisor(items), dict(pairs), basis)


def double_pole_form(point=0) -> ExplicitForm:
    """``dx/(x-P)^2``: its only pole has order 2, so it cannot be a proper pullback."""
    p = PointP1.parse(point)
    if p.is_infinity:
        return ExplicitForm(RatFunc.const(1))
    return ExplicitForm(RatFunc(Poly.const(1), Poly.linear(p.value)**2))


def new_general_in_omega_D(simple_points: Sequence, higher: Sequence[tuple]):
    """A new, general-type form in Omega(D) on P^1, or ``None`` with the reason.

    ``D = sum R_i + sum w_j S_j``.  No such form exists for ``D = R_1 + R_2``
    (only exponential forms) or ``D = w S`` (only exact forms).
    """
    R = [PointP1.parse(p) for p in simple_points]
    S = [(PointP1.parse(p), int(w)) for p, w in higher]
    n, m = len(R), len(S)
    if n + m >= 3:
        pts = R + [p for p, _ in S]
        syms = [ResidueVal.symbol(f"s{i + 1}") for i in range(len(pts) - 1)]
        return simple_pole_form_from_residues(pts, syms + [-residue_sum(syms)]), "simple-pole-residues"
    if n > 0 and m > 0:
        (s1, _), r1 = S[0], R[0]
        parts = PrincipalPartForm({s1: {2: 1, 1: 1}, r1: {1: -1}})
        form = parts.abstract()
        return form, "single-higher-pole"
    if m == 2:
        (s1, w1), (s2, w2) = S
        if w1 == w2 == 2:
            form = AbstractForm(
                Divisor([(s1, -2), (s2, -2), (INF, 2)]),
                {s1: ResidueVal.symbol("a"), s2: -ResidueVal.symbol("a")},
                ["a"],
            )
            return form, "two-double-poles"
        fam = construct_family(None, 1, 0, 2, count=1)
        return fam[0].form, "main-lemma"
    return None, "only exponential or exact forms exist for this divisor"
