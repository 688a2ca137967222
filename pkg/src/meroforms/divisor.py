"""
Points, divisors, residues and 1-forms on the projective line.

A form is either *explicit* (``f(x) dx`` with ``f`` a rational function over Q)
or *abstract* (a divisor plus residues, where points may be symbolic labels
and residues may involve declared Q-independent symbols such as ``sqrt2``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .arith import Poly, RatFunc, format_rat, partial_fractions, split_linear_factors, to_rat
from .errors import ConstantMap, InvalidForm

# --- points ----------------------------------------------------------------


def _natural_key(label: str) -> tuple:
    """``zero2`` sorts before ``zero10``."""
    return tuple((0, int(t), "") if t.isdigit() else (1, 0, t) for t in re.findall(r"\d+|\D+", label))


@dataclass(frozen=True)
class PointP1:
    """A point of P^1: ``finite`` (rational value), ``inf``, or ``generic`` (label)."""

    kind: str
    value: Fraction | None = None
    label: str | None = None

    @classmethod
    def finite(cls, v) -> "PointP1":
        return cls("finite", to_rat(v))

    @classmethod
    def generic(cls, label: str) -> "PointP1":
        return cls("generic", None, label.lstrip("@"))

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    @property
    def is_infinity(self) -> bool:
        return self.kind == "inf"

    @property
    def is_generic(self) -> bool:
        return self.kind == "generic"

    @property
    def is_concrete(self) -> bool:
        return self.kind != "generic"

    def sort_key(self):
        if self.kind == "finite":
            return (0, self.value, "")
        if self.kind == "inf":
            return (1, Fraction(0), "")
        return (2, Fraction(0), _natural_key(self.label))

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __str__(self):
        if self.kind == "finite":
            return format_rat(self.value)
        if self.kind == "inf":
            return "∞"
        return f"@{self.label}"

    def to_json(self):
        """Wire form: rational string, ``"inf"`` or ``"@label"``."""
        if self.kind == "finite":
            return format_rat(self.value)
        if self.kind == "inf":
            return "inf"
        return f"@{self.label}"

    @classmethod
    def parse(cls, raw) -> "PointP1":
        if isinstance(raw, PointP1):
            return raw
        if isinstance(raw, (int, Fraction)):
            return cls.finite(raw)
        s = str(raw).strip()
        if s in ("inf", "∞", "oo", "infinity"):
            return INF
        if s.startswith("@"):
            if len(s) == 1:
                raise ValueError("empty generic point label")
            return cls.generic(s[1:])
        return cls.finite(s)


INF = PointP1("inf")


# --- divisors --------------------------------------------------------------


class Divisor:
    """Finite formal sum of points with nonzero integer coefficients."""

    __slots__ = ("_d",)

    def __init__(self, items: Mapping | Iterable = ()):
        pairs = items.items() if isinstance(items, Mapping) else items
        d: dict = {}
        for p, n in pairs:
            d[p] = d.get(p, 0) + int(n)
        self._d = {p: n for p, n in d.items() if n != 0}

    def __getitem__(self, p) -> int:
        return self._d.get(p, 0)

    order = __getitem__

    def items(self):
        return sorted(self._d.items(), key=lambda t: t[0].sort_key())

    def support(self) -> list:
        return [p for p, _ in self.items()]

    @property
    def degree(self) -> int:
        return sum(self._d.values())

    def zeros(self) -> list:
        return [(p, n) for p, n in self.items() if n > 0]

    def poles(self) -> list:
        return [(p, n) for p, n in self.items() if n < 0]

    def simple_poles(self) -> list:
        return [p for p, n in self.items() if n == -1]

    def higher_poles(self) -> list:
        return [(p, n) for p, n in self.items() if n <= -2]

    def zero_divisor_degree(self) -> int:
        return sum(n for _, n in self.zeros())

    def __eq__(self, other):
        return isinstance(other, Divisor) and self._d == other._d

    def __hash__(self):
        return hash(frozenset(self._d.items()))

    def __add__(self, other: "Divisor") -> "Divisor":
        return Divisor(list(self._d.items()) + list(other._d.items()))

    def __len__(self):
        return len(self._d)

    def __repr__(self):
        return f"Divisor({self})"

    def __str__(self):
        # zeros first, then poles; within each group by point order
        terms = sorted(self._d.items(), key=lambda t: (t[1] < 0, t[0].sort_key()))
        if not terms:
            return "0"
        out = ""
        for i, (p, n) in enumerate(terms):
            a = abs(n)
            body = f"[{p}]" if a == 1 else f"{a}[{p}]"
            if i == 0:
                out = ("-" if n < 0 else "") + body
            else:
                out += (" - " if n < 0 else " + ") + body
        return out

    def to_json(self):
        return [[p.to_json(), n] for p, n in self.items()]


# --- residues --------------------------------------------------------------


class ResidueVal:
    """Q-linear combination of basis symbols; ``"1"`` is the rational unit."""

    __slots__ = ("_c",)

    def __init__(self, coords: Mapping | None = None):
        c = {}
        for k, v in (coords or {}).items():
            v = to_rat(v)
            if v != 0:
                c[str(k)] = v
        self._c = c

    @classmethod
    def rational(cls, q) -> "ResidueVal":
        return cls({"1": q})

    @classmethod
    def symbol(cls, name: str, coeff=1) -> "ResidueVal":
        return cls({name: coeff})

    @classmethod
    def parse(cls, raw) -> "ResidueVal":
        if isinstance(raw, ResidueVal):
            return raw
        if isinstance(raw, Mapping):
            return cls(raw)
        return cls.rational(raw)

    @property
    def coords(self) -> dict:
        return dict(self._c)

    def is_zero(self) -> bool:
        return not self._c

    def is_rational(self) -> bool:
        return set(self._c) <= {"1"}

    def symbols(self) -> set:
        return set(self._c)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ResidueVal.rational(other)
        return isinstance(other, ResidueVal) and self._c == other._c

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    def __add__(self, other):
        other = ResidueVal.parse(other)
        c = dict(self._c)
        for k, v in other._c.items():
            c[k] = c.get(k, 0) + v
        return ResidueVal(c)

    __radd__ = __add__

    def __rsub__(self, other):
        return ResidueVal.parse(other) + (-self)

    def __neg__(self):
        return ResidueVal({k: -v for k, v in self._c.items()})

    def __sub__(self, other):
        return self + (-ResidueVal.parse(other))

    def __mul__(self, q):
        q = to_rat(q)
        return ResidueVal({k: v * q for k, v in self._c.items()})

    __rmul__ = __mul__

    def __truediv__(self, q):
        q = to_rat(q)
        return ResidueVal({k: v / q for k, v in self._c.items()})

    def ratio_to(self, other: "ResidueVal") -> Fraction | None:
        """The rational ``q`` with ``self == q * other``, or ``None``."""
        if other.is_zero():
            return None
        k0 = next(iter(other._c))
        q = self._c.get(k0, Fraction(0)) / other._c[k0]
        return q if self == other * q else None

    def __repr__(self):
        return f"ResidueVal({self})"

    def __str__(self):
        if not self._c:
            return "0"
        parts = []
        for k in sorted(self._c, key=lambda s: (s != "1", s)):
            v = self._c[k]
            if k == "1":
                parts.append(format_rat(v))
            elif v == 1:
                parts.append(k)
            elif v == -1:
                parts.append(f"-{k}")
            else:
                parts.append(f"{format_rat(v)}*{k}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self):
        return {k: format_rat(v) for k, v in sorted(self._c.items())}


def residue_sum(values: Iterable[ResidueVal]) -> ResidueVal:
    acc = ResidueVal()
    for v in values:
        acc = acc + v
    return acc


# --- forms -----------------------------------------------------------------


class OneFormP1:
    """Common interface of explicit and abstract 1-forms on P^1."""

    def divisor(self) -> Divisor:
        raise NotImplementedError

    def residues(self) -> dict:
        raise NotImplementedError

    def polar_divisor(self) -> Divisor:
        """The pole part of the divisor (never needs the zeros)."""
        return Divisor(self.divisor().poles())

    def residue(self, p: PointP1) -> ResidueVal:
        return self.residues().get(p, ResidueVal())


class ExplicitForm(OneFormP1):
    """The form ``f(x) dx``."""

    def __init__(self, f):
        f = f if isinstance(f, RatFunc) else RatFunc(f)
        if f.is_zero():
            raise InvalidForm("the zero 1-form is not allowed")
        self.f = f
        self._div = None
        self._res = None

    def __eq__(self, other):
        return isinstance(other, ExplicitForm) and self.f == other.f

    def __hash__(self):
        return hash(self.f)

    def __repr__(self):
        return f"ExplicitForm({self})"

    def __str__(self):
        body = self.f.to_expr()
        if body == "1":
            return "dx"
        if self.f.den.degree == 0 and len([c for c in self.f.num.coeffs if c]) > 1:
            body = f"({body})"
        return f"{body} dx"

    def divisor(self) -> Divisor:
        if self._div is None:
            _, fs = self.f.factored
            items = [(PointP1.finite(r), e) for r, e in fs]
            items.append((INF, -self.f.degree - 2))
            self._div = Divisor(items)
        return self._div

    def polar_divisor(self) -> Divisor:
        if self._div is not None:
            return Divisor(self._div.poles())
        _, fs = split_linear_factors(self.f.den) if self.f.den.degree > 0 else (1, [])
        items = [(PointP1.finite(r), -e) for r, e in fs]
        inf = -self.f.degree - 2
        if inf < 0:
            items.append((INF, inf))
        return Divisor(items)

    def residues(self) -> dict:
        if self._res is None:
            pf = partial_fractions(self.f)
            res = {PointP1.finite(c): ResidueVal.rational(pf.residue(c)) for c in pf.poles()}
            res[INF] = -residue_sum(res.values())
            self._res = res
        return dict(self._res)

    def scale(self, c) -> "ExplicitForm":
        return ExplicitForm(self.f * to_rat(c))


class AbstractForm(OneFormP1):
    """A form given only by its divisor and residues.

    ``residues`` must cover every pole; a missing entry at a pole of order
    <= -2 is read as residue zero.  Simple poles need a nonzero residue and the
    residues must sum to zero.
    """

    def __init__(self, divisor: Divisor, residues: Mapping, basis: Iterable[str] = ("1",)):
        self._div = divisor if isinstance(divisor, Divisor) else Divisor(divisor)
        self.basis = tuple(dict.fromkeys(["1", *basis]))
        res = {PointP1.parse(p): ResidueVal.parse(v) for p, v in residues.items()}
        self._res = self._validate(res)

    def _validate(self, res: dict) -> dict:
        div = self._div
        if div.degree != -2:
            raise InvalidForm(f"divisor {div} has degree {div.degree}, expected -2")
        for p, v in res.items():
            if div[p] >= 0 and not v.is_zero():
                raise InvalidForm(f"nonzero residue {v} at non-pole {p}")
            unknown = v.symbols() - set(self.basis)
            if unknown:
                raise InvalidForm(f"residue at {p} uses undeclared symbols {sorted(unknown)}")
        out = {}
        for p, n in div.poles():
            v = res.get(p, ResidueVal())
            if n == -1 and v.is_zero():
                raise InvalidForm(f"simple pole {p} needs a nonzero residue")
            out[p] = v
        total = residue_sum(out.values())
        if not total.is_zero():
            raise InvalidForm(f"residues sum to {total}, expected 0")
        return out

    def divisor(self) -> Divisor:
        return self._div

    def residues(self) -> dict:
        return dict(self._res)

    def __eq__(self, other):
        return (
            isinstance(other, AbstractForm)
            and self._div == other._div
            and self._res == other._res
        )

    def __hash__(self):
        return hash(self._div)

    def __repr__(self):
        return f"AbstractForm({self._div})"

    def __str__(self):
        res = ", ".join(f"{p}: {v}" for p, v in sorted(self._res.items()))
        return f"form with div {self._div}; residues {{{res}}}"

    def to_json(self):
        return {
            "divisor": self._div.to_json(),
            "residues": {p.to_json(): v.to_json() for p, v in sorted(self._res.items())},
            "basis": list(self.basis),
        }


def as_form(obj) -> OneFormP1:
    if isinstance(obj, OneFormP1):
        return obj
    return ExplicitForm(obj)


def divisor_of_form(omega) -> Divisor:
    return as_form(omega).divisor()


def residues_of_form(omega) -> dict:
    return as_form(omega).residues()


# --- pullback ---------------------------------------------------------------


def pullback_form(phi: RatFunc, eta) -> ExplicitForm:
    """``phi^* (f dx) = f(phi(x)) * phi'(x) dx``."""
    phi = phi if isinstance(phi, RatFunc) else RatFunc(phi)
    if phi.is_constant():
        raise ConstantMap(f"{phi} is constant")
    eta = as_form(eta)
    if not isinstance(eta, ExplicitForm):
        raise TypeError("pullback needs an explicit form")
    return ExplicitForm(eta.f.compose(phi) * phi.derivative())


def evaluate_map(phi: RatFunc, p: PointP1) -> PointP1:
    """Image of a concrete point under ``phi``."""
    if p.is_infinity:
        v = phi.value_at_infinity()
        return INF if v is None else PointP1.finite(v)
    if not p.is_finite:
        raise ValueError("cannot evaluate a map at a generic point")
    if phi.den(p.value) == 0:
        return INF
    return PointP1.finite(phi(p.value))


def ramification_profile(phi: RatFunc, q: PointP1) -> list[tuple[PointP1, int]]:
    """The fibre of ``phi`` over ``q`` as ``(point, ramification index)`` pairs."""
    phi = phi if isinstance(phi, RatFunc) else RatFunc(phi)
    if phi.is_constant():
        raise ConstantMap(f"{phi} is constant")
    q = PointP1.parse(q)
    n = phi.map_degree
    if q.is_infinity:
        g = phi.den
    else:
        g = phi.num - phi.den * q.value
    out = []
    if g.degree > 0:
        _, fs = split_linear_factors(g)
        out = [(PointP1.finite(r), m) for r, m in fs]
    e_inf = n - max(g.degree, 0)
    if e_inf > 0:
        out.append((INF, e_inf))
    return out


def local_ramification(phi: RatFunc, p: PointP1) -> tuple[PointP1, int]:
    """``(phi(p), e_p)``; only the multiplicity of ``p`` is needed, not the whole fibre."""
    phi = phi if isinstance(phi, RatFunc) else RatFunc(phi)
    q = evaluate_map(phi, p)
    g = phi.den if q.is_infinity else phi.num - phi.den * q.value
    if p.is_infinity:
        return q, phi.map_degree - g.degree
    e = g.shift(p.value).valuation()
    assert e >= 1
    return q, e


@dataclass
class LawReport:
    """Outcome of :func:`verify_pullback_laws`: per law, a list of failures."""

    omega: ExplicitForm
    failures: dict = field(default_factory=dict)
    checked: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not any(self.failures.values())

    def _tick(self, law: str, ok: bool, witness):
        self.checked[law] = self.checked.get(law, 0) + 1
        self.failures.setdefault(law, [])
        if not ok:
            self.failures[law].append(witness)

    def to_json(self):
        return {
            law: {"checked": self.checked.get(law, 0), "failures": [str(w) for w in fails]}
            for law, fails in self.failures.items()
        }


LAWS = ("order", "simple_poles", "higher_poles", "zeros", "fibre_ratio", "residue_scaling")


def verify_pullback_laws(phi: RatFunc, eta) -> LawReport:
    """Check the ramification/order/residue relations for ``omega = phi^* eta``."""
    phi = phi if isinstance(phi, RatFunc) else RatFunc(phi)
    eta = as_form(eta)
    omega = pullback_form(phi, eta)
    rep = LawReport(omega)
    for law in LAWS:
        rep.failures.setdefault(law, [])
    div_w, div_e = omega.divisor(), eta.divisor()
    res_w, res_e = omega.residues(), eta.residues()

    covered = set()
    for q, oq in div_e.items():
        fibre = ramification_profile(phi, q)
        ratios = {}
        for p, e in fibre:
            covered.add(p)
            op = div_w[p]
            rep._tick("order", e * (oq + 1) == op + 1, (p, q, e))
            if oq == -1:
                rep._tick("simple_poles", op == -1, (p, q))
            elif oq <= -2:
                rep._tick("higher_poles", op <= -2 and (op + 1) % e == 0, (p, q, e))
            elif oq > 0:
                rep._tick("zeros", op > 0 and (op + 1) % e == 0 and e != op + 1, (p, q, e))
            if oq != -1:
                ratios[p] = Fraction(op + 1, e)
            if oq < 0:
                rep._tick("residue_scaling", res_w.get(p, ResidueVal()) == res_e.get(q, ResidueVal()) * e, (p, q, e))
        rep._tick("fibre_ratio", len(set(ratios.values())) <= 1, (q, ratios))

    for p, op in div_w.items():
        q, e = local_ramification(phi, p)
        oq = div_e[q]
        rep._tick("order", e * (oq + 1) == op + 1, (p, q, e))
        if op == -1:
            rep._tick("simple_poles", oq == -1, (p, q))
        elif op <= -2:
            rep._tick("higher_poles", oq <= -2 and (op + 1) % e == 0, (p, q, e))
        else:
            # zero of omega: image is a zero of eta unless e == ord + 1
            rep._tick("zeros", (op + 1) % e == 0 and ((oq > 0) == (e != op + 1)), (p, q, e))
        rep._tick("order", p in covered or oq == 0, (p, "outside fibres of supp(eta)"))
    return rep
