"""
Exact univariate arithmetic over the rationals.

``Poly`` is a dense polynomial with ``Fraction`` coefficients (lowest degree
first).  ``RatFunc`` is a reduced quotient of two polynomials that also exposes
its factored form ``constant * prod (x - root)**exponent`` whenever numerator
and denominator split into rational linear factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .errors import DivisionByZeroFunction, PoleEvaluation, SplitFieldRequired

Rat = Fraction


def to_rat(value) -> Fraction:
    if isinstance(value, bool):
        raise TypeError("bool is not a rational number")
    if isinstance(value, float):
        raise TypeError(f"refusing inexact float {value!r}")
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


def format_rat(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class Poly:
    """Immutable dense polynomial over Q."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [to_rat(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    @classmethod
    def const(cls, c) -> "Poly":
        return cls([c])

    @classmethod
    def x(cls) -> "Poly":
        return cls([0, 1])

    @classmethod
    def linear(cls, root) -> "Poly":
        """The monic polynomial x - root."""
        return cls([-to_rat(root), 1])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        return poly_to_str(self, "x")

    def __bool__(self):
        return bool(self.coeffs)

    @staticmethod
    def _coerce(other) -> "Poly":
        if isinstance(other, Poly):
            return other
        return Poly.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return Poly(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        if not self.coeffs or not other.coeffs:
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result, base = Poly.const(1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __divmod__(self, other):
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        lc = other.lc
        if len(rem) <= dq:
            return Poly(), self
        quot = [Fraction(0)] * (len(rem) - dq)
        for i in range(len(rem) - 1, dq - 1, -1):
            c = rem[i] / lc
            if c == 0:
                continue
            quot[i - dq] = c
            for j, b in enumerate(other.coeffs):
                rem[i - dq + j] -= c * b
        return Poly(quot), Poly(rem[:dq])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other) -> "Poly":
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ArithmeticError(f"{other} does not divide {self}")
        return q

    def monic(self) -> "Poly":
        if not self.coeffs:
            return self
        lc = self.lc
        return Poly(c / lc for c in self.coeffs)

    def derivative(self) -> "Poly":
        return Poly(i * c for i, c in enumerate(self.coeffs) if i > 0)

    def __call__(self, value):
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * value + c
        return acc

    def compose(self, other: "Poly") -> "Poly":
        acc = Poly()
        for c in reversed(self.coeffs):
            acc = acc * other + c
        return acc

    def shift(self, c) -> "Poly":
        """p(x + c)."""
        return self.compose(Poly([c, 1]))

    def valuation(self) -> int:
        """Multiplicity of the root 0."""
        for i, c in enumerate(self.coeffs):
            if c != 0:
                return i
        raise ValueError("valuation of the zero polynomial")

    def gcd(self, other: "Poly") -> "Poly":
        a, b = self, self._coerce(other)
        while not b.is_zero():
            # keeping remainders monic stops coefficient growth
            a, b = b, (a % b)
            if not b.is_zero():
                b = b.monic()
        return a.monic()

    def primitive_integer_coeffs(self) -> list[int]:
        """Integer coefficient vector of a rational multiple with content 1."""
        den = 1
        for c in self.coeffs:
            den = den * c.denominator // math.gcd(den, c.denominator)
        ints = [int(c * den) for c in self.coeffs]
        g = 0
        for v in ints:
            g = math.gcd(g, v)
        return [v // g for v in ints] if g else ints


def poly_to_str(p: Poly, var: str = "x") -> str:
    if p.is_zero():
        return "0"
    parts = []
    for i in range(p.degree, -1, -1):
        c = p.coeffs[i]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if i == 0:
            body = format_rat(a)
        else:
            mono = var if i == 1 else f"{var}^{i}"
            if a == 1:
                body = mono
            elif a.denominator == 1:
                body = f"{a.numerator}*{mono}"
            else:
                body = f"({format_rat(a)})*{mono}"
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


# --- root extraction -------------------------------------------------------


def squarefree_decomposition(p: Poly) -> list[tuple[Poly, int]]:
    """Yun's algorithm: monic, pairwise coprime ``a_i`` with ``p = lc * prod a_i**i``."""
    if p.is_zero():
        raise ValueError("squarefree decomposition of the zero polynomial")
    f = p.monic()
    if f.degree == 0:
        return []
    out = []
    df = f.derivative()
    a = f.gcd(df)
    b = f.exact_div(a)
    c = df.exact_div(a)
    d = c - b.derivative()
    i = 1
    while b.degree > 0:
        a = b.gcd(d)
        b = b.exact_div(a)
        c = d.exact_div(a)
        d = c - b.derivative()
        if a.degree > 0:
            out.append((a, i))
        i += 1
    return out


def _divisors(n: int) -> list[int]:
    n = abs(n)
    primes: dict[int, int] = {}
    m = n
    q = 2
    while q * q <= m:
        while m % q == 0:
            primes[q] = primes.get(q, 0) + 1
            m //= q
        q += 1 if q == 2 else 2
    if m > 1:
        primes[m] = primes.get(m, 0) + 1
    divs = [1]
    for pr, k in primes.items():
        divs = [dv * pr**e for dv in divs for e in range(k + 1)]
    return sorted(divs)


# above this size, enumerating divisors of the end coefficients gets slow
DIVISOR_SEARCH_LIMIT = 10**8


def _sign_changes(seq: list, x: Fraction) -> int:
    signs = [v for v in (s(x) for s in seq) if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a < 0) != (b < 0))


def sturm_sequence(p: Poly) -> list:
    seq = [p, p.derivative()]
    while seq[-1].degree > 0:
        r = seq[-2] % seq[-1]
        if r.is_zero():
            break
        # positive rescaling keeps the signs and the coefficients small
        seq.append(-(r.monic() if r.lc > 0 else -r.monic()))
    return seq


def real_rational_roots(p: Poly) -> list[Fraction]:
    """Rational roots of a squarefree ``p`` by exact Sturm isolation.

    Each real root is isolated in an interval shorter than ``1/lc^2`` (lc of the
    primitive integer form); a rational root there must be the unique fraction
    with denominator <= lc closest to the midpoint.
    """
    ints = p.primitive_integer_coeffs()
    an = abs(ints[-1])
    seq = sturm_sequence(p)
    bound = 1 + max(abs(Fraction(c, ints[-1])) for c in ints[:-1])
    width = Fraction(1, 2 * an * an)
    out = []
    stack = [(-bound, bound, _sign_changes(seq, -bound), _sign_changes(seq, bound))]
    while stack:
        a, b, va, vb = stack.pop()
        count = va - vb  # roots in (a, b]
        if count == 0:
            continue
        if count == 1 and b - a < width:
            cand = ((a + b) / 2).limit_denominator(an)
            if a < cand <= b and p(cand) == 0:
                out.append(cand)
            continue
        mid = (a + b) / 2
        vm = _sign_changes(seq, mid)
        stack.append((a, mid, va, vm))
        stack.append((mid, b, vm, vb))
    return sorted(out)


def rational_roots_squarefree(p: Poly) -> tuple[list[Fraction], Poly]:
    """Rational roots of a squarefree polynomial and the cofactor without them."""
    roots: list[Fraction] = []
    rest = p.monic()
    if rest.degree >= 1 and rest.coeffs[0] == 0:
        roots.append(Fraction(0))
        rest = rest.exact_div(Poly.x())
    if rest.degree >= 2:
        ints = rest.primitive_integer_coeffs()
        if max(abs(ints[0]), abs(ints[-1])) > DIVISOR_SEARCH_LIMIT:
            found = real_rational_roots(rest)
            for r in found:
                rest = rest.exact_div(Poly.linear(r))
            return sorted(roots + found), rest
    while rest.degree >= 1:
        if rest.degree == 1:
            roots.append(-rest.coeffs[0] / rest.coeffs[1])
            rest = Poly.const(1)
            break
        ints = rest.primitive_integer_coeffs()
        a0, an = ints[0], ints[-1]
        bound = 1 + max(abs(Fraction(c, an)) for c in ints[:-1])
        found = None
        for q in _divisors(an):
            for num in _divisors(a0):
                if Fraction(num, q) > bound:
                    break
                for cand in (Fraction(num, q), Fraction(-num, q)):
                    if rest(cand) == 0:
                        found = cand
                        break
                if found is not None:
                    break
            if found is not None:
                break
        if found is None:
            break
        roots.append(found)
        rest = rest.exact_div(Poly.linear(found))
    return roots, rest


def split_linear_factors(p: Poly) -> tuple[Fraction, list[tuple[Fraction, int]]]:
    """Factor ``p`` as ``lc * prod (x - root)**mult`` with rational roots.

    Roots are returned sorted by value.  Raises ``SplitFieldRequired`` when an
    irreducible factor of degree >= 2 remains.
    """
    if p.is_zero():
        raise ValueError("cannot split the zero polynomial")
    factors: list[tuple[Fraction, int]] = []
    for part, mult in squarefree_decomposition(p):
        roots, rest = rational_roots_squarefree(part)
        if rest.degree >= 1:
            raise SplitFieldRequired(
                f"factor {rest.monic()} of {p} has no rational roots; "
                "use an abstract form with symbolic points instead"
            )
        factors.extend((r, mult) for r in roots)
    factors.sort()
    return p.lc, factors


# --- rational functions ----------------------------------------------------


class RatFunc:
    """Reduced quotient ``num/den`` of polynomials over Q with monic ``den``.

    The zero function is admitted (``num == 0, den == 1``) so that the field
    operations are closed; it has no factored form.
    """

    __slots__ = ("num", "den", "__dict__")

    def __init__(self, num, den=None, *, _reduced=False):
        num = Poly._coerce(num) if not isinstance(num, Poly) else num
        den = Poly.const(1) if den is None else (den if isinstance(den, Poly) else Poly._coerce(den))
        if den.is_zero():
            raise DivisionByZeroFunction("zero denominator")
        if not _reduced:
            if num.is_zero():
                den = Poly.const(1)
            else:
                g = num.gcd(den)
                if g.degree > 0:
                    num, den = num.exact_div(g), den.exact_div(g)
                lc = den.lc
                num, den = Poly(c / lc for c in num.coeffs), den.monic()
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RatFunc is immutable")

    # constructors

    @classmethod
    def const(cls, c) -> "RatFunc":
        return cls(Poly.const(c))

    @classmethod
    def x(cls) -> "RatFunc":
        return cls(Poly.x())

    @classmethod
    def from_factors(cls, constant, factors: Iterable[tuple]) -> "RatFunc":
        num, den = Poly.const(constant), Poly.const(1)
        for root, e in factors:
            e = int(e)
            lin = Poly.linear(root)
            if e > 0:
                num = num * lin**e
            elif e < 0:
                den = den * lin**(-e)
        return cls(num, den)

    # basic queries

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.degree <= 0 and self.den.degree == 0

    @property
    def degree(self) -> int:
        """deg(numerator) - deg(denominator)."""
        if self.is_zero():
            raise ValueError("degree of the zero function")
        return self.num.degree - self.den.degree

    @property
    def map_degree(self) -> int:
        """Degree of the induced map P^1 -> P^1."""
        return max(self.num.degree, self.den.degree)

    @cached_property
    def factored(self) -> tuple[Fraction, tuple[tuple[Fraction, int], ...]]:
        """``(constant, ((root, exponent), ...))`` sorted by root."""
        if self.is_zero():
            raise ValueError("the zero function has no factored form")
        lc, nf = split_linear_factors(self.num)
        _, df = split_linear_factors(self.den)
        fs = list(nf) + [(r, -e) for r, e in df]
        fs.sort()
        return lc, tuple(fs)

    @property
    def constant(self) -> Fraction:
        return self.factored[0]

    @property
    def factors(self) -> tuple[tuple[Fraction, int], ...]:
        return self.factored[1]

    def poles(self) -> list[tuple[Fraction, int]]:
        _, df = split_linear_factors(self.den) if self.den.degree > 0 else (1, [])
        return list(df)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Poly)):
            other = RatFunc(other)
        return isinstance(other, RatFunc) and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RatFunc({self})"

    def __str__(self):
        return self.to_expr("x")

    def to_expr(self, var: str = "x") -> str:
        n = poly_to_str(self.num, var)
        if self.den.degree == 0:
            return n
        d = poly_to_str(self.den, var)
        if self.num.degree == 0 and self.num.lc.denominator != 1:
            # 1/(2*x) rather than 1/2/(x)
            c = self.num.lc
            d = d if len([a for a in self.den.coeffs if a]) == 1 else f"({d})"
            return f"{c.numerator}/({c.denominator}*{d})"
        if self.num.degree >= 1 and len([c for c in self.num.coeffs if c]) > 1:
            n = f"({n})"
        if len([a for a in self.den.coeffs if a]) == 1 and self.den.lc == 1:
            return f"{n}/{d}"
        return f"{n}/({d})"

    def factored_str(self, var: str = "x") -> str:
        c, fs = self.factored
        parts = []
        for root, e in fs:
            base = var if root == 0 else (f"({var} - {format_rat(root)})" if root > 0 else f"({var} + {format_rat(-root)})")
            parts.append(base if e == 1 else f"{base}^{e}")
        if not parts:
            return format_rat(c)
        body = "*".join(parts)
        if c == 1:
            return body
        if c == -1:
            return "-" + body
        return f"{format_rat(c)}*{body}"

    # field operations

    @staticmethod
    def _coerce(other) -> "RatFunc":
        if isinstance(other, RatFunc):
            return other
        return RatFunc(other)

    def __add__(self, other):
        o = self._coerce(other)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, _reduced=True)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return RatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o.is_zero():
            raise DivisionByZeroFunction("division by the zero function")
        return RatFunc(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, k: int):
        if k >= 0:
            return RatFunc(self.num**k, self.den**k, _reduced=True) if k else RatFunc.const(1)
        if self.is_zero():
            raise DivisionByZeroFunction("negative power of the zero function")
        return RatFunc(self.den**(-k), self.num**(-k))

    def derivative(self) -> "RatFunc":
        return RatFunc(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den,
        )

    def __call__(self, value):
        value = to_rat(value)
        d = self.den(value)
        if d == 0:
            raise PoleEvaluation(f"{self} has a pole at {format_rat(value)}")
        return self.num(value) / d

    def value_at_infinity(self):
        """Value at infinity, or ``None`` when infinity is a pole."""
        if self.is_zero():
            return Fraction(0)
        dn, dd = self.num.degree, self.den.degree
        if dn > dd:
            return None
        if dn < dd:
            return Fraction(0)
        return self.num.lc / self.den.lc

    def compose(self, phi: "RatFunc") -> "RatFunc":
        """``self(phi(x))`` computed by homogenising num and den in phi = A/B."""
        phi = self._coerce(phi)
        A, B = phi.num, phi.den
        n = max(self.num.degree, self.den.degree, 0)

        def homog(p: Poly) -> Poly:
            acc = Poly()
            for i, c in enumerate(p.coeffs):
                if c:
                    acc = acc + c * A**i * B**(n - i)
            return acc

        return RatFunc(homog(self.num), homog(self.den))


# --- partial fractions ------------------------------------------------------


def _series_div(num: Poly, den: Poly, n: int) -> list[Fraction]:
    """First ``n`` power-series coefficients of num/den at 0 (den(0) != 0)."""
    a = list(num.coeffs) + [Fraction(0)] * n
    b = list(den.coeffs) + [Fraction(0)] * n
    out = []
    for k in range(n):
        s = a[k] - sum(out[j] * b[k - j] for j in range(max(0, k - len(den.coeffs) + 1), k))
        out.append(s / b[0])
    return out


@dataclass(frozen=True)
class PartialFraction:
    """``polynomial_part + sum coefficient/(x - pole)**order`` (nonzero terms only)."""

    polynomial_part: Poly
    terms: tuple[tuple[Fraction, int, Fraction], ...]

    def residue(self, pole) -> Fraction:
        pole = to_rat(pole)
        for c, j, a in self.terms:
            if c == pole and j == 1:
                return a
        return Fraction(0)

    def poles(self) -> list[Fraction]:
        return sorted({c for c, _, _ in self.terms})

    def recombine(self) -> RatFunc:
        acc = RatFunc(self.polynomial_part)
        for c, j, a in self.terms:
            acc = acc + RatFunc(Poly.const(a), Poly.linear(c)**j)
        return acc

    def __str__(self):
        parts = [] if self.polynomial_part.is_zero() else [poly_to_str(self.polynomial_part)]
        for c, j, a in self.terms:
            lin = "x" if c == 0 else (f"(x - {format_rat(c)})" if c > 0 else f"(x + {format_rat(-c)})")
            den = lin if j == 1 else f"{lin}^{j}"
            parts.append(f"({format_rat(a)})/{den}")
        return " + ".join(parts) if parts else "0"


def partial_fractions(f: RatFunc) -> PartialFraction:
    """Decompose ``f`` over its (rational) poles.

    The coefficient of ``(x - c)**-1`` is the residue of ``f dx`` at ``c``.
    """
    poly_part, rem = divmod(f.num, f.den)
    terms = []
    if f.den.degree > 0:
        for c, k in split_linear_factors(f.den)[1]:
            cofactor = f.den.exact_div(Poly.linear(c)**k)
            series = _series_div(rem.shift(c), cofactor.shift(c), k)
            for i, coeff in enumerate(series):
                if coeff != 0:
                    terms.append((c, k - i, coeff))
    terms.sort(key=lambda t: (t[0], -t[1]))
    return PartialFraction(poly_part, tuple(terms))


def antiderivative_without_logs(f: RatFunc) -> RatFunc:
    """An ``h`` with ``h' = f`` provided every residue of ``f dx`` vanishes."""
    pf = partial_fractions(f)
    h = RatFunc(Poly([0] + [c / (i + 1) for i, c in enumerate(pf.polynomial_part.coeffs)]))
    for c, j, a in pf.terms:
        if j == 1:
            raise ValueError(f"nonzero residue at {format_rat(c)}; antiderivative has a log term")
        h = h + RatFunc(Poly.const(-a / (j - 1)), Poly.linear(c)**(j - 1))
    return h


def rank_over_q(rows: Sequence[Sequence[Fraction]]) -> int:
    """Row rank by fraction-exact Gaussian elimination."""
    m = [list(map(Fraction, r)) for r in rows]
    if not m:
        return 0
    rank, ncols = 0, max(len(r) for r in m)
    for r in m:
        r.extend([Fraction(0)] * (ncols - len(r)))
    for col in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        pv = m[rank][col]
        for i in range(len(m)):
            if i != rank and m[i][col] != 0:
                f = m[i][col] / pv
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
        if rank == len(m):
            break
    return rank
