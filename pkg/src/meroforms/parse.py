"""
Text and JSON input formats.

Expressions use rationals, one variable, ``+ - * / ^`` (integer exponents),
parentheses and implicit multiplication (``2x``, ``x^2 dx``).  A form is an
expression that is linear in the marker ``dx``; an equation ``y' = g(y)``
stands for the form ``dx/g(x)``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction

from .arith import RatFunc, format_rat
from .curves import CurveFormSpec, HyperCurve
from .divisor import AbstractForm, Divisor, ExplicitForm, PointP1, ResidueVal
from .errors import DivisionByZeroFunction, InvalidForm, ParseError, SplitFieldRequired
from .hurwitz import BranchData, validate_branch_data

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<id>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()']))")


def _tokenize(text: str) -> list:
    toks, pos = [], 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos:].lstrip()[0]!r}", pos + len(text[pos:]) - len(text[pos:].lstrip()))
        kind = m.lastgroup
        start = m.start(kind)
        toks.append((kind, m.group(kind), start))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    """Recursive descent into a small AST of tuples."""

    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, value=None):
        tok = self.toks[self.i]
        if value is not None and tok[1] != value:
            raise ParseError(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok[2])
        self.i += 1
        return tok

    def parse(self):
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected {tok[1]!r}", tok[2])
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            node = ("add" if op == "+" else "sub", node, self.term())
        return node

    def term(self):
        node = self.unary()
        while True:
            tok = self.peek()
            if tok[1] in ("*", "/"):
                self.take()
                node = ("mul" if tok[1] == "*" else "div", node, self.unary())
            elif tok[0] in ("num", "id") or tok[1] == "(":
                node = ("mul", node, self.power())
            else:
                return node

    def unary(self):
        if self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            inner = self.unary()
            return ("neg", inner) if op == "-" else inner
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            sign = 1
            paren = False
            if self.peek()[1] == "(":
                self.take()
                paren = True
            if self.peek()[1] in ("+", "-"):
                sign = -1 if self.take()[1] == "-" else 1
            tok = self.take()
            if tok[0] != "num" or "." in tok[1]:
                raise ParseError("exponent must be an integer", tok[2])
            if paren:
                self.take(")")
            return ("pow", base, sign * int(tok[1]))
        return base

    def atom(self):
        tok = self.take()
        kind, val, pos = tok
        if kind == "num":
            return ("num", Fraction(val), pos)
        if kind == "id":
            return ("id", val, pos)
        if val == "(":
            node = self.expr()
            self.take(")")
            return node
        raise ParseError(f"unexpected {val or 'end of input'!r}", pos)


def _eval_rat(node, var: str, allow_dx: bool):
    """Evaluate to ``(RatFunc, dx-degree)``."""
    tag = node[0]
    if tag == "num":
        return RatFunc.const(node[1]), 0
    if tag == "id":
        name, pos = node[1], node[2]
        if name == var:
            return RatFunc.x(), 0
        if name == "dx" and allow_dx:
            return RatFunc.const(1), 1
        raise ParseError(f"unknown name {name!r} (the variable here is {var!r})", pos)
    if tag == "neg":
        v, k = _eval_rat(node[1], var, allow_dx)
        return -v, k
    if tag == "pow":
        v, k = _eval_rat(node[1], var, allow_dx)
        if k:
            raise ParseError("dx cannot be raised to a power", None)
        if node[2] < 0 and v.is_zero():
            raise DivisionByZeroFunction("zero raised to a negative power")
        return v ** node[2], 0
    a, ka = _eval_rat(node[1], var, allow_dx)
    b, kb = _eval_rat(node[2], var, allow_dx)
    if tag in ("add", "sub"):
        if ka != kb and not (a.is_zero() or b.is_zero()):
            raise ParseError("cannot add terms with and without dx", None)
        return (a + b if tag == "add" else a - b), max(ka, kb)
    if tag == "mul":
        return a * b, ka + kb
    if b.is_zero():
        raise DivisionByZeroFunction("division by the zero function")
    return a / b, ka - kb


def parse_expr(text: str, var: str = "x") -> RatFunc:
    f, k = _eval_rat(_Parser(text).parse(), var, allow_dx=False)
    return f


def parse_form(text: str) -> ExplicitForm:
    """``"<expr> dx"``; also accepts ``dx/(...)`` and sums of such terms."""
    f, k = _eval_rat(_Parser(text).parse(), "x", allow_dx=True)
    if k != 1:
        raise ParseError("a 1-form must be linear in dx", None)
    return ExplicitForm(f)


def parse_equation(text: str) -> ExplicitForm:
    """``"y' = g(y)"`` to the form ``dx/g(x)``."""
    m = re.match(r"\s*y\s*'\s*=(.*)$", text, re.S)
    if not m:
        raise ParseError("an equation must look like \"y' = g(y)\"", 0)
    offset = m.start(1)
    try:
        g = parse_expr(m.group(1), "y")
    except ParseError as exc:
        if exc.position is None:
            raise
        raise ParseError(exc.message, exc.position + offset) from None
    if g.is_zero():
        raise InvalidForm("g = 0 gives no 1-form")
    return ExplicitForm(1 / g)


def equation_text(omega: ExplicitForm) -> str:
    g = 1 / omega.f
    try:
        c, fs = g.factored
    except SplitFieldRequired:
        return f"y' = {g.to_expr('y')}"

    def prod(items):
        out = []
        for r, e in items:
            base = "y" if r == 0 else (f"(y - {format_rat(r)})" if r > 0 else f"(y + {format_rat(-r)})")
            out.append(base if e == 1 else f"{base}^{e}")
        return "*".join(out)

    num = prod((r, e) for r, e in fs if e > 0)
    den = prod((r, -e) for r, e in fs if e < 0)
    if not num:
        num = format_rat(c) if c.denominator == 1 else f"({format_rat(c)})"
    elif c == -1:
        num = f"-{num}"
    elif c != 1:
        num = f"{format_rat(c)}*{num}" if c.denominator == 1 else f"({format_rat(c)})*{num}"
    if den:
        den = den if "*" not in den and "^" not in den else f"({den})"
        return f"y' = {num}/{den}"
    return f"y' = {num}"


def parse_branch_data(text: str) -> BranchData:
    """``"d; a+b|c+d|..."``."""
    head, sep, body = text.partition(";")
    if not sep:
        raise ParseError("branch data must look like \"d; a+b|c+d\"", 0)
    try:
        d = int(head.strip())
        parts = [[int(p) for p in chunk.split("+")] for chunk in body.split("|")]
    except ValueError as exc:
        raise ParseError(f"bad branch data: {exc}", len(head) + 1) from None
    return validate_branch_data((d, parts))


def _eval_residue(node, basis) -> ResidueVal:
    tag = node[0]
    if tag == "num":
        return ResidueVal.rational(node[1])
    if tag == "id":
        if node[1] not in basis:
            raise ParseError(f"symbol {node[1]!r} is not in the basis", node[2])
        return ResidueVal.symbol(node[1])
    if tag == "neg":
        return -_eval_residue(node[1], basis)
    if tag == "pow":
        raise ParseError("powers are not allowed in residues", None)
    a, b = _eval_residue(node[1], basis), _eval_residue(node[2], basis)
    if tag == "add":
        return a + b
    if tag == "sub":
        return a - b
    if tag == "mul":
        if a.is_rational():
            return b * a.coords.get("1", 0)
        if b.is_rational():
            return a * b.coords.get("1", 0)
        raise ParseError("residues must be Q-linear in the basis symbols", None)
    if not b.is_rational() or b.is_zero():
        raise ParseError("can only divide residues by nonzero rationals", None)
    return a / b.coords["1"]


def parse_residue(raw, basis=("1",)) -> ResidueVal:
    if isinstance(raw, ResidueVal):
        return raw
    if isinstance(raw, dict):
        return ResidueVal({k: Fraction(str(v)) for k, v in raw.items()})
    if isinstance(raw, bool):
        raise ParseError("booleans are not residues", None)
    if isinstance(raw, int):
        return ResidueVal.rational(raw)
    if isinstance(raw, float):
        raise ParseError("write residues as exact rationals such as \"1/3\", not floats", None)
    return _eval_residue(_Parser(str(raw)).parse(), set(basis))


def parse_point(raw) -> PointP1:
    if isinstance(raw, float):
        raise ParseError("points must be exact rationals, \"inf\" or \"@label\"", None)
    try:
        return PointP1.parse(raw)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad point {raw!r}: {exc}", None) from None


def abstract_form_from_json(doc: dict) -> AbstractForm:
    basis = list(doc.get("basis", []))
    div = Divisor([(parse_point(p), int(o)) for p, o in doc["divisor"]])
    res = {parse_point(p): parse_residue(v, ["1", *basis]) for p, v in doc.get("residues", {}).items()}
    return AbstractForm(div, res, basis)


def curve_form_from_json(doc: dict) -> tuple[HyperCurve, CurveFormSpec]:
    curve = HyperCurve(tuple(Fraction(str(r)) for r in doc["curve"]))
    spec = CurveFormSpec(
        zeros=[(_coord(x), int(u)) for x, u in doc.get("zeros", [])],
        simple_poles=[_coord(x) for x in doc.get("simple_poles", [])],
        higher_poles=[(_coord(x), int(w)) for x, w in doc.get("higher_poles", [])],
        k=[int(k) for k in doc.get("k", [])],
        l=int(doc.get("l", 1)),
    )
    return curve, spec


def _coord(x):
    if isinstance(x, str) and x.startswith("@"):
        return x[1:]
    return Fraction(str(x))


@dataclass
class InputSpec:
    kind: str  # "equation" | "form" | "abstract" | "curve" | "branch"
    value: object
    text: str = ""

    @property
    def form(self):
        if self.kind in ("equation", "form", "abstract"):
            return self.value
        raise InvalidForm(f"a {self.kind} input is not a 1-form on P^1")

    def canonical(self) -> str:
        if self.kind == "equation":
            return equation_text(self.value)
        if self.kind == "form":
            return str(self.value)
        if self.kind == "branch":
            return str(self.value)
        if self.kind == "abstract":
            return json.dumps(self.value.to_json(), sort_keys=True)
        curve, spec = self.value
        return json.dumps({"curve": [str(r) for r in curve.roots], **spec.to_json()}, sort_keys=True)


def parse_input(source) -> InputSpec:
    """Dispatch on shape: JSON document, branch data, equation or form."""
    if isinstance(source, dict):
        doc = source
    else:
        text = str(source).strip()
        if text.startswith("{"):
            try:
                doc = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ParseError(f"bad JSON: {exc.msg}", exc.pos) from None
        elif ";" in text:
            return InputSpec("branch", parse_branch_data(text), text)
        elif re.match(r"\s*y\s*'", text):
            return InputSpec("equation", _with_hint(parse_equation, text), text)
        else:
            return InputSpec("form", _with_hint(parse_form, text), text)
    if "curve" in doc:
        return InputSpec("curve", curve_form_from_json(doc))
    if "divisor" in doc:
        return InputSpec("abstract", abstract_form_from_json(doc))
    if "partitions" in doc:
        return InputSpec("branch", validate_branch_data(doc))
    raise ParseError("JSON input needs a 'divisor', 'curve' or 'partitions' field", None)


def _with_hint(fn, text):
    omega = fn(text)
    # factor the poles now so a non-split denominator fails at parse time;
    # zeros off Q are allowed until something needs them
    omega.polar_divisor()
    omega.residues()
    return omega
