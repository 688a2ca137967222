"""
New/old decision for general-type 1-forms on P^1.

A form is *old* when it is ``phi^* eta`` for some ``phi: P^1 -> P^1`` of degree
``d >= 2``.  The target is always P^1 (a genus-0 curve cannot cover a curve
of positive genus).  For each admissible ``d`` we enumerate every way the
zeros and poles of ``omega`` can be grouped into fibres of ``phi`` together
with ramification indices; each surviving grouping fixes the divisor of
``eta`` and a branch datum, whose realizability then settles the question.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .arith import Poly, RatFunc
from .classify import EXACT, EXPONENTIAL, GENERAL, FormType, classify_type, exact_is_new, exponential_witness
from .curves import check_main_lemma, check_simple_pole_theorem, is_prime
from .divisor import (
    INF,
    AbstractForm,
    Divisor,
    ExplicitForm,
    PointP1,
    ResidueVal,
    as_form,
    evaluate_map,
    pullback_form,
    verify_pullback_laws,
)
from .errors import (
    ConstantMap,
    LimitExceeded,
    MeroformsError,
    NotGeneralType,
    NotSynthesized,
    SearchSpaceExceeded,
    ShapeMismatch,
    SplitFieldRequired,
)
from .hurwitz import DEFAULT_SEARCH_LIMIT, BranchData, Realizability, realizable, validate_branch_data

DEFAULT_NODE_BUDGET = 10**6

NEW, OLD, UNKNOWN = "new", "old", "unknown"
VERIFIED = "verified"
REALIZABILITY = "realizability certificate"
PROOF = "proof"


# --- candidates --------------------------------------------------------------


@dataclass(frozen=True)
class Fiber:
    """Points of ``omega`` over one point ``Q`` of the target.

    ``kind`` is ``zero`` / ``simple`` / ``higher`` after the order of ``eta``
    at ``Q``, or ``regular`` when ``Q`` is an ordinary point over which some
    zeros of ``omega`` ramify.
    """

    kind: str
    members: tuple  # ((PointP1, e), ...)
    eta_order: int
    eta_residue: ResidueVal | None
    label: str

    @property
    def size(self) -> int:
        return sum(e for _, e in self.members)

    def partition(self, d: int) -> tuple:
        es = [e for _, e in self.members]
        es += [1] * (d - sum(es))
        return tuple(sorted(es, reverse=True))

    def to_json(self):
        out = {
            "target": self.label,
            "kind": self.kind,
            "points": [[p.to_json(), e] for p, e in self.members],
            "eta_order": self.eta_order,
        }
        if self.eta_residue is not None:
            out["eta_residue"] = str(self.eta_residue)
        return out


@dataclass(frozen=True)
class PullbackCandidate:
    d: int
    fibers: tuple
    eta_divisor: Divisor
    eta_residues: dict
    branch_data: BranchData

    @property
    def fiber_assignment(self) -> dict:
        return {p: f.label for f in self.fibers for p, _ in f.members}

    @property
    def ram_indices(self) -> dict:
        return {p: e for f in self.fibers for p, e in f.members}

    @property
    def extra_branch(self) -> list:
        return [f.partition(self.d) for f in self.fibers if f.kind == "regular"]

    def problems(self, omega) -> list[str]:
        """Re-check the invariants of a candidate against ``omega``."""
        omega = as_form(omega)
        div, res = omega.divisor(), omega.residues()
        out = []
        seen = [p for f in self.fibers for p, _ in f.members]
        if sorted(seen) != sorted(div.support()) or len(set(seen)) != len(seen):
            out.append("fibres do not partition the support")
        ram = 0
        for f in self.fibers:
            ram += sum(e - 1 for _, e in f.members)
            if f.kind != "regular" and f.size != self.d:
                out.append(f"fibre {f.label} has degree {f.size}")
            if f.size > self.d:
                out.append(f"fibre {f.label} exceeds the degree")
            for p, e in f.members:
                if e * (f.eta_order + 1) != div[p] + 1:
                    out.append(f"order law fails at {p}")
                if f.eta_residue is not None and res.get(p, ResidueVal()) != f.eta_residue * e:
                    out.append(f"residue scaling fails at {p}")
        if ram != 2 * self.d - 2:
            out.append(f"total ramification {ram} != {2 * self.d - 2}")
        if self.eta_divisor.degree != -2:
            out.append("eta divisor has degree != -2")
        return out

    def to_json(self):
        return {
            "d": self.d,
            "fibers": [f.to_json() for f in self.fibers],
            "eta_divisor": str(self.eta_divisor),
            "eta_residues": {str(k): str(v) for k, v in self.eta_residues.items()},
            "branch_data": str(self.branch_data),
        }


def _divisors_upto(n: int, cap: int) -> list[int]:
    return [e for e in range(1, min(n, cap) + 1) if n % e == 0]


def degree_candidates(omega) -> list[int]:
    """Possible degrees of ``phi`` with ``omega = phi^* eta``."""
    omega = as_form(omega)
    if classify_type(omega).kind != GENERAL:
        raise NotGeneralType("degree bounds apply to general-type forms only")
    div = omega.divisor()
    zeros = div.zeros()
    bound = (div.zero_divisor_degree() + len(zeros)) // 2
    ds = list(range(2, bound + 1))
    if len(zeros) == 1:
        k = zeros[0][1] + 1
        ds = [d for d in ds if k % d == 0 and d < k]
    higher = div.higher_poles()
    if len(higher) == 1:
        # eta needs a higher pole and the whole fibre over it is this point;
        # its order may be -2, so d = |ord + 1| stays admissible
        k = -(higher[0][1] + 1)
        ds = [d for d in ds if k % d == 0]
    return ds


def ramification_table(omega, d: int) -> list[dict]:
    """Admissible ``e_P`` and ``(ord_P + 1)/e_P`` per zero and pole."""
    omega = as_form(omega)
    rows = []
    for p, o in omega.divisor().items():
        if o == -1:
            es = list(range(1, d + 1))
            ratios = None
        else:
            es = _divisors_upto(abs(o + 1), d)
            ratios = [str(Fraction(o + 1, e)) for e in es]
        rows.append({"point": p.to_json(), "order": o, "e": es, "ratio": ratios})
    return rows


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def tick(self):
        self.used += 1
        if self.used > self.limit:
            raise SearchSpaceExceeded(f"candidate search exceeded {self.limit} nodes")


def _subsets(cands: list, target: int, exact: bool, budget: _Budget) -> Iterator[list]:
    """Sub-lists of ``[(idx, e)]`` with ``sum(e) == target`` (or ``<=``)."""

    def rec(i: int, left: int, chosen: list):
        budget.tick()
        if left == 0 or not exact:
            if left >= 0:
                yield list(chosen)
            if left == 0:
                return
        for j in range(i, len(cands)):
            idx, e = cands[j]
            if e <= left:
                chosen.append((idx, e))
                yield from rec(j + 1, left - e, chosen)
                chosen.pop()

    yield from rec(0, target, [])


def enumerate_candidates(
    omega,
    d: int,
    node_budget: int = DEFAULT_NODE_BUDGET,
    require_eta_zero: bool = True,
    _budget: _Budget | None = None,
) -> list[PullbackCandidate]:
    """Every fibre structure of a degree-``d`` map compatible with ``omega``."""
    omega = as_form(omega)
    div, res = omega.divisor(), omega.residues()
    pts = div.items()
    orders = [o for _, o in pts]
    residues = [res.get(p, ResidueVal()) for p, _ in pts]
    budget = _budget or _Budget(node_budget)
    target_ram = 2 * d - 2
    out = []

    def options(i: int, rest: tuple):
        o, r = orders[i], residues[i]
        if o >= 1:
            e0 = o + 1
            if e0 <= d:
                cands = [(j, orders[j] + 1) for j in rest if orders[j] >= 1]
                for sub in _subsets(cands, d - e0, exact=False, budget=budget):
                    yield "regular", [(i, e0)] + sub, 0, None
            for e in _divisors_upto(o + 1, d):
                q = (o + 1) // e
                if q < 2:
                    continue
                cands = [(j, (orders[j] + 1) // q) for j in rest if orders[j] >= 1 and (orders[j] + 1) % q == 0]
                for sub in _subsets(cands, d - e, exact=True, budget=budget):
                    yield "zero", [(i, e)] + sub, q - 1, None
        elif o == -1:
            for e in range(1, d + 1):
                rq = r / e
                cands = []
                for j in rest:
                    if orders[j] == -1:
                        k = residues[j].ratio_to(rq)
                        if k is not None and k.denominator == 1 and 1 <= k <= d:
                            cands.append((j, int(k)))
                for sub in _subsets(cands, d - e, exact=True, budget=budget):
                    yield "simple", [(i, e)] + sub, -1, rq
        else:
            for e in _divisors_upto(-(o + 1), d):
                q = (o + 1) // e  # <= -1
                rq = r / e
                cands = []
                for j in rest:
                    oj = orders[j]
                    if oj <= -2 and (oj + 1) % q == 0:
                        ej = (oj + 1) // q
                        if residues[j] == rq * ej:
                            cands.append((j, ej))
                for sub in _subsets(cands, d - e, exact=True, budget=budget):
                    yield "higher", [(i, e)] + sub, q - 1, rq

    def rec(remaining: tuple, fibers: list, ram: int):
        budget.tick()
        if ram > target_ram:
            return
        if not remaining:
            if ram != target_ram:
                return
            if require_eta_zero and not any(f[0] == "zero" for f in fibers):
                return
            out.append(_package(d, fibers, pts))
            return
        i, rest = remaining[0], remaining[1:]
        for kind, members, eta_order, rq in options(i, rest):
            used = {j for j, _ in members}
            gain = sum(e - 1 for _, e in members)
            rec(tuple(j for j in rest if j not in used), fibers + [(kind, members, eta_order, rq)], ram + gain)

    rec(tuple(range(len(pts))), [], 0)
    return out


def _package(d: int, raw_fibers: list, pts: list) -> PullbackCandidate:
    fibers = []
    for n, (kind, members, eta_order, rq) in enumerate(raw_fibers, start=1):
        fibers.append(Fiber(kind, tuple((pts[i][0], e) for i, e in members), eta_order, rq, f"Q{n}"))
    eta_div = Divisor([(PointP1.generic(f.label), f.eta_order) for f in fibers if f.eta_order != 0])
    eta_res = {PointP1.generic(f.label): f.eta_residue for f in fibers if f.eta_residue is not None}
    parts = [f.partition(d) for f in fibers if max(e for _, e in f.members) > 1]
    bd = validate_branch_data((d, parts))
    return PullbackCandidate(d, tuple(fibers), eta_div, eta_res, bd)


# --- witnesses ----------------------------------------------------------------


def _mobius(a: PointP1, b: PointP1) -> tuple[RatFunc, RatFunc]:
    """``mu`` with ``mu(a) = 0``, ``mu(b) = inf``, and its inverse."""
    x = RatFunc.x()
    if b.is_infinity:
        return x - a.value, x + a.value
    if a.is_infinity:
        return 1 / (x - b.value), 1 / x + b.value
    mu = (x - a.value) / (x - b.value)
    inv = (x * b.value - a.value) / (x - 1)
    return mu, inv


def synthesize_witness(candidate: PullbackCandidate, omega) -> tuple[RatFunc, ExplicitForm]:
    """``(phi, eta)`` with ``phi^* eta == omega`` for two totally ramified fibres."""
    omega = as_form(omega)
    d = candidate.d
    if candidate.branch_data.canonical() != (d, ((d,), (d,))):
        raise NotSynthesized(f"branch data {candidate.branch_data} is not {{{{{d}}},{{{d}}}}}")
    if not isinstance(omega, ExplicitForm):
        raise NotSynthesized("witness synthesis needs an explicit form")
    total = [f.members[0][0] for f in candidate.fibers if len(f.members) == 1 and f.members[0][1] == d]
    if len(total) != 2 or not all(p.is_concrete for p in total):
        raise NotSynthesized("the totally ramified points are not both concrete")
    p0, p1 = sorted(total)
    if p0.is_infinity:
        p0, p1 = p1, p0
    mu, mu_inv = _mobius(p0, p1)
    psi = mu**d
    h = (omega.f / psi.derivative()).compose(mu_inv)
    num, den = h.num.coeffs, h.den.coeffs
    if any(c for i, c in enumerate(num) if i % d) or any(c for i, c in enumerate(den) if i % d):
        raise NotSynthesized("omega does not descend along the power map")
    g = RatFunc(Poly(num[::d]), Poly(den[::d]))
    lam = Fraction(1)
    for p in omega.divisor().support():
        if p in (p0, p1):
            continue
        v = evaluate_map(psi, p)
        if v.is_finite and v.value != 0:
            lam = v.value
            break
    phi = psi / lam
    eta = ExplicitForm(g.compose(RatFunc(Poly([0, lam]))) * lam)
    if pullback_form(phi, eta) != omega:
        raise NotSynthesized("pullback check failed")
    return phi, eta


# --- decisions ----------------------------------------------------------------


@dataclass
class Decision:
    verdict: str
    form_type: FormType
    criterion: str
    confidence: str = PROOF
    reason: str = ""
    candidate: PullbackCandidate | None = None
    realizability: Realizability | None = None
    witness: tuple | None = None
    trace: list = field(default_factory=list)
    obstructions: list = field(default_factory=list)

    @property
    def is_new(self):
        return self.verdict == NEW

    def to_json(self):
        out = {
            "type": self.form_type.kind,
            "type_rules": list(self.form_type.rules),
            "verdict": self.verdict,
            "criterion": self.criterion,
            "confidence": self.confidence,
        }
        if self.reason:
            out["reason"] = self.reason
        if self.trace:
            out["degree_trace"] = self.trace
        if self.candidate is not None:
            out["certificate"] = self.candidate.to_json()
        if self.realizability is not None:
            out["realizability"] = self.realizability.to_json()
            if self.realizability.constellation is not None:
                out["constellation"] = self.realizability.constellation.to_json()
        if self.witness is not None:
            phi, eta = self.witness
            out["witness"] = {"phi": phi.to_expr(), "eta": str(eta)}
        if self.obstructions:
            out["obstructions"] = list(self.obstructions)
        return out


def _verified(omega, phi, eta) -> bool:
    """The identity ``phi^* eta == omega``, plus the pullback laws when they can be checked."""
    try:
        if pullback_form(phi, eta) != omega:
            return False
    except (ConstantMap, MeroformsError):
        return False
    try:
        return verify_pullback_laws(phi, eta).ok
    except SplitFieldRequired:
        # zeros off Q: the laws cannot be listed, the identity alone still proves oldness
        return True


def _pole_multiplicity_criterion(div: Divisor) -> str | None:
    zeros, simple, higher = div.zeros(), div.simple_poles(), div.higher_poles()
    if len(zeros) != 1 or len(simple) != 1 or not higher:
        return None
    ws = [-o for _, o in higher]
    total = sum(ws)
    counts = [ws.count(w) for w in sorted(set(ws))]
    for s in range(2, total):
        if total % s == 0 and all(c % s == 0 for c in counts):
            return None
    return f"no proper divisor of {total} divides every multiplicity count {counts}"


def fast_path(omega, genus: int = 0, form_type: FormType | None = None) -> Decision | None:
    """Closed-form criteria that settle the question without a search."""
    omega = as_form(omega)
    ft = form_type or classify_type(omega)

    if ft.kind == EXACT:
        if exact_is_new(omega, ft):
            return Decision(NEW, ft, "exact-single-double-pole", reason="divisor is -2[c]")
        dec = Decision(OLD, ft, "exact-antiderivative", reason="omega = dh with deg h >= 2")
        if isinstance(omega, ExplicitForm):
            from .arith import antiderivative_without_logs

            h = antiderivative_without_logs(omega.f)
            eta = ExplicitForm(RatFunc.const(1))
            if _verified(omega, h, eta):
                dec.witness, dec.confidence = (h, eta), VERIFIED
        return dec
    if ft.kind == EXPONENTIAL:
        dec = Decision(OLD, ft, "exponential-power-map", reason="omega = c dh/h is a pullback of c dx/(k x)")
        if isinstance(omega, ExplicitForm):
            try:
                phi, eta = exponential_witness(omega)
            except MeroformsError:
                phi = None
            if phi is not None and _verified(omega, phi, eta):
                dec.witness, dec.confidence = (phi, eta), VERIFIED
        return dec

    div, res = omega.divisor(), omega.residues()
    zeros = div.zeros()
    if len(zeros) == 1 and is_prime(zeros[0][1] + 1):
        return Decision(NEW, ft, "one-zero-prime", reason=f"single zero of order {zeros[0][1]}")
    if len(zeros) == 2:
        a, b = sorted(o for _, o in zeros)
        if a == 1 and is_prime(b + 1) and is_prime(b + 3):
            return Decision(NEW, ft, "two-zero-prime", reason=f"zeros of orders 1 and {b}")
    pole_res = [res[p] for p, _ in div.poles() if not res[p].is_zero()]
    if check_simple_pole_theorem(pole_res, genus).passed:
        return Decision(NEW, ft, "simple-pole-residues", reason="pairwise Q-independent residues")
    try:
        lemma = check_main_lemma(genus, div)
    except ShapeMismatch:
        lemma = None
    if lemma is not None and lemma.passed:
        return Decision(NEW, ft, lemma.rule, reason=f"pole orders {lemma.params['w']}")
    why = _pole_multiplicity_criterion(div)
    if why:
        return Decision(NEW, ft, "pole-multiplicity-divisibility", reason=why)
    return None


def decide(
    omega,
    *,
    max_degree: int | None = None,
    hurwitz_limit: int = DEFAULT_SEARCH_LIMIT,
    node_budget: int = DEFAULT_NODE_BUDGET,
    use_fast_path: bool = True,
) -> Decision:
    """New, old or unknown, with a certificate for the answer."""
    omega = as_form(omega)
    ft = classify_type(omega)
    if use_fast_path or ft.kind != GENERAL:
        dec = fast_path(omega, 0, ft)
        if dec is not None:
            return dec

    degrees = degree_candidates(omega)
    obstructions = []
    if max_degree is not None and any(d > max_degree for d in degrees):
        obstructions.append(f"degrees {[d for d in degrees if d > max_degree]} above --max-degree {max_degree}")
        degrees = [d for d in degrees if d <= max_degree]

    trace = []
    cache: dict = {}
    old_hit = None
    for d in degrees:
        entry = {"d": d, "table": ramification_table(omega, d)}
        trace.append(entry)
        try:
            cands = enumerate_candidates(omega, d, node_budget)
        except SearchSpaceExceeded as exc:
            entry["status"] = "budget-exceeded"
            obstructions.append(f"d={d}: {exc}")
            continue
        entry["candidates"] = [str(c.branch_data) for c in cands]
        entry["status"] = "empty" if not cands else "candidates"
        verdicts = []
        for cand in cands:
            key = cand.branch_data.canonical()
            if key not in cache:
                try:
                    cache[key] = realizable(cand.branch_data, hurwitz_limit)
                except LimitExceeded as exc:
                    cache[key] = Realizability("unknown", "limit", reason=str(exc))
            verdicts.append(cache[key].verdict)
            if cache[key].verdict == "yes" and old_hit is None:
                old_hit = (cand, cache[key])
        entry["realizable"] = verdicts
        unknown = [str(c.branch_data) for c, v in zip(cands, verdicts) if v == "unknown"]
        if unknown:
            obstructions.append(f"d={d}: realizability unknown for {unknown}")
        if old_hit is not None:
            break

    if old_hit is not None:
        cand, real = old_hit
        dec = Decision(OLD, ft, "realizable-branch-data", REALIZABILITY, candidate=cand, realizability=real, trace=trace)
        pool = [cand] + [c for c in _same_degree(omega, cand.d, node_budget) if c is not cand]
        for c in pool:
            try:
                phi, eta = synthesize_witness(c, omega)
            except NotSynthesized:
                continue
            if _verified(omega, phi, eta):
                dec.candidate, dec.witness, dec.confidence = c, (phi, eta), VERIFIED
                dec.realizability = realizable(c.branch_data, hurwitz_limit)
                break
        return dec
    if obstructions:
        return Decision(UNKNOWN, ft, "search-incomplete", "none", trace=trace, obstructions=obstructions)
    return Decision(NEW, ft, "exhaustion", reason=f"no pullback structure for d in {degrees}", trace=trace)


def _same_degree(omega, d, node_budget):
    try:
        return enumerate_candidates(omega, d, node_budget)
    except SearchSpaceExceeded:
        return []
