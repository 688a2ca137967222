"""Command line front end.

Every subcommand builds one JSON document.  Human text goes to stdout; the
document goes to ``--out`` or, with ``--format json``, to stdout instead.

Exit status: 0 for a definitive answer, 3 for Unknown, 1 when a definitive
check fails (pullback laws broken, criterion not met), 2 for input or
module errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .classify import EXACT, EXPONENTIAL, classify_type
from .curves import (
    HyperCurve,
    check_dim_count_lemma,
    check_main_lemma,
    coefficient_rank,
    construct_family,
    curve_form_divisor,
    form_status,
    omega_D_basis,
)
from .decider import DEFAULT_NODE_BUDGET, UNKNOWN, decide, fast_path
from .divisor import ExplicitForm, pullback_form, verify_pullback_laws
from .errors import MeroformsError, ParseError, SplitFieldRequired
from .hurwitz import DEFAULT_SEARCH_LIMIT, oracle_verdict, realizable
from .parse import parse_expr, parse_form, parse_input

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_ERROR = 2
EXIT_UNKNOWN = 3


class Report:
    """Human lines plus the machine document of one invocation."""

    def __init__(self, command: str):
        self.lines: list[str] = []
        self.doc: dict = {"command": command}
        self.status = EXIT_OK

    def say(self, line: str = ""):
        self.lines.append(line)


# --- helpers ---------------------------------------------------------------


def _residue_lines(res: dict) -> list[str]:
    return [f"  res[{p}] = {v}" for p, v in sorted(res.items(), key=lambda t: t[0].sort_key()) if not v.is_zero()]


def _div_text(omega) -> str:
    try:
        return str(omega.divisor())
    except SplitFieldRequired:
        return f"{omega.polar_divisor()} + (zeros not split over Q)"


def _form_doc(omega) -> dict:
    out = {"divisor": _div_text(omega), "degree": -2}
    out["residues"] = {str(p): str(v) for p, v in omega.residues().items() if not v.is_zero()}
    if isinstance(omega, ExplicitForm):
        out["form"] = str(omega)
    return out


def _trace_lines(trace: list) -> list[str]:
    lines = []
    for entry in trace:
        lines.append(f"  d = {entry['d']}: {entry.get('status', '?')}")
        for row in entry["table"]:
            if row["ratio"] is None:
                pairs = f"simple pole, e in 1..{entry['d']}"
            else:
                pairs = ", ".join(f"e={e}:{r}" for e, r in zip(row["e"], row["ratio"])) or "none"
            lines.append(f"    {row['point']:>8}  ord {row['order']:>3}  {pairs}")
        for bd, v in zip(entry.get("candidates", []), entry.get("realizable", [])):
            lines.append(f"    candidate {bd}  realizable: {v}")
    return lines


def _read_input(args) -> object:
    text = args.input
    if text == "-":
        text = sys.stdin.read()
    elif text.startswith("@"):
        with open(text[1:]) as fh:
            text = fh.read()
    return parse_input(text)


def _parse_eta(text: str) -> ExplicitForm:
    if "dx" in text:
        return parse_form(text)
    return ExplicitForm(parse_expr(text))


# --- subcommands -----------------------------------------------------------


def cmd_classify(args, rep: Report):
    spec = _read_input(args)
    if spec.kind == "curve":
        curve, cspec = spec.value
        div = curve_form_divisor(curve, cspec)
        res = check_main_lemma(curve.genus, div)
        rep.doc.update(
            curve=str(curve), genus=curve.genus, divisor=str(div), degree=div.degree,
            status=form_status(cspec), main_lemma=res.to_json(),
        )
        rep.say(f"curve   {curve}  (genus {curve.genus})")
        rep.say(f"div     {div}   (degree {div.degree})")
        rep.say(f"status  {form_status(cspec)}")
        rep.say(f"lemma   {'pass' if res.passed else 'fail'} [{res.rule}]")
        for why in res.reasons:
            rep.say(f"  {why}")
        return
    if spec.kind == "branch":
        raise ParseError("classify expects a 1-form, not branch data; try the hurwitz subcommand")
    omega = spec.form
    ft = classify_type(omega)
    rep.doc.update(input=spec.canonical(), type=ft.kind, type_rules=list(ft.rules), **_form_doc(omega))
    rep.say(f"input   {spec.canonical()}")
    rep.say(f"div     {_div_text(omega)}")
    rep.say(f"type    {ft.kind}  ({', '.join(ft.rules)})")
    if ft.kind in (EXACT, EXPONENTIAL):
        dec = fast_path(omega, 0, ft)
        rep.doc["verdict"] = dec.verdict
        rep.doc["criterion"] = dec.criterion
        rep.say(f"verdict {dec.verdict}  [{dec.criterion}]")
        if dec.witness is not None:
            phi, eta = dec.witness
            rep.doc["witness"] = {"phi": phi.to_expr(), "eta": str(eta)}
            rep.say(f"witness phi = {phi.to_expr()},  eta = {eta}")
    for line in _residue_lines(omega.residues()):
        rep.say(line)


def cmd_decide(args, rep: Report):
    spec = _read_input(args)
    omega = spec.form
    dec = decide(
        omega,
        max_degree=args.max_degree,
        hurwitz_limit=args.hurwitz_limit,
        node_budget=args.node_budget,
        use_fast_path=not args.no_fast_path,
    )
    doc = dec.to_json()
    doc["input"] = spec.canonical()
    doc["evidence"] = {k: doc[k] for k in ("criterion", "confidence", "reason") if k in doc}
    doc.update(_form_doc(omega))
    rep.doc.update(doc)
    rep.say(f"input     {spec.canonical()}")
    rep.say(f"div       {_div_text(omega)}")
    rep.say(f"type      {dec.form_type.kind}")
    rep.say(f"verdict   {dec.verdict}  [{dec.criterion}, {dec.confidence}]")
    if dec.reason:
        rep.say(f"reason    {dec.reason}")
    if dec.candidate is not None:
        rep.say(f"branch    {dec.candidate.branch_data}")
    if dec.witness is not None:
        phi, eta = dec.witness
        rep.say(f"witness   phi = {phi.to_expr()},  eta = {eta}")
    if dec.trace:
        rep.say("degree trace:")
        rep.lines.extend(_trace_lines(dec.trace))
    for why in dec.obstructions:
        rep.say(f"obstruction: {why}")
    if dec.verdict == UNKNOWN:
        rep.status = EXIT_UNKNOWN


def cmd_hurwitz(args, rep: Report):
    spec = _read_input(args)
    if spec.kind != "branch":
        raise ParseError("hurwitz expects branch data 'd; parts|parts|...'")
    bd = spec.value
    rule = realizable(bd, args.hurwitz_limit)
    if bd.d <= args.hurwitz_limit and not args.rules_only:
        verdict = oracle_verdict(bd, args.hurwitz_limit)
    else:
        verdict = rule
    if rule.verdict != "unknown" and verdict.verdict != rule.verdict:
        # would mean a bug in one of the two; report it loudly
        rep.status = EXIT_FAILED
        rep.doc["disagreement"] = {"rule": rule.to_json(), "oracle": verdict.to_json()}
    out = verdict.to_json()
    rep.doc.update(branch_data=str(bd), d=bd.d, n=bd.n, realizable=_yes_no(verdict.verdict), method=verdict.method)
    rep.doc["rule"] = rule.to_json()
    if "constellation" in out:
        rep.doc["constellation"] = out["constellation"]
    rep.say(f"branch data  {bd}")
    rep.say(f"realizable   {_yes_no(verdict.verdict)}  [{verdict.method}]")
    if rule is not verdict:
        rep.say(f"rule         {rule.verdict}  [{rule.method}]")
    if verdict.constellation is not None:
        rep.say(f"constellation {verdict.constellation}")
    if verdict.verdict == "unknown":
        rep.status = EXIT_UNKNOWN


def _yes_no(v: str) -> str:
    return {"yes": "yes", "no": "no"}.get(v, "unknown")


def cmd_pullback(args, rep: Report):
    phi = parse_expr(args.phi)
    eta = _parse_eta(args.eta)
    omega = pullback_form(phi, eta)
    laws = verify_pullback_laws(phi, eta)
    rep.doc.update(phi=phi.to_expr(), eta=str(eta), omega=str(omega), laws="pass" if laws.ok else "fail")
    rep.doc["law_checks"] = laws.to_json()
    rep.doc.update({f"omega_{k}": v for k, v in _form_doc(omega).items() if k != "form"})
    rep.say(f"phi     {phi.to_expr()}   (degree {phi.map_degree})")
    rep.say(f"eta     {eta}")
    rep.say(f"omega   {omega}")
    rep.say(f"div     {_div_text(omega)}")
    rep.say(f"laws    {'pass' if laws.ok else 'fail'}")
    for law, fails in laws.failures.items():
        if fails:
            rep.say(f"  {law}: {len(fails)} failure(s)")
    if not laws.ok:
        rep.status = EXIT_FAILED


def _curve_arg(text: str | None) -> HyperCurve | None:
    if not text or text.lower() in ("p1", "none"):
        return None
    return HyperCurve(tuple(Fraction(t) for t in text.split(",")))


def cmd_construct(args, rep: Report):
    curve = _curve_arg(args.curve)
    fam = construct_family(curve, args.r, args.n, args.m, args.count)
    rep.doc.update(
        curve=str(curve) if curve else "P^1", genus=curve.genus if curve else 0,
        r=args.r, n=args.n, m=args.m, members=[f.to_json() for f in fam],
    )
    rep.say(f"curve  {curve if curve else 'P^1'}")
    for i, f in enumerate(fam, 1):
        rep.say(f"[{i}] div {f.divisor}")
        if isinstance(f.form, ExplicitForm):
            rep.say(f"    form {f.form}")
        rep.say(f"    {f.certificate.rule}: {'pass' if f.certificate.passed else 'fail'}")
        if not f.certificate.passed:
            rep.status = EXIT_FAILED


def cmd_omega_basis(args, rep: Report):
    ws = [int(w) for w in args.w.split(",")] if args.w else [args.default_w] * args.m
    basis = omega_D_basis(args.n, args.m, args.z0, ws)
    checks = [check_dim_count_lemma(f) for f in basis.forms]
    rank = coefficient_rank(basis.forms)
    rep.doc.update(
        n=args.n, m=args.m, z0=args.z0, w=ws, third_element=basis.third_element,
        orders=basis.orders, rank=rank, expected=args.n * (args.m // 2),
        forms=[{"label": list(lab), **f.to_json(), "dim_count": c.to_json()}
               for lab, f, c in zip(basis.labels, basis.forms, checks)],
    )
    rep.say(f"D = R_1..R_{args.n} + {args.z0}[inf] + " + " + ".join(f"{w}[S{j + 1}]" for j, w in enumerate(ws)))
    rep.say("pole orders used: " + ", ".join(f"{k}:{v}" for k, v in basis.orders.items()))
    for lab, f, c in zip(basis.labels, basis.forms, checks):
        rep.say(f"  form {lab}: {f.polar_divisor()}   dim-count {'pass' if c.passed else 'fail'}")
    rep.say(f"forms {len(basis.forms)}, coefficient rank {rank} (lower bound {args.n * (args.m // 2)})")
    if not all(c.passed for c in checks) or rank < args.n * (args.m // 2):
        rep.status = EXIT_FAILED


# --- wiring ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text", help="stdout format")
    common.add_argument("--out", help="also write the JSON document to this path")

    p = argparse.ArgumentParser(prog="meroforms", description="New and old meromorphic 1-forms.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", parents=[common], help="type of a form, or divisor of a curve form")
    c.add_argument("input", help="equation, form, JSON document, @file or - for stdin")
    c.set_defaults(func=cmd_classify)

    d = sub.add_parser("decide", parents=[common], help="decide whether a form is new or old")
    d.add_argument("input")
    d.add_argument("--max-degree", type=int, default=None, help="cap on the pullback degree searched")
    d.add_argument("--hurwitz-limit", type=int, default=DEFAULT_SEARCH_LIMIT, help="oracle degree cap")
    d.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET, help="candidate search budget")
    d.add_argument("--no-fast-path", action="store_true", help="skip criteria, go straight to the search")
    d.set_defaults(func=cmd_decide)

    h = sub.add_parser("hurwitz", parents=[common], help="realizability of branch data")
    h.add_argument("input", help="'d; parts|parts|...', e.g. '4; 3+1|2+2|2+2'")
    h.add_argument("--hurwitz-limit", type=int, default=DEFAULT_SEARCH_LIMIT)
    h.add_argument("--rules-only", action="store_true", help="use the rule cascade, not the oracle")
    h.set_defaults(func=cmd_hurwitz)

    b = sub.add_parser("pullback", parents=[common], help="compute phi^* eta and check the laws")
    b.add_argument("--phi", required=True)
    b.add_argument("--eta", required=True, help="f(x) or f(x) dx")
    b.set_defaults(func=cmd_pullback)

    k = sub.add_parser("construct", parents=[common], help="new general-type forms of a given shape")
    k.add_argument("--curve", default="p1", help="p1, or comma separated roots of y^2 = prod(x - e)")
    k.add_argument("--r", type=int, required=True, help="number of zeros")
    k.add_argument("--n", type=int, default=0, help="number of simple poles")
    k.add_argument("--m", type=int, required=True, help="number of higher poles")
    k.add_argument("--count", type=int, default=3)
    k.set_defaults(func=cmd_construct)

    o = sub.add_parser("omega-basis", parents=[common], help="independent new forms in Omega(D)")
    o.add_argument("--n", type=int, required=True)
    o.add_argument("--m", type=int, required=True)
    o.add_argument("--z0", type=int, default=1)
    o.add_argument("--w", help="comma separated pole orders of S_1..S_m")
    o.add_argument("--default-w", type=int, default=18, help="order used for every S_j when --w is absent")
    o.set_defaults(func=cmd_omega_basis)
    return p


def _error_doc(command: str, exc: Exception) -> dict:
    code = getattr(exc, "code", type(exc).__name__)
    out = {"command": command, "error": {"code": code, "message": getattr(exc, "message", str(exc))}}
    pos = getattr(exc, "position", None)
    if pos is not None:
        out["error"]["position"] = pos
    if code == "SplitFieldRequired":
        out["error"]["hint"] = "the polynomial does not split over Q; pass the form as an AbstractForm JSON document"
    return out


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    rep = Report(args.command)
    try:
        args.func(args, rep)
    except (MeroformsError, ValueError, OSError) as exc:
        rep.doc = _error_doc(args.command, exc)
        err = rep.doc["error"]
        rep.lines = [f"error [{err['code']}]: {exc}"] + ([f"hint: {err['hint']}"] if "hint" in err else [])
        rep.status = EXIT_ERROR
    rep.doc["exit_status"] = rep.status
    text = json.dumps(rep.doc, indent=2, ensure_ascii=False, default=str)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    if args.format == "json":
        print(text)
    else:
        stream = sys.stderr if rep.status == EXIT_ERROR else sys.stdout
        print("\n".join(rep.lines), file=stream)
    return rep.status


if __name__ == "__main__":
    sys.exit(main())
