"""Command-line interface.

Exit codes: 0 when every check passes, 1 when a mathematical verdict fails,
2 on input or usage errors.  Reports are deterministic for identical inputs
and flags; timings appear only with ``--timings``.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
import time

from . import io
from .bracket import obstructions, theorem2_crosscheck, verify_poisson
from .classify import (
    classify_one_component,
    is_constant_reducible,
    matches_pullback,
    reducibility_by_nonsingularity,
    transform,
    two_component_verdict,
)
from .compat import (
    MetricPair,
    compatibility_report,
    nijenhuis,
    pencil_analysis,
    pencil_direct_check,
)
from .errors import DegeneratePencil, EngineInconsistency, HydroError, NotAPoissonBracket, ParseError, PoleError, ShapeError
from .liealg import check_linear_form, cocycle_check, jacobi_check, to_bracket
from .oracle import crosscheck_bracket, crosscheck_nijenhuis, oracle_points
from .symexpr import format_expr
from .tensor import det

OK, FAILED, USAGE = 0, 1, 2


class Report:
    """Text lines plus a JSON-ready dict; ``status`` is the exit code."""

    def __init__(self, command, source):
        self.data = {"command": command, "input": source}
        self.lines = []
        self.status = OK

    def say(self, line):
        self.lines.append(line)

    def fail(self):
        self.status = FAILED

    def render(self, as_json):
        if as_json:
            return io.dumps({**self.data, "exit": self.status})
        return "\n".join(self.lines) + "\n"


def _yes(flag):
    return "yes" if flag else "no"


def _relation_entries(report):
    out = {}
    for name, v in report.verdicts.items():
        entry = {"passed": v.passed}
        if not v.passed:
            entry["index"] = dict(zip(v.labels, v.index))
            entry["residual"] = format_expr(v.residual)
        out[name] = entry
    return out


def _derived_notice(B, rep):
    rep.data["b_derived"] = B.b_derived
    if B.b_derived:
        rep.say("note: no b coefficients given; derived from the metrics (Levi-Civita connections)")


def _oracle(rep, result, what):
    rep.data.setdefault("oracle", {})[what] = {
        "max_error": result.max_error, "points": result.points_used, "checked": result.checked,
    }
    verdict = "agree" if result.ok() else "DISAGREE"
    rep.say(f"oracle ({what}): {verdict}, max scaled error {result.max_error:.2e} "
            f"over {result.points_used} points [{', '.join(result.checked)}]")
    if not result.ok():
        rep.fail()


def _metrics_nondegenerate(B):
    return all(md is not None and md.nondegenerate for md in B.metric_data)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_verify(args, rep):
    B = io.load_bracket(args.bracket)
    _derived_notice(B, rep)
    report = verify_poisson(B)
    rep.data["relations"] = _relation_entries(report)
    rep.data["poisson"] = report.overall
    rep.say(f"bracket: N = {B.N}, n = {B.n}, coordinates {', '.join(B.coordinates)}")
    rep.lines.extend(report.lines())
    rep.say("Poisson bracket: " + _yes(report.overall))
    if not report.overall:
        rep.fail()
    if _metrics_nondegenerate(B):
        agree = theorem2_crosscheck(B)
        rep.data["theorem2_crosscheck"] = agree
        rep.say("tensor relations agree with the coefficient relations: " + _yes(agree))
        if not agree:
            rep.fail()
        if args.oracle:
            _oracle(rep, crosscheck_bracket(B, oracle_points(B.N, seed=args.seed)), "bracket")
    else:
        rep.say("degenerate metrics: tensor relations not applicable")


def _t_mixed_name(pair, idx):
    i, j, k = idx
    return "T^{%d,%d%d}_{%d%d}" % (i, pair[0], pair[1], j, k)


def _t_up_name(pair, idx):
    return "T^{%s,%d%d}" % ("".join(map(str, idx)), pair[0], pair[1])


def cmd_obstructions(args, rep):
    B = io.load_bracket(args.bracket)
    _derived_notice(B, rep)
    B.require_nondegenerate()
    obs = obstructions(B)
    mixed = obs.nonzero_mixed()
    up = obs.nonzero_up()
    rep.data["T_mixed"] = {_t_mixed_name(p, i): format_expr(e) for p, i, e in mixed}
    rep.data["T_up"] = {_t_up_name(p, i): format_expr(e) for p, i, e in up}
    rep.data["vanish"] = obs.vanishes()
    if obs.vanishes():
        rep.say("all obstruction tensors vanish")
        return
    rep.say("nonzero entries (pairs alpha < beta; the tensors are antisymmetric in the pair):")
    for p, i, e in mixed:
        rep.say(f"  {_t_mixed_name(p, i)} = {format_expr(e)}")
    for p, i, e in up:
        rep.say(f"  {_t_up_name(p, i)} = {format_expr(e)}")
    if args.oracle:
        _oracle(rep, crosscheck_bracket(B, oracle_points(B.N, seed=args.seed)), "bracket")


def _pairs_from(args):
    """Metric pairs ``MetricPair(g^beta, g^alpha)`` for alpha < beta, so the pencil is det(g^beta - lambda g^alpha)."""
    first = io.load_bracket(args.bracket)
    if args.second is None:
        B = first
        return [((a + 1, c + 1), MetricPair(B.g[c], B.g[a], B.coordinates))
                for a, c in itertools.combinations(range(B.n), 2)]
    second = io.load_bracket(args.second)
    if first.coordinates != second.coordinates:
        raise ShapeError("the two metric files use different coordinates")
    return [((1, 2), MetricPair(second.g[0], first.g[0], first.coordinates))]


def cmd_compat(args, rep):
    pairs = _pairs_from(args)
    if not pairs:
        raise ShapeError("need at least two metrics")
    rep.data["pairs"] = []
    for (a, c), p in pairs:
        p.require_nondegenerate()
        comp = compatibility_report(p)
        almost, compatible = comp["b1"].passed, comp.overall
        Nij = nijenhuis(p)
        nij_zero = all(e.is_zero() for e in Nij.flat)
        pa = pencil_analysis(p)
        try:
            direct = pencil_direct_check(p)
        except DegeneratePencil:
            direct = None
        entry = {
            "pair": [a, c],
            "almost_compatible": almost,
            "compatible": compatible,
            "direct_check": direct,
            "nijenhuis_zero": nij_zero,
            "nonsingular": pa.nonsingular,
            "char_poly": format_expr(pa.char_poly),
            "discriminant": format_expr(pa.discriminant),
            "repeated_roots": [[None if r is None else format_expr(r), m] for r, m in pa.repeated_roots],
        }
        rep.say(f"pair ({a}, {c}): pencil det(g{c} - lambda g{a})")
        rep.say(f"  almost compatible: {_yes(almost)}")
        rep.say(f"  compatible: {_yes(compatible)}")
        for v in comp.failures():
            rep.say(f"    witness {v.describe()}")
            entry.setdefault("witnesses", {})[v.name] = {
                "index": dict(zip(v.labels, v.index)), "residual": format_expr(v.residual)}
        rep.say("  linear pencil connection and curvature: "
                + ("degenerate pencil" if direct is None else _yes(direct)))
        rep.say(f"  Nijenhuis tensor vanishes: {_yes(nij_zero)}")
        rep.say(f"  nonsingular: {_yes(pa.nonsingular)}")
        rep.say(f"  characteristic polynomial: {format_expr(pa.char_poly)}")
        rep.say(f"  discriminant: {format_expr(pa.discriminant)}")
        for r, m in pa.repeated_roots:
            label = "double root" if m == 2 else "repeated root"
            rep.say(f"  {label}: {r} (multiplicity {m})" if r is not None
                    else f"  repeated nonlinear factor (multiplicity {m})")
        if direct is not None and direct != compatible:
            entry["inconsistent"] = True
            rep.say("  ENGINE INCONSISTENCY: tensor criterion and direct pencil check disagree")
        if not compatible:
            rep.fail()
        if args.oracle:
            _oracle(rep, crosscheck_nijenhuis(p, oracle_points(p.N, seed=args.seed)), f"Nijenhuis {a}{c}")
        rep.data["pairs"].append(entry)


def cmd_nijenhuis(args, rep):
    rep.data["pairs"] = []
    for (a, c), p in _pairs_from(args):
        p.require_nondegenerate()
        Nij = nijenhuis(p)
        nonzero = [(idx, e) for idx, e in zip(itertools.product(range(1, p.N + 1), repeat=3), Nij.flat)
                   if not e.is_zero()]
        rep.say(f"pair ({a}, {c}): affinor v = g{c} (g{a})^-1")
        if not nonzero:
            rep.say("  Nijenhuis tensor vanishes")
        for (k, i, j), e in nonzero:
            rep.say(f"  N^{k}_{{{i}{j}}} = {format_expr(e)}")
        rep.data["pairs"].append({"pair": [a, c], "nonzero": {f"N^{k}_{{{i}{j}}}": format_expr(e)
                                                                for (k, i, j), e in nonzero}})
        if args.oracle:
            _oracle(rep, crosscheck_nijenhuis(p, oracle_points(p.N, seed=args.seed)), f"Nijenhuis {a}{c}")


def cmd_classify(args, rep):
    B = io.load_bracket(args.bracket)
    _derived_notice(B, rep)
    report = verify_poisson(B)
    if not report.overall:
        raise NotAPoissonBracket(report)
    if B.N == 1:
        res = classify_one_component(B)
        consts = ", ".join(str(c) for c in res.constants)
        rep.data.update(verdict=res.verdict.kind, reference=res.reference,
                        constants=[str(c) for c in res.constants])
        rep.say(f"verdict: {res.verdict.kind}")
        rep.say(f"  {res.verdict.note}")
        if res.reference is not None:
            rep.say(f"  g^alpha = c^alpha g^{res.reference} with c = ({consts})")
        rep.say(f"  {res.normalizing_change}")
        return
    verdict = is_constant_reducible(B)
    rep.data["verdict"] = verdict.kind
    rep.say(f"verdict: {verdict.kind}")
    rep.say(f"  {verdict.note}")
    if verdict.witness is not None:
        rep.data["witness"] = verdict.witness.describe()
        rep.say(f"  witness: {verdict.witness.describe()}")
    nonsing = reducibility_by_nonsingularity(B)
    rep.data["nonsingularity_test"] = nonsing.kind
    rep.say(f"nonsingular-pair test: {nonsing.kind} ({nonsing.note})")
    if (B.N, B.n) == (2, 2):
        tc = two_component_verdict(B, seed=args.seed)
        rep.data["two_component"] = {"kind": tc.kind, "text": tc.text, "notes": tc.notes}
        rep.say(f"two-component class: {tc.text}")
        for note in tc.notes:
            rep.say(f"  {note}")


def cmd_transform(args, rep):
    B = io.load_bracket(args.bracket)
    change = io.load_change(args.change, B.coordinates)
    out = transform(B, change)
    doc = io.bracket_to_dict(out)
    if out.pullback_of is not None:
        doc["pullback"] = True  # entries are functions of the source coordinates
    rep.data["bracket"] = doc
    rep.lines.append(io.dumps(doc).rstrip("\n"))
    if args.expect is not None:
        target = io.load_bracket(args.expect)
        match = matches_pullback(transform(B, change, express_in_new=False), target, change)
        rep.data["expect"] = {"target": args.expect, "match": match}
        print(f"expect {args.expect}: {'match' if match else 'MISMATCH'}", file=sys.stderr)
        if not match:
            rep.fail()


def _linear_data(source):
    doc = io.read_json(source)
    if io.is_constants_file(doc):
        return io.linear_data_from_dict(doc)
    L = check_linear_form(io.bracket_from_dict(doc))
    if L is None:
        raise ShapeError("bracket is not field-linear (b must be constant and g linear in u)")
    return L


def cmd_liealg(args, rep):
    L = _linear_data(args.bracket)
    jac = jacobi_check(L)
    rep.say(f"structure constants: N = {L.N}, n = {L.n}")
    rep.say("Jacobi identity of the operation: " + ("pass" if jac.overall else "FAIL"))
    for v in jac.failures():
        rep.say(f"  {v.describe()}")
    rep.data["jacobi"] = _relation_entries(jac)
    if not jac.overall:
        rep.fail()
        return
    coc = cocycle_check(L)
    rep.say(f"constant part: skew {_yes(coc.skew)}, closed {_yes(coc.closed)}")
    rep.data["cocycle"] = {"skew": coc.skew, "closed": coc.closed,
                           "coboundary": None if coc.coboundary is None else [str(c) for c in coc.coboundary]}
    if coc.skew and coc.closed:
        if coc.is_coboundary:
            rep.say("  coboundary: shift u^k -> u^k - c^k with c = (" + ", ".join(map(str, coc.coboundary)) + ")")
        else:
            rep.say("  not a coboundary (the shift system is infeasible)")
    else:
        rep.fail()
        for v in coc.report.failures():
            rep.say(f"  {v.describe()}")
    B = to_bracket(L)
    first_zero = not any(L.b0[0].flat)
    nondeg = [not det(m).is_zero() for m in B.g]
    rep.data["normal_form"] = {"first_b_zero": first_zero, "nondegenerate": nondeg}
    rep.say(f"normal-form conditions: b^(ij1)_k = 0: {_yes(first_zero)}; "
            f"metrics nondegenerate: {_yes(all(nondeg))}")
    if args.oracle:
        from .liealg import functional_oracle

        r = functional_oracle(L, seed=args.seed)
        rep.data["functional_oracle"] = r
        ok = r < 1e-9
        rep.say(f"oracle (spectral Jacobi residual): {r:.2e} ({'agree' if ok else 'DISAGREE'})")
        if not ok:
            rep.fail()


COMMANDS = {
    "verify": (cmd_verify, "check skew-symmetry and Jacobi relations (a1)-(a7)"),
    "obstructions": (cmd_obstructions, "print the nonzero obstruction tensor entries"),
    "compat": (cmd_compat, "compatibility of metric pairs"),
    "nijenhuis": (cmd_nijenhuis, "Nijenhuis tensor of the pair affinors"),
    "classify": (cmd_classify, "reducibility to constant form"),
    "transform": (cmd_transform, "apply a change of coordinates"),
    "liealg": (cmd_liealg, "Lie algebra and cocycle checks for field-linear data"),
}


GLOBAL_DEFAULTS = {"json": False, "seed": 0, "oracle": False, "timings": False}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="machine-readable report")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for sampled checks")
    common.add_argument("--oracle", action="store_true", default=argparse.SUPPRESS,
                        help="numeric cross-check at seeded points")
    common.add_argument("--timings", action="store_true", default=argparse.SUPPRESS, help="report elapsed time")

    parser = argparse.ArgumentParser(prog="hydrobracket", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, parents=[common])
        p.add_argument("bracket", help="bracket file (or fixture name)")
        if name in ("compat", "nijenhuis"):
            p.add_argument("second", nargs="?", help="second metric file; its first metric is g2")
        if name == "transform":
            p.add_argument("change", help="change file")
            p.add_argument("--expect", help="target bracket; compare in pullback form")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    # the global flags may come before or after the command; fill in the rest here
    for key, value in GLOBAL_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, value)
    rep = Report(args.command, args.bracket)
    handler = COMMANDS[args.command][0]
    start = time.perf_counter()
    try:
        handler(args, rep)
    except NotAPoissonBracket as exc:
        rep.say("not a Poisson bracket:")
        if exc.report is not None:
            rep.data["relations"] = _relation_entries(exc.report)
            for v in exc.report.failures():
                rep.say(f"  {v.describe()}")
        rep.status = FAILED
    except EngineInconsistency:
        raise  # a bug in the engine, never an input problem
    except (HydroError, OSError, json.JSONDecodeError, ValueError, KeyError, TypeError) as exc:
        msg = f"error: {exc}"
        rep.data["error"] = str(exc)
        if isinstance(exc, (ParseError, PoleError)):
            msg = f"error ({type(exc).__name__}): {exc}"
        rep.lines = [msg]
        rep.status = USAGE
    if args.timings:
        elapsed = time.perf_counter() - start
        rep.data["seconds"] = round(elapsed, 3)
        rep.say(f"elapsed: {elapsed:.3f} s")
    out = rep.render(args.json)
    stream = sys.stderr if rep.status == USAGE and not args.json else sys.stdout
    stream.write(out)
    return rep.status


if __name__ == "__main__":
    sys.exit(main())
