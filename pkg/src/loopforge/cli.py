"""Command-line interface: ``loopforge <command> ...``.

Exit status is 0 whenever a result was computed, whatever the verdict, and
2 on operational errors (bad input, parse errors, size-guard refusals).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any

from . import catalog, loopcore, terms
from .extension import central_extension
from .formats import (
    FormatError, format_cocycle, format_sts, format_table, parse_cocycle,
    parse_sts_lines, parse_table, parse_tuples, read_text,
)
from .loopcore import FiniteLoop, LoopError, SizeLimitError
from .steiner import (
    STS, assoc_case_predicate, is_hall, is_minimal, is_steiner_loop, orient, oriented_steiner_loop,
    pasch_configurations, steiner_loop,
)
from .subdirect import (
    InvariantError, SubdirectProduct, direct_product, failing_projection, goursat_decompose,
    normality_report,
)

LATTICE_LIMIT = 64


class CliError(Exception):
    pass


def _guards(args) -> dict[str, int]:
    return {
        "max_order": loopcore.MAX_ORDER,
        "budget": getattr(args, "budget", None) or terms.BUDGET,
        "lattice_limit": getattr(args, "lattice_limit", LATTICE_LIMIT),
    }


# -- input resolution -----------------------------------------------------------

def _builtin_name(ref: str) -> str | None:
    if ref.startswith("builtin:"):
        return ref[len("builtin:"):]
    if not Path(ref).exists():
        try:
            catalog.entry(ref)
            return ref
        except LoopError:
            return None
    return None


def load_loop(ref: str, base_dir: Path | None = None) -> FiniteLoop:
    name = _builtin_name(ref)
    if name is not None:
        e = catalog.entry(name)
        if e.kind == "sts":
            return steiner_loop(e.payload)
        return catalog.get_loop(name)
    path = Path(ref)
    if base_dir is not None and not path.is_absolute() and not path.exists():
        path = base_dir / path
    if not path.exists():
        raise CliError(f"no such file or builtin: {ref}")
    return parse_table(read_text(path))


def load_sts(ref: str) -> tuple[STS, list[tuple[int, int, int]]]:
    name = _builtin_name(ref)
    if name is not None:
        S = catalog.get_sts(name)
        return S, list(S.blocks)
    if not Path(ref).exists():
        raise CliError(f"no such file or builtin: {ref}")
    return parse_sts_lines(read_text(ref))


def load_cocycle(ref: str, symmetric: bool = False):
    name = _builtin_name(ref)
    if name is not None:
        e = catalog.entry(name)
        if e.kind != "cocycle":
            raise CliError(f"builtin {name!r} is a {e.kind}, not a cocycle")
        return e.payload
    path = Path(ref)
    if not path.exists():
        raise CliError(f"no such file or builtin: {ref}")
    c, _, _ = parse_cocycle(read_text(path), lambda r: load_loop(r, path.parent), symmetric)
    return c


# -- output helpers ---------------------------------------------------------------

def _labels(L: FiniteLoop, xs) -> list[str]:
    return [L.label(int(x)) for x in xs]


def _emit(args, payload: dict[str, Any], lines: list[str]) -> None:
    if args.json:
        payload = {"command": args.command, "guards": _guards(args), **payload}
        print(json.dumps(payload, indent=2, sort_keys=False))
    else:
        g = _guards(args)
        lines.append(f"guards: max_order={g['max_order']} budget={g['budget']} "
                     f"lattice_limit={g['lattice_limit']}")
        print("\n".join(lines))


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _yn(b: bool | None) -> str:
    return "n/a" if b is None else ("yes" if b else "no")


# -- commands -----------------------------------------------------------------------

def cmd_analyze(args) -> None:
    L = load_loop(args.input)
    zc = loopcore.center(L)
    r: dict[str, Any] = {
        "input": args.input,
        "order": L.order,
        "commutative": loopcore.is_commutative(L),
        "associative": loopcore.is_associative(L),
        "abelian_group": loopcore.is_abelian_group(L),
        "steiner": is_steiner_loop(L),
        "moufang": loopcore.is_moufang(L),
        "diassociative": loopcore.is_diassociative(L),
        "simple": loopcore.is_simple(L),
        "center": _labels(L, zc.elements),
        "exponent": loopcore.exponent(L, args.max_exponent),
        "exponent_bound": args.max_exponent or 2 * L.order,
    }
    try:
        classes = loopcore.classify_subloops(L, limit=args.lattice_limit)
        r["subloops"] = {"count": len(classes),
                         "by_tag": {t: sum(c.tag == t for c in classes)
                                    for t in ("abelian", "nonabelian-simple", "other")}}
    except SizeLimitError as exc:
        r["subloops"] = {"refused": str(exc)}
    lines = [f"loop {args.input}: order {L.order}"]
    for key in ("commutative", "associative", "abelian_group", "steiner", "moufang",
                "diassociative", "simple"):
        lines.append(f"  {key.replace('_', ' ')}: {_yn(r[key])}")
    lines.append(f"  center ({len(zc)}): {' '.join(r['center'])}")
    exp = r["exponent"]
    lines.append(f"  exponent: {exp if exp is not None else 'none up to ' + str(r['exponent_bound'])}")
    s = r["subloops"]
    if "refused" in s:
        lines.append(f"  subloops: refused (size guard): {s['refused']}")
    else:
        tags = ", ".join(f"{k} {v}" for k, v in s["by_tag"].items())
        lines.append(f"  subloops: {s['count']} ({tags})")
    _emit(args, r, lines)


def cmd_propagate(args) -> None:
    L = load_loop(args.input)
    target = args.input
    if args.quotient_by_center:
        L, _ = loopcore.quotient(L, loopcore.center(L))
        target += "/Z"
    E = terms.equation_from_text(args.eq)
    rep = terms.propagates(E, L, budget=args.budget)
    r = {
        "input": target,
        "order": L.order,
        "equation": terms.format_equation(E),
        "result": "PASS" if rep.result else "FAIL",
        "witness": _labels(L, rep.witness) if rep.witness else None,
        "failure": _labels(L, rep.failure) if rep.failure else None,
        "subloop_size": rep.subloop_size,
        "satisfying_tuples": rep.satisfying,
        "subloops_checked": rep.subloops_checked,
    }
    lines = [f"{r['result']}: {r['equation']} in {target} (order {L.order})"]
    if not rep.result:
        lines.append(f"  witness: {' '.join(r['witness'])} satisfies the equation")
        lines.append(f"  it generates a subloop of order {rep.subloop_size} where "
                     f"{' '.join(r['failure'])} violates it")
    lines.append(f"  satisfying tuples: {rep.satisfying}, subloops checked: {rep.subloops_checked}")
    _emit(args, r, lines)


def cmd_steiner(args) -> None:
    S, orders = load_sts(args.input)
    r: dict[str, Any] = {"input": args.input, "points": S.n, "blocks": len(S.blocks), "valid": True}
    lines = [f"STS {args.input}: {S.n} points, {len(S.blocks)} blocks, valid"]
    action = args.action
    if action in ("anti-pasch", "report"):
        pasch = pasch_configurations(S)
        r["anti_pasch"] = not pasch
        r["pasch"] = [[[S.label(p) for p in b] for b in conf] for conf in pasch]
        lines.append(f"  anti-Pasch: {_yn(not pasch)} ({len(pasch)} Pasch configurations)")
        for conf in r["pasch"][: args.show]:
            lines.append("    " + "  ".join("{" + ",".join(b) + "}" for b in conf))
    if action in ("minimal", "report"):
        r["minimal"] = is_minimal(S)
        lines.append(f"  minimal: {_yn(r['minimal'])}")
    if action in ("hall", "report"):
        r["hall"] = is_hall(S)
        lines.append(f"  Hall: {_yn(r['hall'])}")
    if action == "to-loop":
        _write(format_table(steiner_loop(S)), args.output)
        return
    if action == "orient":
        if args.diag is None:
            raise CliError("orient needs --diag 0 or --diag 1")
        O = orient(S, orders)
        X = oriented_steiner_loop(O, args.diag)
        if args.output:
            _write(format_table(X), args.output)
        rep = terms.propagates(terms.builtin_equation("assoc"), X, budget=args.budget)
        dia = loopcore.diassociativity_counterexample(X)
        r.update({
            "diag": args.diag,
            "order": X.order,
            "exponent": loopcore.exponent(X),
            "assoc_propagates": rep.result,
            "diassociative": dia is None,
            "diassociativity_counterexample": None if dia is None else {
                "generators": _labels(X, dia[0]), "triple": _labels(X, dia[1])},
        })
        lines.append(f"  oriented loop (diag={args.diag}): order {X.order}, exponent {r['exponent']}")
        lines.append(f"  associativity propagates: {_yn(rep.result)}")
        if dia is not None:
            lines.append(f"  not diassociative: <{' '.join(_labels(X, dia[0]))}> "
                         f"fails on {' '.join(_labels(X, dia[1]))}")
        if args.check_cases:
            mism = _case_mismatches(O, args.diag, X)
            r["case_mismatches"] = mism
            lines.append(f"  case predicate mismatches: {mism}")
    _emit(args, r, lines)


def _case_mismatches(O, diag: int, X: FiniteLoop) -> int:
    n = O.base.n + 1
    t = X.table
    bad = 0
    for x in range(n):
        for y in range(n):
            for z in range(n):
                pred = assoc_case_predicate(O, diag, x, y, z)
                for a in range(2):
                    for b in range(2):
                        for c in range(2):
                            u, v, w = a * n + x, b * n + y, c * n + z
                            if (t[t[u, v], w] == t[u, t[v, w]]) != pred:
                                bad += 1
    return bad


def cmd_goursat(args) -> None:
    X1, X2 = load_loop(args.factor1), load_loop(args.factor2)
    P = direct_product([X1, X2])
    tuples = parse_tuples(read_text(args.subloop), [X1, X2])
    elements = [P.encode(t) for t in tuples]
    if not loopcore.is_subloop(P.underlying, elements):
        A = loopcore.generated_subloop(P.underlying, elements)
        raise CliError(f"the listed tuples are not closed; they generate {len(A)} elements")
    A = loopcore.generated_subloop(P.underlying, elements)
    i = failing_projection(P, A)
    if i is not None:
        raise CliError(f"not a subdirect product: projection onto factor {i + 1} is not surjective")
    g = goursat_decompose(SubdirectProduct(P, A))
    norm = normality_report(P, A)

    def cosets(X, pi, Q):
        return [[X.label(x) for x in range(X.order) if pi(x) == q] for q in range(Q.order)]

    c1, c2 = cosets(X1, g.pi1, g.Q1), cosets(X2, g.pi2, g.Q2)
    r = {
        "input": args.subloop,
        "product": f"{args.factor1} x {args.factor2}",
        "size": len(A),
        "N1": _labels(X1, g.N1.elements),
        "N2": _labels(X2, g.N2.elements),
        "cosets1": c1,
        "cosets2": c2,
        "phi": [[c1[q], c2[g.phi(q)]] for q in range(g.Q1.order)],
        "Q1_table": g.Q1.table.tolist(),
        "normal": norm.direct,
        "criterion": {"M1": _labels(X1, norm.M1), "M2": _labels(X2, norm.M2),
                      "central1": norm.central1, "central2": norm.central2},
    }
    lines = [f"subdirect product of {r['product']} with {len(A)} elements",
             f"  N1 = {{{','.join(r['N1'])}}}", f"  N2 = {{{','.join(r['N2'])}}}",
             "  phi on cosets:"]
    for a, b in r["phi"]:
        lines.append(f"    {{{','.join(a)}}} -> {{{','.join(b)}}}")
    lines.append("  quotient table X1/N1 (coset indices):")
    lines += ["    " + " ".join(map(str, row)) for row in r["Q1_table"]]
    lines.append(f"  normal in product: {_yn(norm.direct)} "
                 f"(M1/N1 central: {_yn(norm.central1)}, M2/N2 central: {_yn(norm.central2)})")
    _emit(args, r, lines)


def cmd_extend(args) -> None:
    c = load_cocycle(args.input, args.symmetric)
    ext = central_extension(c, verify=not args.no_verify)
    text = format_table(ext.loop)
    if args.json:
        r = {"input": args.input, "order": ext.loop.order, "verified": not args.no_verify,
             "table": ext.loop.table.tolist(),
             "labels": list(ext.loop.labels) if ext.loop.labels else None}
        if args.output:
            _write(text, args.output)
        _emit(args, r, [])
        return
    _write(text, args.output)
    if args.output:
        print(f"wrote {ext.loop.order}-element loop to {args.output}", file=sys.stderr)


def cmd_builtin(args) -> None:
    if args.action == "list":
        rows = [{"name": e.name, "kind": e.kind, "note": e.note} for e in catalog.entries()]
        rows += [{"name": k, "kind": "loop", "note": v} for k, v in catalog.families().items()]
        if args.json:
            _emit(args, {"entries": rows}, [])
        else:
            width = max(len(r["name"]) for r in rows)
            print("\n".join(f"{r['name']:<{width}}  {r['kind']:<7}  {r['note']}" for r in rows))
        return
    if not args.name:
        raise CliError("emit needs a builtin name")
    _write(emit_builtin(args.name), args.output)


def emit_builtin(name: str) -> str:
    e = catalog.entry(name)
    if e.kind == "loop":
        return format_table(e.payload)
    if e.kind == "sts":
        return format_sts(e.payload)
    z_ref, base_ref = e.refs
    return format_cocycle(e.payload, z_ref, base_ref)


# -- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="loopforge", description="Propagation of equations in finite loops.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        sp.add_argument("--budget", type=int, default=None, help="tuple evaluation budget")
        return sp

    a = common(sub.add_parser("analyze", help="structural report for a loop"))
    a.add_argument("input", help="table file, builtin:NAME or NAME")
    a.add_argument("--lattice-limit", type=int, default=LATTICE_LIMIT,
                   help="largest order for subloop classification")
    a.add_argument("--max-exponent", type=int, default=None)
    a.set_defaults(func=cmd_analyze)

    a = common(sub.add_parser("propagate", help="does an equation propagate?"))
    a.add_argument("input")
    a.add_argument("--eq", required=True, help="builtin equation name or text like 'x*y = y*x'")
    a.add_argument("--quotient-by-center", action="store_true")
    a.set_defaults(func=cmd_propagate)

    a = common(sub.add_parser("steiner", help="triple system checks"))
    a.add_argument("input", help="STS file, builtin:NAME or NAME")
    a.add_argument("action", nargs="?", default="report",
                   choices=["report", "validate", "anti-pasch", "minimal", "hall", "to-loop", "orient"])
    a.add_argument("--diag", type=int, choices=[0, 1])
    a.add_argument("--check-cases", action="store_true", help="compare the case predicate with lifted triples")
    a.add_argument("--show", type=int, default=5, help="Pasch configurations to print")
    a.add_argument("-o", "--output")
    a.set_defaults(func=cmd_steiner)

    a = common(sub.add_parser("goursat", help="decompose a subdirect product of two loops"))
    a.add_argument("factor1")
    a.add_argument("factor2")
    a.add_argument("--subloop", required=True, help="file with one 'x1 x2' pair per line")
    a.set_defaults(func=cmd_goursat)

    a = common(sub.add_parser("extend", help="central extension from a cocycle"))
    a.add_argument("input", help="cocycle file, builtin:NAME or NAME")
    a.add_argument("--symmetric", action="store_true", help="each listed (x, y) also sets (y, x)")
    a.add_argument("--no-verify", action="store_true")
    a.add_argument("-o", "--output")
    a.set_defaults(func=cmd_extend)

    a = common(sub.add_parser("builtin", help="list or emit catalog entries"))
    a.add_argument("action", choices=["list", "emit"])
    a.add_argument("name", nargs="?")
    a.add_argument("-o", "--output")
    a.set_defaults(func=cmd_builtin)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    if getattr(args, "budget", None) is None:
        args.budget = terms.BUDGET
    try:
        args.func(args)
    except SizeLimitError as exc:
        print(f"refused (size guard): {exc}", file=sys.stderr)
        return 2
    except (CliError, FormatError, LoopError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InvariantError as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
