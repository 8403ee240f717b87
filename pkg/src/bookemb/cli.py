"""``bookemb`` command line.

Exit codes: 0 SAT / ok, 20 UNSAT, 30 unknown (budget), 1 verification
failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import formats, gadgets, lemmas
from .constraints import ConstraintError, ConstraintSet, MissingMarker, check
from .draw import render_svg
from .embedding import ShapeMismatch, check_shape, validate_embedding
from .graph import CompactGraph, Graph, validate
from .satenc import InvalidK, MalformedModel, decode, emit_dimacs, encode, parse_model, verify_model
from .solver import Budget, Status, decide_k_pages, edge_density_lower_bound, pagenumber

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_UNSAT, EXIT_UNKNOWN = 0, 1, 2, 20, 30
STATUS_EXIT = {Status.SAT: EXIT_OK, Status.UNSAT: EXIT_UNSAT, Status.UNKNOWN: EXIT_UNKNOWN}
JSON_NODE_LIMIT = 100_000


class UsageError(Exception):
    pass


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str, data: bytes) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_bytes(data)


def _load_graph(path: str) -> Graph:
    raw = _read(path)
    kind = formats.sniff(path, raw[:16])
    if kind is formats.FileKind.GRAPH_TEXT:
        return formats.parse_graph_text(raw).to_graph()
    if kind is not formats.FileKind.GRAPH_JSON:
        raise UsageError(f"{path}: not a graph file")
    return formats.parse_graph_json(raw)


def _load_constraints(path: str | None, graph: Graph) -> ConstraintSet:
    if not path:
        return ConstraintSet()
    return formats.parse_constraints(_read(path), graph.roles)


def _budget(args) -> Budget:
    return Budget(args.budget_nodes, args.budget_seconds, args.threads)


def roles_path(out: str) -> str:
    for suf in (".graph.json", ".graph.txt", ".json", ".txt"):
        if out.endswith(suf):
            return out[: -len(suf)] + ".roles.json"
    return out + ".roles.json"


# -- verbs --------------------------------------------------------------------


def cmd_gen(args) -> int:
    try:
        g = gadgets.build(args.gadget, depth=args.depth, copies=args.copies, n=args.n, variant=args.variant)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rep = validate(g)
    # an explicit suffix wins; otherwise pick by size
    as_text = args.out.endswith(".graph.txt") or (g.n > JSON_NODE_LIMIT and not args.out.endswith(".graph.json"))
    if as_text:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        with open(args.out, "wb") as fh:
            formats.write_graph_text(g, fh)
    else:
        _write(args.out, formats.serialize_graph_json(g))
    _write(roles_path(args.out), formats.serialize_roles(g.roles))
    print(f"nodes {g.n} edges {g.m} triangles {len(g.triangle_array())}")
    for w in rep.warnings:
        print(f"warning: {w}")
    for e in rep.errors:
        print(f"error: {e}", file=sys.stderr)
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_solve(args) -> int:
    g = _load_graph(args.graph)
    cs = _load_constraints(args.constraints, g)
    budget = _budget(args)
    if args.min:
        if len(cs):
            raise UsageError("--min does not take constraints")
        res = pagenumber(g, budget)
        if res.status is Status.UNKNOWN:
            print("UNKNOWN")
            return EXIT_UNKNOWN
        print(res.pagenumber)
        if args.out and res.witness is not None:
            _write(args.out, formats.serialize_certificate(res.witness))
        return EXIT_OK
    try:
        v = decide_k_pages(g, args.k, cs, budget)
    except (ConstraintError, MissingMarker) as exc:
        raise UsageError(str(exc)) from None
    print(v.status.value)
    print(f"nodes_expanded {v.nodes_expanded}")
    if v.sat and args.out:
        _write(args.out, formats.serialize_certificate(v.witness))
    return STATUS_EXIT[v.status]


def cmd_verify(args) -> int:
    g = _load_graph(args.graph)
    emb = formats.parse_certificate(_read(args.cert))
    cs = _load_constraints(args.constraints, g)
    try:
        check_shape(g, emb)
        bad = validate_embedding(g, emb)
        viol = check(g, emb, cs) if len(cs) else []
    except (ShapeMismatch, MissingMarker, ConstraintError) as exc:
        raise UsageError(str(exc)) from None
    for e1, e2 in bad:
        print(f"conflict: {e1[0]}-{e1[1]} and {e2[0]}-{e2[1]} on page {emb.pages[e1]}")
    for v in viol:
        print(f"violated: {v.constraint} {v.detail}")
    if bad or viol:
        return EXIT_FAIL
    print("ok")
    return EXIT_OK


def cmd_encode(args) -> int:
    g = _load_graph(args.graph)
    cs = _load_constraints(args.constraints, g)
    try:
        cnf = encode(g, args.k, cs, cut=args.cut)
    except (InvalidK, ConstraintError, MissingMarker) as exc:
        raise UsageError(str(exc)) from None
    text = emit_dimacs(cnf)
    if args.out:
        _write(args.out, text.encode())
    else:
        sys.stdout.write(text)
    print(f"vars {cnf.num_vars} clauses {len(cnf.clauses)}", file=sys.stderr)
    return EXIT_OK


def cmd_decode(args) -> int:
    g = _load_graph(args.graph)
    cnf = formats.parse_dimacs_bytes(_read(args.cnf))
    try:
        model = parse_model(_read(args.model).decode())
    except ValueError as exc:
        raise UsageError(f"{args.model}: {exc}") from None
    if not verify_model(cnf, model):
        print("model does not satisfy the formula")
        return EXIT_FAIL
    try:
        emb = decode(cnf, model, g, args.k)
    except MalformedModel as exc:
        print(f"malformed model: {exc}")
        return EXIT_FAIL
    bad = validate_embedding(g, emb)
    if bad:
        print(f"decoded embedding has conflicts: {bad[:3]}")
        return EXIT_FAIL
    data = formats.serialize_certificate(emb)
    if args.out:
        _write(args.out, data)
    else:
        sys.stdout.write(data.decode())
    return EXIT_OK


def cmd_lemma(args) -> int:
    if args.list:
        for name in sorted(lemmas.SCENARIOS):
            sc = lemmas.SCENARIOS[name]
            exp = sc.expected.value if sc.expected else "-"
            print(f"{name}\t{sc.engine}\t{exp}\t{sc.description}")
        return EXIT_OK
    if not args.name:
        raise UsageError("lemma needs --name (or --list)")
    try:
        sc = lemmas.get(args.name)
    except lemmas.UnknownScenario as exc:
        raise UsageError(str(exc.args[0])) from None
    if args.export:
        out = lemmas.export(sc, args.export)
    elif args.external:
        out = lemmas.check_external(sc, _read(args.external).decode())
    elif sc.engine == "export":
        raise UsageError(f"{sc.name} is export-only; pass --export DIR (and later --external RESULT)")
    else:
        budget = sc.budget
        if args.budget_nodes or args.budget_seconds or args.threads != 1:
            budget = Budget(args.budget_nodes, args.budget_seconds or sc.budget.max_seconds, args.threads)
        try:
            out = lemmas.run(sc, budget, strict=False)
        except lemmas.ScenarioFailure as exc:
            print(f"witness check failed: {exc}")
            return EXIT_FAIL
    report = out.to_bytes(timing=args.timing)
    if args.report:
        _write(args.report, report)
    if args.cert and out.witness is not None:
        _write(args.cert, formats.serialize_certificate(out.witness))
    verdict = out.verdict.value if out.verdict else "EXPORTED"
    print(f"{sc.name} {verdict} {out.outcome} nodes_expanded={out.nodes_expanded} exhausted={out.exhausted}")
    if out.outcome == "fail":
        return EXIT_FAIL
    return out.exit_code


def cmd_draw(args) -> int:
    g = _load_graph(args.graph)
    emb = formats.parse_certificate(_read(args.cert))
    try:
        bad = validate_embedding(g, emb)
    except ShapeMismatch as exc:
        print(f"invalid certificate: {exc}")
        return EXIT_FAIL
    if bad:
        print(f"invalid certificate: conflicts {bad[:3]}")
        return EXIT_FAIL
    labels = None
    if args.labels:
        labels = {v: r for r, v in g.roles.items()}
    _write(args.out, render_svg(emb, labels).encode())
    return EXIT_OK


def cmd_stats(args) -> int:
    raw = _read(args.graph)
    kind = formats.sniff(args.graph, raw[:16])
    g: Graph | CompactGraph = formats.parse(kind, raw)
    rep = validate(g)
    print(f"nodes {g.n}")
    print(f"edges {g.m}")
    print(f"triangles {len(g.triangle_array())}")
    print(f"roles {len(g.roles)}")
    print(f"page_lower_bound {edge_density_lower_bound(g.n, g.m)}")
    for w in rep.warnings:
        print(f"warning: {w}")
    for e in rep.errors:
        print(f"error: {e}")
    return EXIT_OK if rep.ok else EXIT_FAIL


# -- parser -------------------------------------------------------------------


def _add_budget(p) -> None:
    p.add_argument("--budget-nodes", type=int, default=None, help="cap on search nodes")
    p.add_argument("--budget-seconds", type=float, default=None, help="wall-clock cap")
    p.add_argument("--threads", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bookemb", description="Exact book embedding toolkit")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("gen", help="build a gadget graph")
    p.add_argument("--gadget", required=True, choices=gadgets.GADGETS)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--copies", type=int, default=15)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--variant", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="decide k pages or compute the pagenumber")
    p.add_argument("--graph", required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--k", type=int)
    g.add_argument("--min", action="store_true")
    p.add_argument("--constraints")
    p.add_argument("--out", help="certificate path")
    _add_budget(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a certificate")
    p.add_argument("--graph", required=True)
    p.add_argument("--cert", required=True)
    p.add_argument("--constraints")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("encode", help="write the CNF encoding")
    p.add_argument("--graph", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--constraints")
    p.add_argument("--cut", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="turn a SAT model into a certificate")
    p.add_argument("--graph", required=True)
    p.add_argument("--cnf", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("lemma", help="run or export a named scenario")
    p.add_argument("--name")
    p.add_argument("--list", action="store_true")
    p.add_argument("--export", metavar="DIR")
    p.add_argument("--external", metavar="RESULT", help="external solver output for an exported scenario")
    p.add_argument("--report", help="write the JSON outcome report here")
    p.add_argument("--cert", help="write the witness certificate here")
    p.add_argument("--timing", action="store_true", help="include wall_ms in the report")
    _add_budget(p)
    p.set_defaults(func=cmd_lemma)

    p = sub.add_parser("draw", help="render a certificate as an SVG arc diagram")
    p.add_argument("--graph", required=True)
    p.add_argument("--cert", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--labels", action="store_true", help="label nodes with their roles")
    p.set_defaults(func=cmd_draw)

    p = sub.add_parser("stats", help="print graph statistics and validation")
    p.add_argument("--graph", required=True)
    p.set_defaults(func=cmd_stats)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, formats.ParseError) as exc:
        print(f"bookemb: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
