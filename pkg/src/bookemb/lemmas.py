"""Named scenarios: gadget instances with positional and color hypotheses,
run through the backtracking solver or exported as CNF.

Every scenario is a ``(graph, k, constraints)`` triple plus an expected
verdict. A mismatch between a completed verdict and the expectation raises
:class:`ScenarioFailure`; an out-of-budget run is ``inconclusive``, never a
pass. Markers ``u`` and ``v`` stand for the interval boundaries the
hypotheses talk about.
"""

from __future__ import annotations

import hashlib
import random
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .constraints import (
    Arc,
    Before,
    CondColorFrom,
    ConstraintSet,
    EdgeColorNot,
    ExitColored,
    InOpenInterval,
    Interval,
    OutsideClosedInterval,
    check,
)
from .embedding import BookEmbedding, check_proposition1, validate_embedding
from .formats import (
    canonical_json,
    certificate_to_obj,
    serialize_constraints,
    serialize_graph_json,
)
from .gadgets import SHORT, build_q1, build_q2, build_quad
from .graph import Graph
from .satenc import CnfInstance, decode, emit_dimacs, encode, parse_model, verify_model
from .solver import Budget, Status, decide_k_pages, enumerate_models, pagenumber


class ScenarioFailure(AssertionError):
    pass


class UnknownScenario(KeyError):
    pass


Builder = Callable[[], tuple[Graph, ConstraintSet]]


@dataclass(frozen=True)
class Scenario:
    name: str
    gadget: str
    builder: Builder = field(repr=False, compare=False)
    expected: Status | None
    engine: str = "backtracking"  # or "export"
    budget: Budget = Budget(max_seconds=600)
    k: int = 3
    description: str = ""

    def instance(self) -> tuple[Graph, ConstraintSet]:
        return self.builder()

    def fingerprint(self) -> str:
        g, cs = self.instance()
        h = hashlib.sha256()
        h.update(f"{self.name}\nk={self.k}\n".encode())
        h.update(serialize_graph_json(g))
        h.update(serialize_constraints(cs))
        return h.hexdigest()


@dataclass
class Outcome:
    scenario: str
    verdict: Status | None
    expected: Status | None
    nodes_expanded: int
    exhausted: bool
    outcome: str  # pass | fail | inconclusive | exploratory | exported
    fingerprint: str
    witness: BookEmbedding | None = None
    wall_ms: int | None = None
    dimacs: str | None = None

    @property
    def exit_code(self) -> int:
        if self.outcome == "exported":
            return 0
        return {Status.SAT: 0, Status.UNSAT: 20, Status.UNKNOWN: 30, None: 30}[self.verdict]

    def to_obj(self, timing: bool = False) -> dict:
        obj = {
            "scenario": self.scenario,
            "verdict": None if self.verdict is None else self.verdict.value,
            "expected": None if self.expected is None else self.expected.value,
            "nodes_expanded": self.nodes_expanded,
            "exhausted": self.exhausted,
            "outcome": self.outcome,
            "fingerprint": self.fingerprint,
            "witness": None if self.witness is None else certificate_to_obj(self.witness),
        }
        if self.dimacs is not None:
            obj["dimacs"] = self.dimacs
        if timing and self.wall_ms is not None:
            obj["wall_ms"] = self.wall_ms
        return obj

    def to_bytes(self, timing: bool = False) -> bytes:
        return canonical_json(self.to_obj(timing))


# -- hypothesis builders ------------------------------------------------------


def _ids(g: Graph, prefix: str = "") -> dict[str, int]:
    return {short: g.role(prefix + role) for short, role in SHORT.items() if (prefix + role) in g.roles}


def lemma1_constraints(r: dict[str, int], centers: bool = True) -> list:
    """a, b in one arc between the terminals; centers inside (a, b); edges
    from 1 (resp. 2) to [a, b] on page 1 (resp. 2)."""
    ab = Arc(r["a"], r["b"], excluding=r["1"])
    cs = [OutsideClosedInterval(r["2"], ab)]
    if centers:
        cs += [InOpenInterval(r["c1"], ab), InOpenInterval(r["c2"], ab)]
    cs += [
        CondColorFrom(r["1"], Interval(ab, (True, True)), 1),
        CondColorFrom(r["2"], Interval(ab, (True, True)), 2),
    ]
    return cs


def uv_constraints(r: dict[str, int], inner: list[int], exits: bool = True) -> list:
    """Inner nodes in a marked sub-arc (u, v) of one terminal-to-terminal arc,
    edges from 1 / 2 into it on pages 1 / 2 and, optionally, every other edge
    leaving (u, v) on page 3."""
    uv = Arc("u", "v", excluding=r["1"])
    cs = [OutsideClosedInterval(r["2"], uv)]
    cs += [InOpenInterval(x, uv) for x in inner]
    cs += [CondColorFrom(r["1"], Interval(uv), 1), CondColorFrom(r["2"], Interval(uv), 2)]
    if exits:
        cs.append(ExitColored(uv, frozenset({r["1"], r["2"]}), 3))
    return cs


def _lemma1(variant: str, centers: bool = True) -> Builder:
    def build():
        g = build_q1(variant)
        return g, ConstraintSet(lemma1_constraints(_ids(g), centers))

    return build


def _lemma2(exits: bool = True, degenerate: bool = False) -> Builder:
    def build():
        g = build_q1("none")
        r = _ids(g)
        ab = Arc(r["a"], r["b"], excluding=r["1"])
        cs = uv_constraints(r, [r["a"], r["b"]], exits)
        cs += [OutsideClosedInterval(r["c1"], ab), OutsideClosedInterval(r["c2"], ab)]
        if degenerate:
            # nothing at all between the two markers
            uv = Arc("u", "v", excluding=r["1"])
            cs += [OutsideClosedInterval(x, uv) for x in range(g.n) if x not in (r["1"], r["2"])]
        return g, ConstraintSet(cs)

    return build


LEMMA3_CHECKS = ("both_centers_inside", "both_centers_outside", "c1_out_d1b_not_in_bv", "edge_c1c2_not_color3")


def lemma3_negation(check_name: str, r: dict[str, int]) -> list:
    ab = Arc(r["a"], r["b"], excluding=r["1"])
    if check_name == "both_centers_inside":
        return [InOpenInterval(r["c1"], ab), InOpenInterval(r["c2"], ab)]
    if check_name == "both_centers_outside":
        return [OutsideClosedInterval(r["c1"], ab), OutsideClosedInterval(r["c2"], ab)]
    if check_name == "c1_out_d1b_not_in_bv":
        ua = Arc("u", r["a"], excluding=r["1"])
        bv = Arc(r["b"], "v", excluding=r["1"])
        return [
            OutsideClosedInterval(r["b"], ua),  # layout u, a, b, v
            InOpenInterval(r["c1"], ua),
            OutsideClosedInterval(r["d1b"], bv),
        ]
    if check_name == "edge_c1c2_not_color3":
        return [EdgeColorNot((r["c1"], r["c2"]), 3)]
    raise UnknownScenario(check_name)


def _lemma3(check_name: str, depth: int) -> Builder:
    def build():
        g = build_q2(depth, "plus12")
        r = _ids(g)
        cs = uv_constraints(r, [r["a"], r["b"]]) + lemma3_negation(check_name, r)
        return g, ConstraintSet(cs)

    return build


def variant_quad_instance(copies: int, depth: int) -> tuple[Graph, ConstraintSet]:
    """Quad glued from the (a, b)-edge flavour of Q2 drawn entirely inside an
    arc (u, v) between the outer terminals, every edge at terminal 1 on page 1
    and every edge at terminal 2 on page 2."""
    g = build_quad(copies, depth, "none", "terminals_edge")
    r = {"1": g.role("outer_terminal_1"), "2": g.role("outer_terminal_2")}
    inner = [x for x in range(g.n) if x not in (r["1"], r["2"])]
    return g, ConstraintSet(uv_constraints(r, inner, exits=False))


# -- registry -----------------------------------------------------------------

_LONG = Budget(max_seconds=1800)
# frozen from tests/oracle.py: both relaxed controls and the smallest variant
# quad admit embeddings
ORACLE_VERDICTS = {
    "lemma1_control": Status.SAT,
    "lemma2_control": Status.SAT,
    "variant_quad_c1_d0": Status.SAT,
}


def _registry() -> dict[str, Scenario]:
    sc = [
        Scenario("lemma1_plus12", "q1+12", _lemma1("plus12"), Status.UNSAT,
                 description="Q1+12: a,b in (1,2), centers in (a,b), edges 1/2 to [a,b] on pages 1/2"),
        Scenario("lemma1_plusAB", "q1+ab", _lemma1("plusAB"), Status.UNSAT,
                 description="Q1+ab under the same hypotheses"),
        Scenario("lemma1_control", "q1+12", _lemma1("plus12", centers=False), ORACLE_VERDICTS["lemma1_control"],
                 description="Q1+12 with the center position hypothesis dropped"),
        Scenario("lemma2_outside", "q1", _lemma2(), Status.UNSAT, budget=_LONG,
                 description="Q1: a,b in (u,v), centers outside [a,b], exits of (u,v) on page 3"),
        Scenario("lemma2_control", "q1", _lemma2(exits=False), ORACLE_VERDICTS["lemma2_control"], budget=_LONG,
                 description="Q1 as lemma2_outside without the exit hypothesis"),
        Scenario("lemma2_degenerate", "q1", _lemma2(degenerate=True), Status.UNSAT,
                 description="markers adjacent: nothing fits in (u,v)"),
    ]
    for name in LEMMA3_CHECKS:
        sc.append(Scenario(f"lemma3_{name}", "q2+12", _lemma3(name, 2), Status.UNSAT, engine="export",
                           description=f"Q2+12 depth 2, uv hypotheses plus negated conclusion {name}"))
        sc.append(Scenario(f"lemma3_{name}_d0", "q2+12", _lemma3(name, 0), None, budget=Budget(max_seconds=300),
                           description=f"depth-0 exploratory run of {name}"))
    sc.append(Scenario("variant_quad_c1_d0", "quad(terminals_edge)", lambda: variant_quad_instance(1, 0),
                       ORACLE_VERDICTS["variant_quad_c1_d0"], description="positive control, 1 copy, depth 0"))
    sc.append(Scenario("variant_quad_c2_d0", "quad(terminals_edge)", lambda: variant_quad_instance(2, 0), None,
                       budget=Budget(max_seconds=300), description="2 copies, depth 0, exploratory"))
    return {s.name: s for s in sc}


SCENARIOS = _registry()


def get(name: str) -> Scenario:
    try:
        return SCENARIOS[name]
    except KeyError:
        raise UnknownScenario(f"unknown scenario {name!r}; known: {', '.join(sorted(SCENARIOS))}") from None


# -- running ------------------------------------------------------------------


def verify_witness(graph: Graph, cs: ConstraintSet, emb: BookEmbedding) -> None:
    bad = validate_embedding(graph, emb)
    if bad:
        raise ScenarioFailure(f"witness has same-page conflicts: {bad[:3]}")
    viol = check(graph, emb, cs)
    if viol:
        raise ScenarioFailure(f"witness violates constraints: {[str(v.constraint) for v in viol[:3]]}")


def _classify(verdict: Status, expected: Status | None) -> str:
    if verdict is Status.UNKNOWN:
        return "inconclusive"
    if expected is None:
        return "exploratory"
    return "pass" if verdict is expected else "fail"


def run(scenario: Scenario | str, budget: Budget | None = None, strict: bool = True) -> Outcome:
    """Solve a scenario with the backtracking engine.

    ``strict`` raises on an expectation mismatch; Unknown never raises and
    never passes.
    """
    sc = get(scenario) if isinstance(scenario, str) else scenario
    if sc.engine == "export":
        raise ValueError(f"{sc.name} is export-only; use export()")
    g, cs = sc.instance()
    t0 = time.monotonic()
    v = decide_k_pages(g, sc.k, cs, budget or sc.budget)
    wall = int(round((time.monotonic() - t0) * 1000))
    if v.witness is not None:
        verify_witness(g, cs, v.witness)
    out = Outcome(sc.name, v.status, sc.expected, v.nodes_expanded, v.exhausted,
                  _classify(v.status, sc.expected), sc.fingerprint(), v.witness, wall)
    if strict and out.outcome == "fail":
        raise ScenarioFailure(f"{sc.name}: expected {sc.expected.value}, got {v.status.value}")
    return out


def encode_scenario(scenario: Scenario | str) -> CnfInstance:
    sc = get(scenario) if isinstance(scenario, str) else scenario
    g, cs = sc.instance()
    return encode(g, sc.k, cs, cut=g.role("outer_terminal_1"))


def export(scenario: Scenario | str, outdir: str | Path) -> Outcome:
    """Write ``<name>.cnf`` (with its ``c map`` atom lines), the graph and the
    constraint list to ``outdir``."""
    sc = get(scenario) if isinstance(scenario, str) else scenario
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    g, cs = sc.instance()
    cnf = encode_scenario(sc)
    cnf_path = outdir / f"{sc.name}.cnf"
    cnf_path.write_bytes(emit_dimacs(cnf).encode())
    (outdir / f"{sc.name}.graph.json").write_bytes(serialize_graph_json(g))
    (outdir / f"{sc.name}.cons.json").write_bytes(serialize_constraints(cs))
    (outdir / f"{sc.name}.atoms.json").write_bytes(canonical_json(cnf.varmap))
    return Outcome(sc.name, None, sc.expected, 0, False, "exported", sc.fingerprint(), dimacs=cnf_path.name)


def check_external(scenario: Scenario | str, result_text: str) -> Outcome:
    """Record an external solver's answer: an ``s UNSATISFIABLE`` line, or a
    model (``v`` lines) that is decoded and verified."""
    sc = get(scenario) if isinstance(scenario, str) else scenario
    g, cs = sc.instance()
    cnf = encode_scenario(sc)
    if any(line.strip() == "s UNSATISFIABLE" for line in result_text.splitlines()):
        verdict, witness = Status.UNSAT, None
    else:
        model = parse_model(result_text)
        if not verify_model(cnf, model):
            raise ScenarioFailure("model does not satisfy the exported CNF")
        witness = decode(cnf, model, g, sc.k)
        verify_witness(g, cs, witness)
        verdict = Status.SAT
    return Outcome(sc.name, verdict, sc.expected, 0, verdict is Status.UNSAT,
                   _classify(verdict, sc.expected), sc.fingerprint(), witness)


def run_variant_quad(copies: int, depth: int, budget: Budget = Budget(max_seconds=600)) -> Outcome:
    name = f"variant_quad_c{copies}_d{depth}"
    sc = SCENARIOS.get(name) or Scenario(name, "quad(terminals_edge)", lambda: variant_quad_instance(copies, depth),
                                         None, budget=budget)
    return run(sc, budget)


# -- proof-internal facts -----------------------------------------------------


def lemma1_wlog_constraints(g: Graph) -> ConstraintSet:
    """Lemma-1 hypotheses on plain Q1 with the proof's normalisations fixed:
    going forward from a we meet c1, c2, b in that order, and (a, c2) is
    not on page 3."""
    r = _ids(g)
    extra = [Before(r["c1"], r["c2"], r["a"]), Before(r["c2"], r["b"], r["a"]), EdgeColorNot((r["a"], r["c2"]), 3)]
    return ConstraintSet(lemma1_constraints(r) + extra)


def lemma1_subclaims(budget: Budget = Budget(max_seconds=600), cap: int = 200_000) -> dict:
    """Enumerate every normalised embedding of Q1 and collect the facts the
    proof relies on."""
    g = build_q1("none")
    r = _ids(g)
    cs = lemma1_wlog_constraints(g)
    en = enumerate_models(g, 3, cs, budget, cap=cap)
    ab = (r["a"], r["b"])

    def inside(emb, x):
        p = emb.layout.pos
        lo, hi = sorted((p[ab[0]], p[ab[1]]))
        return (lo < p[x] < hi) != (lo < p[r["1"]] < hi)

    pg = lambda emb, x, y: emb.page(r[x], r[y])  # noqa: E731
    return {
        "complete": en.complete,
        "models": len(en.models),
        "a_c2_pages": sorted({pg(m, "a", "c2") for m in en.models}),
        "b_c1_pages": sorted({pg(m, "b", "c1") for m in en.models}),
        "d1b_inside_ab": sorted({inside(m, r["d1b"]) for m in en.models}),
        "d2a_inside_ab": sorted({inside(m, r["d2a"]) for m in en.models}),
        "c1_d1b_pages": sorted({pg(m, "c1", "d1b") for m in en.models}),
        "c2_d2a_pages": sorted({pg(m, "c2", "d2a") for m in en.models}),
    }


# -- closure-rule suite -------------------------------------------------------


def random_connected_graph(rng: random.Random, n: int, p: float) -> Graph:
    """Random spanning tree plus independent extra edges with probability ``p``."""
    g = Graph(n)
    perm = list(range(n))
    rng.shuffle(perm)
    for i in range(1, n):
        g.add_edge(perm[i], perm[rng.randrange(i)])
    for u in range(n):
        for v in range(u + 1, n):
            if not g.has_edge(u, v) and rng.random() < p:
                g.add_edge(u, v)
    return g


@dataclass
class Prop1Report:
    graphs: int
    violations: list[str]
    negative_control_detected: bool | None


def corrupt(graph: Graph, emb: BookEmbedding) -> BookEmbedding | None:
    """Move one edge onto the page of an edge it conflicts with."""
    from .embedding import conflicts

    edges = graph.edges()
    for i, e1 in enumerate(edges):
        for e2 in edges[i + 1:]:
            if emb.pages[e1] != emb.pages[e2] and conflicts(e1, e2, emb.layout):
                pages = dict(emb.pages)
                pages[e2] = pages[e1]
                return emb.with_pages(pages)
    return None


def run_prop1_suite(sample_size: int = 100, seed: int = 0, max_n: int = 9) -> Prop1Report:
    rng = random.Random(seed)
    violations: list[str] = []
    detected = None
    for i in range(sample_size):
        n = rng.randint(4, max_n)
        g = random_connected_graph(rng, n, rng.uniform(0.1, 0.5))
        res = pagenumber(g)
        emb = res.witness
        if emb is None:
            raise ScenarioFailure(f"graph #{i}: no embedding found")
        violations += [f"graph #{i}: {msg}" for msg in check_proposition1(g, emb)]
        if detected is None:
            bad = corrupt(g, emb)
            if bad is not None:
                detected = bool(check_proposition1(g, bad))
    return Prop1Report(sample_size, violations, detected)
