"""Exact backtracking search for constrained k-page book embeddings.

Items (nodes, then markers) are inserted one at a time into a growing circular
order. Inserting never changes the relative cyclic order of items already
placed, so every crossing and every constraint atom is decided for good once
its items are on the circle: we color each edge as soon as both ends are
placed and evaluate each atom at the moment its last item (or edge) arrives.

Symmetry reductions:

* rotation is implicit in circular insertion;
* reflection: the third item gets only one of its two gaps (skipped when the
  constraints are orientation dependent);
* page names: a new edge may only open page ``max_used + 1`` (skipped when any
  constraint mentions a page, and when enumerating models).
"""

from __future__ import annotations

import enum
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field

from .constraints import Atom, ConstraintSet, check, compile_atoms
from .embedding import BookEmbedding, canonical_key, canonicalize, validate_embedding
from .graph import Graph, edge_key


class Status(str, enum.Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class Budget:
    max_nodes: int | None = None
    max_seconds: float | None = None
    threads: int = 1

    def __post_init__(self) -> None:
        if self.max_nodes is not None and self.max_nodes <= 0:
            raise ValueError("max_nodes must be positive")
        if self.max_seconds is not None and self.max_seconds <= 0:
            raise ValueError("max_seconds must be positive")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")


UNLIMITED = Budget()


@dataclass
class Verdict:
    status: Status
    witness: BookEmbedding | None = None
    nodes_expanded: int = 0
    exhausted: bool = False
    elapsed: float = 0.0

    @property
    def sat(self) -> bool:
        return self.status is Status.SAT

    @property
    def unsat(self) -> bool:
        return self.status is Status.UNSAT


@dataclass
class SearchOptions:
    propagate: bool = True
    symmetry: bool = True
    prop1_pruning: bool = False


class _Stop(Exception):
    pass


class _OutOfBudget(Exception):
    pass


@dataclass
class _Stats:
    expanded: int = 0
    leaves: int = 0


def marker_positions_from_circle(circle: list[int], n: int, markers: list[str]) -> tuple[list[int], dict[str, float]]:
    """Split a mixed circular sequence into a node order and marker cut positions."""
    nodes = [it for it in circle if it < n]
    if not markers:
        return nodes, {}
    first = next(i for i, it in enumerate(circle) if it < n)
    seq = circle[first:] + circle[:first]
    gaps: dict[int, list[int]] = {}
    slot = -1
    for it in seq:
        if it < n:
            slot += 1
        else:
            gaps.setdefault(slot, []).append(it)
    out = {}
    for slot, ms in gaps.items():
        for j, it in enumerate(ms):
            out[markers[it - n]] = slot + (j + 1) / (len(ms) + 1)
    return nodes, out


class Search:
    def __init__(
        self,
        graph: Graph,
        k: int,
        cs: ConstraintSet | None = None,
        budget: Budget = UNLIMITED,
        options: SearchOptions | None = None,
        enumerate_cap: int | None = None,
    ) -> None:
        if k < 0:
            raise ValueError("k must be >= 0")
        self.graph = graph
        self.k = k
        self.cs = cs or ConstraintSet()
        self.cs.validate(graph, k)
        self.budget = budget
        self.opt = options or SearchOptions()
        self.enumerate_cap = enumerate_cap
        self.n = graph.n
        self.markers = self.cs.markers()
        self.total = self.n + len(self.markers)
        self.atoms: list[Atom] = compile_atoms(graph, self.cs, self.markers)

        self.nbrs = [sorted(graph.neighbors(v)) for v in range(self.n)] + [[] for _ in self.markers]
        self.by_item: list[list[Atom]] = [[] for _ in range(self.total)]
        self.by_edge: dict[tuple[int, int], list[Atom]] = {}
        self.root_atoms: list[Atom] = []
        co: list[set[int]] = [set() for _ in range(self.total)]
        for atom in self.atoms:
            if atom.edge is not None:
                self.by_edge.setdefault(atom.edge, []).append(atom)
            elif not atom.items:
                self.root_atoms.append(atom)
            for it in atom.items:
                if atom.edge is None:
                    self.by_item[it].append(atom)
                co[it] |= atom.items
        for it in range(self.total):
            co[it].discard(it)
            co[it] -= set(self.nbrs[it])
        self.co = [sorted(s) for s in co]

        self.break_reflection = self.opt.symmetry and not self.cs.orientation_dependent
        self._reflect = not self.cs.orientation_dependent
        self.break_colors = self.opt.symmetry and not self.cs.has_color_constraints and enumerate_cap is None

        self.circle: list[int] = []
        self.pos: list[float] = [0.0] * self.total
        self.placed = [False] * self.total
        self.colors: dict[tuple[int, int], int] = {}
        self.page_edges: list[list[tuple[int, int]]] = [[] for _ in range(k + 1)]
        self.max_used = 0
        self.stats = _Stats()
        self.models: dict[tuple, BookEmbedding] = {}
        self.witness: BookEmbedding | None = None
        self._t0 = 0.0
        self._deadline: float | None = None
        # parallel splitting
        self.path: list[int] = []
        self.prefix: list[int] | None = None
        self.collect_depth: int | None = None
        self.collected: list[list[int]] = []

    # -- bookkeeping --------------------------------------------------------

    def _tick(self) -> None:
        s = self.stats
        s.expanded += 1
        b = self.budget
        if b.max_nodes is not None and s.expanded > b.max_nodes:
            raise _OutOfBudget
        if self._deadline is not None and (s.expanded & 1023) == 0 and time.monotonic() > self._deadline:
            raise _OutOfBudget

    def _choice_allowed(self, value: int) -> bool:
        d = len(self.path)
        return self.prefix is None or d >= len(self.prefix) or self.prefix[d] == value

    def _atoms_ok(self, atoms: list[Atom]) -> bool:
        placed = self.placed
        for atom in atoms:
            if atom.edge is not None and atom.edge not in self.colors:
                continue
            if all(placed[i] for i in atom.items):
                if not atom.test(self.pos, len(self.circle), self.colors):
                    return False
        return True

    def _insert(self, v: int, g: int) -> None:
        circle = self.circle
        circle.insert(g, v)
        pos = self.pos
        for r in range(g, len(circle)):
            pos[circle[r]] = float(r)
        self.placed[v] = True

    def _remove(self, v: int, g: int) -> None:
        circle = self.circle
        del circle[g]
        pos = self.pos
        for r in range(g, len(circle)):
            pos[circle[r]] = float(r)
        self.placed[v] = False

    def _choose(self) -> int:
        placed = self.placed
        best, best_score = -1, None
        for it in range(self.total):
            if placed[it]:
                continue
            pn = sum(1 for w in self.nbrs[it] if placed[w])
            pc = sum(1 for w in self.co[it] if placed[w])
            score = (pn + pc, len(self.nbrs[it]) + len(self.co[it]))
            if best_score is None or score > best_score:
                best, best_score = it, score
        return best

    def _allowed(self, e: tuple[int, int]) -> list[int]:
        u, v = e
        pos = self.pos
        pu, pv = pos[u], pos[v]
        lo, hi = (pu, pv) if pu < pv else (pv, pu)
        out = []
        top = self.k
        if self.break_colors:
            top = min(top, self.max_used + 1)
        for c in range(1, top + 1):
            ok = True
            for x, y in self.page_edges[c]:
                if x == u or x == v or y == u or y == v:
                    continue
                if (lo < pos[x] < hi) != (lo < pos[y] < hi):
                    ok = False
                    break
            if ok:
                out.append(c)
        return out

    # -- search -------------------------------------------------------------

    def _place(self, count: int) -> None:
        if count == self.total:
            self._leaf()
            return
        if self.collect_depth is not None and len(self.path) >= self.collect_depth:
            self.collected.append(list(self.path))
            return
        v = self._choose()
        L = len(self.circle)
        gaps = range(1, L + 1) if L >= 1 else range(0, 1)
        if L == 2 and self.break_reflection:
            gaps = range(2, 3)
        for g in gaps:
            if not self._choice_allowed(g):
                continue
            self._tick()
            self._insert(v, g)
            self.path.append(g)
            if not self.opt.propagate or self._atoms_ok(self.by_item[v]):
                pending = [edge_key(v, w) for w in self.nbrs[v] if self.placed[w]]
                self._color(pending, count + 1)
            self.path.pop()
            self._remove(v, g)

    def _color(self, pending: list[tuple[int, int]], count: int) -> None:
        if not pending:
            if self.opt.prop1_pruning and not self._prop1_ok():
                return
            self._place(count)
            return
        # most-constrained edge first
        best_i, best_opts = 0, None
        for i, e in enumerate(pending):
            opts = self._allowed(e)
            if not opts:
                return
            if best_opts is None or len(opts) < len(best_opts):
                best_i, best_opts = i, opts
                if len(opts) == 1:
                    break
        e = pending[best_i]
        rest = pending[:best_i] + pending[best_i + 1 :]
        for c in best_opts:
            if not self._choice_allowed(c):
                continue
            self._tick()
            self.colors[e] = c
            self.page_edges[c].append(e)
            prev_max = self.max_used
            if c > self.max_used:
                self.max_used = c
            self.path.append(c)
            if not self.opt.propagate or self._atoms_ok(self.by_edge.get(e, ())):
                self._color(rest, count)
            self.path.pop()
            self.max_used = prev_max
            self.page_edges[c].pop()
            del self.colors[e]

    def _leaf(self) -> None:
        self.stats.leaves += 1
        if not self.opt.propagate:
            if not all(a.test(self.pos, len(self.circle), self.colors) for a in self.atoms):
                return
        order, mpos = marker_positions_from_circle(self.circle, self.n, self.markers)
        emb = canonicalize(BookEmbedding.from_order(order, dict(self.colors), self.k, mpos), self._reflect)
        if self.enumerate_cap is not None:
            key = canonical_key(emb, self._reflect)
            if key not in self.models:
                self.models[key] = emb
                if len(self.models) >= self.enumerate_cap:
                    raise _Stop
            return
        self._assert_witness(emb)
        self.witness = emb
        raise _Stop

    def _assert_witness(self, emb: BookEmbedding) -> None:
        bad = validate_embedding(self.graph, emb)
        if bad:
            raise AssertionError(f"solver produced an invalid witness: {bad[:3]}")
        viol = check(self.graph, emb, self.cs)
        if viol:
            raise AssertionError(f"solver witness violates constraints: {[str(v) for v in viol[:3]]}")

    def _prop1_ok(self) -> bool:
        """Closure rule: if placed nodes a, b are joined by colored paths of all
        k pages, every component of G minus those paths stays on one side."""
        k = self.k
        if k == 0:
            return True
        placed_nodes = [v for v in range(self.n) if self.placed[v]]
        adj_c: list[dict[int, list[int]]] = [dict() for _ in range(k + 1)]
        for (x, y), c in self.colors.items():
            adj_c[c].setdefault(x, []).append(y)
            adj_c[c].setdefault(y, []).append(x)
        comp_c = [_components(adj_c[c]) for c in range(k + 1)]
        pos = self.pos
        for i, a in enumerate(placed_nodes):
            for b in placed_nodes[i + 1 :]:
                if not all(comp_c[c].get(a) is not None and comp_c[c].get(a) == comp_c[c].get(b) for c in range(1, k + 1)):
                    continue
                on_paths: set[int] = set()
                for c in range(1, k + 1):
                    on_paths.update(_bfs_path(adj_c[c], a, b))
                lo, hi = sorted((pos[a], pos[b]))
                for comp in _graph_components(self.graph, on_paths):
                    sides = {lo < pos[w] < hi for w in comp if self.placed[w]}
                    if len(sides) > 1:
                        return False
        return True

    # -- drivers ------------------------------------------------------------

    def _root_ok(self) -> bool:
        return all(a.test(self.pos, 0, self.colors) for a in self.root_atoms)

    def run(self) -> Verdict:
        self._t0 = time.monotonic()
        if self.budget.max_seconds is not None:
            self._deadline = self._t0 + self.budget.max_seconds
        exhausted = False
        try:
            if self._root_ok() or not self.opt.propagate:
                self._place(0)
            exhausted = True
        except _Stop:
            pass
        except _OutOfBudget:
            pass
        elapsed = time.monotonic() - self._t0
        if self.witness is not None:
            return Verdict(Status.SAT, self.witness, self.stats.expanded, False, elapsed)
        if exhausted:
            return Verdict(Status.UNSAT, None, self.stats.expanded, True, elapsed)
        return Verdict(Status.UNKNOWN, None, self.stats.expanded, False, elapsed)

    def split(self, depth: int) -> list[list[int]]:
        self.collect_depth = depth
        try:
            if self._root_ok():
                self._place(0)
        except _Stop:
            pass
        self.collect_depth = None
        return self.collected


def _components(adj: dict[int, list[int]]) -> dict[int, int]:
    comp: dict[int, int] = {}
    for s in adj:
        if s in comp:
            continue
        comp[s] = s
        stack = [s]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in comp:
                    comp[w] = s
                    stack.append(w)
    return comp


def _bfs_path(adj: dict[int, list[int]], a: int, b: int) -> list[int]:
    prev = {a: a}
    frontier = [a]
    while frontier and b not in prev:
        nxt = []
        for u in frontier:
            for w in sorted(adj.get(u, ())):
                if w not in prev:
                    prev[w] = u
                    nxt.append(w)
        frontier = nxt
    path = [b]
    while path[-1] != a:
        path.append(prev[path[-1]])
    return path


def _graph_components(graph: Graph, removed: set[int]) -> list[list[int]]:
    seen = set(removed)
    out = []
    for s in range(graph.n):
        if s in seen:
            continue
        seen.add(s)
        comp, stack = [s], [s]
        while stack:
            u = stack.pop()
            for w in graph.neighbors(u):
                if w not in seen:
                    seen.add(w)
                    comp.append(w)
                    stack.append(w)
        out.append(comp)
    return out


# -- public API ---------------------------------------------------------------


def _run_prefix(args) -> Verdict:
    graph, k, cs, budget, options, prefix = args
    s = Search(graph, k, cs, Budget(budget.max_nodes, budget.max_seconds, 1), options)
    s.prefix = prefix
    return s.run()


def decide_k_pages(
    graph: Graph,
    k: int,
    cs: ConstraintSet | None = None,
    budget: Budget = UNLIMITED,
    options: SearchOptions | None = None,
) -> Verdict:
    """Decide whether ``graph`` has a k-page embedding satisfying ``cs``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if budget.threads == 1:
        return Search(graph, k, cs, budget, options).run()
    return _decide_parallel(graph, k, cs, budget, options)


def _decide_parallel(graph, k, cs, budget, options) -> Verdict:
    t0 = time.monotonic()
    splitter = Search(graph, k, cs, UNLIMITED, options)
    depth = 1
    prefixes = splitter.split(depth)
    while len(prefixes) < 4 * budget.threads and depth < 8:
        depth += 1
        splitter = Search(graph, k, cs, UNLIMITED, options)
        nxt = splitter.split(depth)
        if not nxt:
            break
        prefixes = nxt
    if splitter.witness is not None:
        return Verdict(Status.SAT, splitter.witness, splitter.stats.expanded, False, time.monotonic() - t0)
    expanded = splitter.stats.expanded
    all_done = True
    with ProcessPoolExecutor(max_workers=budget.threads) as pool:
        futs = [pool.submit(_run_prefix, (graph, k, cs, budget, options, p)) for p in prefixes]
        for fut in as_completed(futs):
            v = fut.result()
            expanded += v.nodes_expanded
            if v.sat:
                for f in futs:
                    f.cancel()
                return Verdict(Status.SAT, v.witness, expanded, False, time.monotonic() - t0)
            if not v.exhausted:
                all_done = False
    status = Status.UNSAT if all_done else Status.UNKNOWN
    return Verdict(status, None, expanded, all_done, time.monotonic() - t0)


def edge_density_lower_bound(n: int, m: int) -> int:
    """Smallest k with m <= (k + 1) n - 3k, the edge capacity of k pages."""
    if m == 0:
        return 0
    if n <= 3:
        return 1
    k = 1
    while m > (k + 1) * n - 3 * k:
        k += 1
    return k


@dataclass
class PagenumberResult:
    status: Status
    pagenumber: int | None
    witness: BookEmbedding | None
    verdicts: dict[int, Verdict] = field(default_factory=dict)


def pagenumber(graph: Graph, budget: Budget = UNLIMITED, options: SearchOptions | None = None) -> PagenumberResult:
    """Smallest k admitting an embedding; ``status`` UNKNOWN if a budget ran out."""
    if graph.n == 0:
        raise ValueError("graph must have at least one node")
    if graph.m == 0:
        emb = BookEmbedding.from_order(range(graph.n), {}, 0)
        return PagenumberResult(Status.SAT, 0, emb)
    verdicts = {}
    k = edge_density_lower_bound(graph.n, graph.m)
    while True:
        v = decide_k_pages(graph, k, None, budget, options)
        verdicts[k] = v
        if v.sat:
            return PagenumberResult(Status.SAT, k, v.witness, verdicts)
        if v.status is Status.UNKNOWN:
            return PagenumberResult(Status.UNKNOWN, None, None, verdicts)
        k += 1


@dataclass
class Enumeration:
    models: list[BookEmbedding]
    complete: bool
    nodes_expanded: int


def enumerate_models(
    graph: Graph,
    k: int,
    cs: ConstraintSet | None = None,
    budget: Budget = UNLIMITED,
    cap: int = 1000,
    options: SearchOptions | None = None,
) -> Enumeration:
    """Up to ``cap`` distinct canonical embeddings (order up to rotation and
    reflection; pages as assigned). ``complete`` iff the search finished."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    s = Search(graph, k, cs, Budget(budget.max_nodes, budget.max_seconds, 1), options, enumerate_cap=cap)
    s._t0 = time.monotonic()
    if budget.max_seconds is not None:
        s._deadline = s._t0 + budget.max_seconds
    complete = False
    try:
        if s._root_ok():
            s._place(0)
        complete = True
    except (_Stop, _OutOfBudget):
        pass
    models = [s.models[key] for key in sorted(s.models)]
    for m in models:
        s._assert_witness(m)
    return Enumeration(models, complete, s.stats.expanded)
