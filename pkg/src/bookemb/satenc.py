"""CNF encoding of constrained k-page book embedding, DIMACS I/O, decoding and
a small DPLL solver.

Variables
---------
``ord(x,y)`` for every item pair ``x < y`` (by item index; nodes first, then
markers) means *x precedes y* in the linear order obtained by cutting the
circle just before the ``cut`` node. ``page(u,v,c)`` means edge ``(u, v)`` is
on page ``c``. Auxiliary Tseitin atoms (``cyc(...)``, ``in(...)``, ``false``)
only appear when constraints are present.

Clause count of an unconstrained instance::

    2*C(n,3) + m*(1 + C(k,2)) + 8*k*I + (n - 1)

with ``I`` the number of vertex-disjoint edge pairs: two 3-cycle exclusions per
node triple, exactly-one page per edge, eight interleaving patterns per
disjoint pair and page, and one unit clause per node saying the cut comes
first.
"""

from __future__ import annotations

import re
import time
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Iterable, Sequence

from .constraints import (
    Arc,
    Before,
    CondColorFrom,
    ConstraintSet,
    EdgeColorIs,
    EdgeColorNot,
    ExitColored,
    InOpenInterval,
    Item,
    OutsideClosedInterval,
)
from .embedding import BookEmbedding
from .graph import Graph, edge_key
from .solver import Budget, Status, marker_positions_from_circle


class InvalidK(ValueError):
    pass


class MalformedModel(ValueError):
    pass


class DimacsError(ValueError):
    def __init__(self, msg: str, line: int, column: int = 1) -> None:
        super().__init__(f"line {line}, column {column}: {msg}")
        self.line = line
        self.column = column


@dataclass
class CnfInstance:
    num_vars: int
    clauses: list[tuple[int, ...]]
    varmap: dict[str, int] = field(default_factory=dict)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CnfInstance):
            return NotImplemented
        return self.num_vars == other.num_vars and self.clauses == other.clauses and self.varmap == other.varmap


def _label(i: int, n: int, markers: Sequence[str]) -> str:
    return str(i) if i < n else "@" + markers[i - n]


def ord_atom(x: str, y: str) -> str:
    return f"ord({x},{y})"


def page_atom(u: int, v: int, c: int) -> str:
    return f"page({u},{v},{c})"


def unconstrained_clause_count(graph: Graph, k: int) -> int:
    n, m = graph.n, graph.m
    return 2 * comb(n, 3) + m * (1 + comb(k, 2)) + 8 * k * independent_pairs(graph) + max(n - 1, 0)


def independent_pairs(graph: Graph) -> int:
    edges = graph.edges()
    return sum(1 for (a, b), (c, d) in combinations(edges, 2) if len({a, b, c, d}) == 4)


class _Encoder:
    def __init__(self, graph: Graph, k: int, cs: ConstraintSet, cut: int) -> None:
        self.graph = graph
        self.k = k
        self.cs = cs
        self.markers = cs.markers()
        self.n = graph.n
        self.N = self.n + len(self.markers)
        self.labels = [_label(i, self.n, self.markers) for i in range(self.N)]
        self.midx = {name: self.n + j for j, name in enumerate(self.markers)}
        self.cut = cut
        self.varmap: dict[str, int] = {}
        self.clauses: list[tuple[int, ...]] = []
        self.edges = graph.edges()
        self._cyc: dict[tuple[int, int, int], int] = {}
        self._false: int | None = None

    def var(self, atom: str) -> int:
        v = self.varmap.get(atom)
        if v is None:
            v = len(self.varmap) + 1
            self.varmap[atom] = v
        return v

    def idx(self, it: Item) -> int:
        return self.midx[it] if isinstance(it, str) else int(it)

    def before(self, i: int, j: int) -> int:
        """Literal for item i preceding item j."""
        if i < j:
            return self.varmap[ord_atom(self.labels[i], self.labels[j])]
        return -self.varmap[ord_atom(self.labels[j], self.labels[i])]

    def page(self, e: tuple[int, int], c: int) -> int:
        return self.varmap[page_atom(e[0], e[1], c)]

    def add(self, *lits: int) -> None:
        self.clauses.append(tuple(lits))

    def false_lit(self) -> int:
        if self._false is None:
            self._false = self.var("false")
            self.add(-self._false)
        return self._false

    def contradiction(self) -> None:
        f = self.false_lit()
        self.add(f)

    # -- structural clauses -------------------------------------------------

    def base(self) -> None:
        N, k = self.N, self.k
        for i in range(N):
            for j in range(i + 1, N):
                self.var(ord_atom(self.labels[i], self.labels[j]))
        for u, v in self.edges:
            for c in range(1, k + 1):
                self.var(page_atom(u, v, c))
        for i, j, l in combinations(range(N), 3):
            a, b, c = self.before(i, j), self.before(j, l), self.before(i, l)
            self.add(-a, -b, c)
            self.add(a, b, -c)
        for e in self.edges:
            self.add(*(self.page(e, c) for c in range(1, k + 1)))
            for c1, c2 in combinations(range(1, k + 1), 2):
                self.add(-self.page(e, c1), -self.page(e, c2))
        for e1, e2 in combinations(self.edges, 2):
            a, b = e1
            c, d = e2
            if len({a, b, c, d}) < 4:
                continue
            patterns = []
            for first, second in ((e1, e2), (e2, e1)):
                for x1, x2 in (first, first[::-1]):
                    for y1, y2 in (second, second[::-1]):
                        patterns.append((self.before(x1, y1), self.before(y1, x2), self.before(x2, y2)))
            for col in range(1, k + 1):
                p1, p2 = self.page(e1, col), self.page(e2, col)
                for l1, l2, l3 in patterns:
                    self.add(-l1, -l2, -l3, -p1, -p2)
        for v in range(self.N):
            if v != self.cut:
                self.add(self.before(self.cut, v))

    # -- Tseitin helpers ----------------------------------------------------

    def cyc(self, p: int, q: int, r: int) -> int:
        """Literal: p, q, r appear in this cyclic (forward) order."""
        trip = (p, q, r)
        m = trip.index(min(trip))
        rot = trip[m:] + trip[:m]
        sign = 1
        if rot[1] > rot[2]:
            rot = (rot[0], rot[2], rot[1])
            sign = -1
        if rot not in self._cyc:
            a, b, c = rot
            t = self.var(f"cyc({self.labels[a]},{self.labels[b]},{self.labels[c]})")
            x, y, z = self.before(a, b), self.before(b, c), self.before(c, a)
            # t <-> majority(x, y, z)
            self.add(-x, -y, t)
            self.add(-y, -z, t)
            self.add(-z, -x, t)
            self.add(x, y, -t)
            self.add(y, z, -t)
            self.add(z, x, -t)
            self._cyc[rot] = t
        return sign * self._cyc[rot]

    def xor(self, l1: int, l2: int, name: str) -> int:
        t = self.var(name)
        self.add(-t, l1, l2)
        self.add(-t, -l1, -l2)
        self.add(t, -l1, l2)
        self.add(t, l1, -l2)
        return t

    def member(self, x: int, arc: Arc, closed: tuple[bool, bool]):
        """bool when decided statically, else a literal for x in the arc."""
        a, b = self.idx(arc.a), self.idx(arc.b)
        e = None if arc.excluding is None else self.idx(arc.excluding)
        if x == a:
            return closed[0]
        if x == b:
            return closed[1]
        if x == e:
            return False
        if e is None:
            return self.cyc(a, x, b)
        name = f"in({self.labels[x]};{self.labels[a]},{self.labels[b]};!{self.labels[e]})"
        if name in self.varmap:
            return self.varmap[name]
        return self.xor(self.cyc(a, x, b), self.cyc(a, e, b), name)

    def require(self, lit, value: bool) -> None:
        if isinstance(lit, bool):
            if lit != value:
                self.contradiction()
            return
        self.add(lit if value else -lit)

    # -- constraints --------------------------------------------------------

    def constraint(self, c) -> None:
        if isinstance(c, Before):
            x, y, an = self.idx(c.x), self.idx(c.y), self.idx(c.anchor)
            if x == y or y == an:
                self.contradiction()
            elif x != an:
                self.add(self.cyc(an, x, y))
        elif isinstance(c, InOpenInterval):
            self.require(self.member(self.idx(c.x), c.arc, (False, False)), True)
        elif isinstance(c, OutsideClosedInterval):
            self.require(self.member(self.idx(c.x), c.arc, (True, True)), False)
        elif isinstance(c, EdgeColorIs):
            self.add(self.page(edge_key(*c.edge), c.color))
        elif isinstance(c, EdgeColorNot):
            self.add(-self.page(edge_key(*c.edge), c.color))
        elif isinstance(c, CondColorFrom):
            s = self.idx(c.source)
            for x in sorted(self.graph.neighbors(s)):
                p = self.page(edge_key(s, x), c.color)
                m = self.member(x, c.interval.arc, c.interval.closed)
                if m is True:
                    self.add(p)
                elif m is not False:
                    self.add(-m, p)
        elif isinstance(c, ExitColored):
            exempt = {self.idx(v) for v in c.exempt}
            ends = {self.idx(c.arc.a), self.idx(c.arc.b)}
            for x, y in self.edges:
                if x in exempt or y in exempt:
                    continue
                p = self.page((x, y), c.color)
                mx = self.member(x, c.arc, (False, False))
                my = self.member(y, c.arc, (False, False))
                for inside, other, mo in ((mx, y, my), (my, x, mx)):
                    if inside is False or other in ends:
                        continue
                    if mo is True:
                        continue
                    clause = [] if inside is True else [-inside]
                    if mo is not False:
                        clause.append(mo)
                    clause.append(p)
                    self.add(*clause)
        else:
            raise TypeError(f"unsupported constraint {c!r}")


def encode(graph: Graph, k: int, cs: ConstraintSet | None = None, cut: int = 0) -> CnfInstance:
    """CNF satisfiable iff a k-page embedding satisfying ``cs`` exists (with
    node ``cut`` first in the linearization, which loses no generality)."""
    if k < 1:
        raise InvalidK(f"k must be >= 1, got {k}")
    cs = cs or ConstraintSet()
    cs.validate(graph, k)
    if not (0 <= cut < graph.n):
        raise ValueError(f"cut node {cut} not in graph")
    enc = _Encoder(graph, k, cs, cut)
    enc.base()
    for c in cs:
        enc.constraint(c)
    return CnfInstance(len(enc.varmap), enc.clauses, enc.varmap)


# -- DIMACS -------------------------------------------------------------------


def emit_dimacs(cnf: CnfInstance) -> str:
    lines = [f"c map {atom} {idx}" for atom, idx in sorted(cnf.varmap.items(), key=lambda kv: kv[1])]
    lines.append(f"p cnf {cnf.num_vars} {len(cnf.clauses)}")
    lines.extend(" ".join(map(str, cl)) + " 0" for cl in cnf.clauses)
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> CnfInstance:
    varmap: dict[str, int] = {}
    header: tuple[int, int] | None = None
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    last = 1
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line:
            continue
        last = lineno
        if line.startswith("c"):
            parts = line.split()
            if len(parts) >= 2 and parts[1] == "map":
                if len(parts) != 4 or not parts[3].isdigit():
                    raise DimacsError("malformed map line", lineno)
                if parts[2] in varmap:
                    raise DimacsError(f"duplicate atom {parts[2]!r}", lineno)
                varmap[parts[2]] = int(parts[3])
            continue
        if line.startswith("p"):
            parts = line.split()
            if header is not None:
                raise DimacsError("second header", lineno)
            if len(parts) != 4 or parts[1] != "cnf" or not (parts[2].isdigit() and parts[3].isdigit()):
                raise DimacsError("malformed header, expected 'p cnf <vars> <clauses>'", lineno)
            header = (int(parts[2]), int(parts[3]))
            continue
        if header is None:
            raise DimacsError("clause before header", lineno)
        col = 1
        for tok in raw.split(" "):
            if tok == "":
                col += 1
                continue
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"bad literal {tok!r}", lineno, col) from None
            if abs(lit) > header[0]:
                raise DimacsError(f"literal {lit} exceeds variable count {header[0]}", lineno, col)
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            else:
                current.append(lit)
            col += len(tok) + 1
    if header is None:
        raise DimacsError("missing header", 1)
    if current:
        raise DimacsError("unterminated final clause", last)
    if len(clauses) != header[1]:
        raise DimacsError(f"header announces {header[1]} clauses, found {len(clauses)}", last)
    if varmap and sorted(varmap.values()) != list(range(1, header[0] + 1)):
        raise DimacsError("atom map does not cover variables 1..n exactly", 1)
    return CnfInstance(header[0], clauses, varmap)


def parse_model(text: str) -> list[int]:
    """Signed literals; accepts plain integers or SAT-competition ``v`` lines."""
    lits = []
    for line in text.splitlines():
        s = line.strip()
        if not s or s.startswith("c") or s.startswith("s"):
            continue
        if s.startswith("v"):
            s = s[1:]
        for tok in s.split():
            x = int(tok)
            if x != 0:
                lits.append(x)
    return lits


def emit_model(model: Iterable[int]) -> str:
    return "v " + " ".join(map(str, model)) + " 0\n"


# -- decoding -----------------------------------------------------------------

_ORD = re.compile(r"^ord\(([^,]+),([^,]+)\)$")


def decode(cnf: CnfInstance, model: Iterable[int], graph: Graph, k: int) -> BookEmbedding:
    """Rebuild the embedding (and marker positions) from a satisfying model."""
    value: dict[int, bool] = {}
    for lit in model:
        value[abs(lit)] = lit > 0
    missing = [v for v in range(1, cnf.num_vars + 1) if v not in value]
    if missing:
        raise MalformedModel(f"model leaves {len(missing)} variables unassigned (first {missing[0]})")
    markers = sorted({lab[1:] for atom in cnf.varmap for lab in _ord_labels(atom) if lab.startswith("@")})
    n = graph.n
    labels = [str(i) for i in range(n)] + ["@" + m for m in markers]
    N = len(labels)
    before = [[False] * N for _ in range(N)]
    for i in range(N):
        for j in range(i + 1, N):
            atom = ord_atom(labels[i], labels[j])
            if atom not in cnf.varmap:
                raise MalformedModel(f"atom {atom} missing from variable map")
            t = value[cnf.varmap[atom]]
            before[i][j] = t
            before[j][i] = not t
    rank = sorted(range(N), key=lambda i: sum(before[j][i] for j in range(N)))
    for a in range(N):
        for b in range(a + 1, N):
            if not before[rank[a]][rank[b]]:
                raise MalformedModel("order variables are not transitive")
    pages = {}
    for u, v in graph.edges():
        on = [c for c in range(1, k + 1) if value[cnf.varmap[page_atom(u, v, c)]]]
        if len(on) != 1:
            raise MalformedModel(f"edge ({u},{v}) has {len(on)} pages set")
        pages[(u, v)] = on[0]
    order, mpos = marker_positions_from_circle(rank, n, markers)
    return BookEmbedding.from_order(order, pages, k, mpos)


def _ord_labels(atom: str) -> tuple[str, ...]:
    m = _ORD.match(atom)
    return m.groups() if m else ()


# -- DPLL ---------------------------------------------------------------------


@dataclass
class SatResult:
    status: Status
    model: list[int] | None = None
    decisions: int = 0

    @property
    def sat(self) -> bool:
        return self.status is Status.SAT


def dpll_solve(cnf: CnfInstance, budget: Budget | None = None) -> SatResult:
    """Complete DPLL with two-watched-literal unit propagation and
    chronological backtracking. ``budget.max_nodes`` caps decisions."""
    nv = cnf.num_vars
    max_dec = budget.max_nodes if budget else None
    deadline = time.monotonic() + budget.max_seconds if budget and budget.max_seconds else None
    val = [0] * (nv + 1)  # 0 unassigned, 1 true, -1 false
    clauses: list[list[int]] = []
    units: list[int] = []
    for cl in cnf.clauses:
        s = set(cl)
        if any(-l in s for l in s):
            continue
        lits = sorted(s, key=lambda l: (abs(l), l))
        if not lits:
            return SatResult(Status.UNSAT)
        if len(lits) == 1:
            units.append(lits[0])
        else:
            clauses.append(lits)
    watches: dict[int, list[int]] = {}
    occ = [0] * (nv + 1)
    for ci, cl in enumerate(clauses):
        watches.setdefault(cl[0], []).append(ci)
        watches.setdefault(cl[1], []).append(ci)
        for l in cl:
            occ[abs(l)] += 1
    # branch on order atoms first: once the linear order is fixed, the page
    # clauses reduce to a colouring problem that propagates well
    is_ord = [False] * (nv + 1)
    for atom, v in cnf.varmap.items():
        if atom.startswith("ord(") and v <= nv:
            is_ord[v] = True
    var_order = sorted(range(1, nv + 1), key=lambda v: (not is_ord[v], -occ[v], v))

    trail: list[int] = []

    def assign(lit: int) -> bool:
        v = abs(lit)
        want = 1 if lit > 0 else -1
        if val[v] == 0:
            val[v] = want
            trail.append(lit)
            return True
        return val[v] == want

    def lit_val(l: int) -> int:
        x = val[abs(l)]
        return x if l > 0 else -x

    def propagate(start: int) -> bool:
        i = start
        while i < len(trail):
            lit = trail[i]
            i += 1
            false_lit = -lit
            wl = watches.get(false_lit)
            if not wl:
                continue
            keep = []
            j = 0
            conflict = False
            while j < len(wl):
                ci = wl[j]
                j += 1
                cl = clauses[ci]
                if cl[0] == false_lit:
                    cl[0], cl[1] = cl[1], cl[0]
                if lit_val(cl[0]) == 1:
                    keep.append(ci)
                    continue
                for t in range(2, len(cl)):
                    if lit_val(cl[t]) != -1:
                        cl[1], cl[t] = cl[t], cl[1]
                        watches.setdefault(cl[1], []).append(ci)
                        break
                else:
                    keep.append(ci)
                    if not assign(cl[0]):
                        conflict = True
                        keep.extend(wl[j:])
                        break
            watches[false_lit] = keep
            if conflict:
                return False
        return True

    for u in units:
        if not assign(u):
            return SatResult(Status.UNSAT)
    if not propagate(0):
        return SatResult(Status.UNSAT)

    # stack of (trail length before decision, decision literal, flipped?)
    stack: list[tuple[int, int, bool]] = []
    decisions = 0
    cursor = 0
    while True:
        while cursor < nv and val[var_order[cursor]] != 0:
            cursor += 1
        if cursor == nv:
            model = [v if val[v] == 1 else -v for v in range(1, nv + 1)]
            return SatResult(Status.SAT, model, decisions)
        decisions += 1
        if max_dec is not None and decisions > max_dec:
            return SatResult(Status.UNKNOWN, None, decisions)
        if deadline is not None and (decisions & 255) == 0 and time.monotonic() > deadline:
            return SatResult(Status.UNKNOWN, None, decisions)
        v = var_order[cursor]
        mark = len(trail)
        stack.append((mark, v, False))
        assign(v)
        ok = propagate(mark)
        while not ok:
            # chronological backtracking: flip the latest unflipped decision
            while stack and stack[-1][2]:
                mark, _, _ = stack.pop()
                _undo(trail, val, mark)
            if not stack:
                return SatResult(Status.UNSAT, None, decisions)
            mark, lit, _ = stack.pop()
            _undo(trail, val, mark)
            stack.append((mark, -lit, True))
            assign(-lit)
            ok = propagate(mark)
        cursor = 0


def _undo(trail: list[int], val: list[int], mark: int) -> None:
    while len(trail) > mark:
        val[abs(trail.pop())] = 0


def verify_model(cnf: CnfInstance, model: Sequence[int]) -> bool:
    truth = {abs(l): l > 0 for l in model}
    return all(any(truth.get(abs(l)) == (l > 0) for l in cl) for cl in cnf.clauses)
