"""Book embeddings: circular layouts, page assignments and the crossing rules.

A layout is a circular order of all nodes; ``order[0]`` is just a cut point
and carries no meaning of its own. Markers (virtual interval boundaries) may
be attached to an embedding as real-valued positions: node ``order[i]`` sits
at ``i`` and a marker at ``i + 0.5`` sits between ``order[i]`` and
``order[i + 1]`` (positions in ``(n - 1, n)`` lie between the last and first
node).
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .graph import Graph, edge_key

Edge = tuple[int, int]


class ShapeMismatch(ValueError):
    """The embedding does not cover exactly the graph's nodes and edges."""


@dataclass(frozen=True)
class Layout:
    order: tuple[int, ...]
    pos: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        order = tuple(int(v) for v in self.order)
        n = len(order)
        pos = [-1] * n
        for i, v in enumerate(order):
            if not (0 <= v < n) or pos[v] != -1:
                raise ShapeMismatch(f"order is not a permutation of 0..{n - 1}")
            pos[v] = i
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "pos", tuple(pos))

    @property
    def n(self) -> int:
        return len(self.order)

    def position(self, v: int) -> int:
        return self.pos[v]


@dataclass(frozen=True)
class BookEmbedding:
    layout: Layout
    pages: Mapping[Edge, int]
    k: int
    markers: Mapping[str, float] = field(default_factory=dict)

    @classmethod
    def from_order(
        cls,
        order: Sequence[int],
        pages: Mapping[Edge, int],
        k: int,
        markers: Mapping[str, float] | None = None,
    ) -> BookEmbedding:
        norm = dict(sorted((edge_key(u, v), int(c)) for (u, v), c in pages.items()))
        return cls(Layout(tuple(order)), norm, k, dict(markers or {}))

    @property
    def order(self) -> tuple[int, ...]:
        return self.layout.order

    def page(self, u: int, v: int) -> int:
        return self.pages[edge_key(u, v)]

    def with_pages(self, pages: Mapping[Edge, int]) -> BookEmbedding:
        return BookEmbedding.from_order(self.order, pages, self.k, self.markers)


# -- arc geometry -------------------------------------------------------------


def _between(p: float, pa: float, pb: float) -> bool:
    return (pa < p < pb) if pa < pb else (pb < p < pa)


def in_arc(p: float, pa: float, pb: float, length: float, pe: float | None = None) -> bool:
    """Is position ``p`` strictly inside the circular arc from ``pa`` to ``pb``?

    With ``pe`` given the arc is the one between ``pa`` and ``pb`` that does not
    contain ``pe``; otherwise it is the arc traversed going forward (increasing
    positions, wrapping at ``length``) from ``pa`` to ``pb``.
    """
    if p == pa or p == pb:
        return False
    if pe is not None:
        return _between(p, pa, pb) != _between(pe, pa, pb)
    return (p - pa) % length < (pb - pa) % length


def conflicts(e1: Edge, e2: Edge, layout: Layout) -> bool:
    """True iff the endpoints of the two edges are distinct and interleave."""
    a, b = e1
    c, d = e2
    if a == c or a == d or b == c or b == d:
        return False
    pos = layout.pos
    pa, pb = pos[a], pos[b]
    if pa > pb:
        pa, pb = pb, pa
    return (pa < pos[c] < pb) != (pa < pos[d] < pb)


def exits_interval(
    edge: Edge, a: int, b: int, layout: Layout, excluding: int | None = None
) -> bool:
    """Does ``edge`` have one end strictly inside arc ``(a, b)`` and the other
    strictly outside the closed arc ``[a, b]``?

    The arc is designated as in :func:`in_arc`: the one avoiding ``excluding``
    when given, else the forward arc from ``a`` to ``b``.
    """
    if a == b:
        raise ValueError("interval endpoints must differ")
    pos = layout.pos
    pe = None if excluding is None else pos[excluding]
    x, y = edge
    ins = [in_arc(pos[w], pos[a], pos[b], layout.n, pe) for w in (x, y)]
    outs = [not ins[i] and w not in (a, b) for i, w in enumerate((x, y))]
    return (ins[0] and outs[1]) or (ins[1] and outs[0])


def _exits_either_arc(x: int, y: int, a: int, b: int, pos: Sequence[int]) -> bool:
    # both arcs of (a, b) give the same answer on a circle
    if x in (a, b) or y in (a, b):
        return False
    return _between(pos[x], pos[a], pos[b]) != _between(pos[y], pos[a], pos[b])


# -- validation ---------------------------------------------------------------


def check_shape(graph: Graph, emb: BookEmbedding) -> None:
    if emb.layout.n != graph.n:
        raise ShapeMismatch(f"layout has {emb.layout.n} nodes, graph has {graph.n}")
    edges = set(graph.edges())
    keys = set(emb.pages)
    if keys != edges:
        missing = sorted(edges - keys)
        extra = sorted(keys - edges)
        raise ShapeMismatch(f"page assignment mismatch: missing={missing[:5]} extra={extra[:5]}")
    for e, c in emb.pages.items():
        if not (1 <= c <= emb.k):
            raise ShapeMismatch(f"edge {e} has page {c} outside 1..{emb.k}")


def validate_embedding(graph: Graph, emb: BookEmbedding) -> list[tuple[Edge, Edge]]:
    """Return every pair of same-page conflicting edges (empty iff valid)."""
    check_shape(graph, emb)
    pos = np.asarray(emb.layout.pos, dtype=np.int64)
    bad: list[tuple[Edge, Edge]] = []
    by_page: dict[int, list[Edge]] = {}
    for e in sorted(emb.pages):
        by_page.setdefault(emb.pages[e], []).append(e)
    for page in sorted(by_page):
        es = by_page[page]
        if len(es) < 2:
            continue
        arr = np.array(es, dtype=np.int64)
        p = pos[arr]
        lo, hi = p.min(axis=1), p.max(axis=1)
        # e_i, e_j cross iff lo_i < lo_j < hi_i < hi_j (or the mirror)
        cross = (lo[:, None] < lo[None, :]) & (lo[None, :] < hi[:, None]) & (hi[:, None] < hi[None, :])
        for i, j in zip(*np.nonzero(cross)):
            e1, e2 = es[int(i)], es[int(j)]
            bad.append((e1, e2) if e1 < e2 else (e2, e1))
    bad.sort()
    return bad


def is_valid(graph: Graph, emb: BookEmbedding) -> bool:
    return not validate_embedding(graph, emb)


def canonicalize(emb: BookEmbedding, reflect: bool = True) -> BookEmbedding:
    """Rotate node 0 to the front and (with ``reflect``) mirror so the second
    node is the smaller of its two circular neighbours. Pages are untouched.
    Pass ``reflect=False`` when orientation carries meaning."""
    order = list(emb.order)
    n = len(order)
    if n == 0:
        return emb
    r = emb.layout.pos[0]
    order = order[r:] + order[:r]
    markers = {name: (p - r) % n for name, p in emb.markers.items()}
    if reflect and n > 2 and order[-1] < order[1]:
        order = [order[0]] + order[:0:-1]
        markers = {name: (n - p) % n for name, p in markers.items()}
    return BookEmbedding(Layout(tuple(order)), dict(sorted(emb.pages.items())), emb.k, markers)


def canonical_key(emb: BookEmbedding, reflect: bool = True) -> tuple:
    c = canonicalize(emb, reflect)
    return (c.order, tuple(sorted(c.pages.items())))


# -- Proposition-style closure checks ----------------------------------------


def monochromatic_path(
    graph: Graph, emb: BookEmbedding, a: int, b: int, color: int
) -> list[int] | None:
    """BFS path from ``a`` to ``b`` using only edges on page ``color``."""
    if a == b:
        return [a]
    prev = {a: a}
    queue = deque([a])
    while queue:
        u = queue.popleft()
        for w in sorted(graph.neighbors(u)):
            if w in prev or emb.pages[edge_key(u, w)] != color:
                continue
            prev[w] = u
            if w == b:
                path = [b]
                while path[-1] != a:
                    path.append(prev[path[-1]])
                return path[::-1]
            queue.append(w)
    return None


def _pairs_to_check(n: int, exhaustive_limit: int, samples: int, seed: int) -> list[tuple[int, int]]:
    if n <= exhaustive_limit:
        return [(a, b) for a in range(n) for b in range(a + 1, n)]
    rng = random.Random(seed)
    out = set()
    while len(out) < min(samples, n * (n - 1) // 2):
        a, b = rng.sample(range(n), 2)
        out.add(edge_key(a, b))
    return sorted(out)


def check_proposition1(
    graph: Graph,
    emb: BookEmbedding,
    *,
    exhaustive_limit: int = 12,
    samples: int = 300,
    seed: int = 0,
) -> list[str]:
    """Closure rules that every valid embedding obeys; returns violations.

    For node pairs ``(a, b)`` joined by a monochromatic path of page ``i``, no
    other page-``i`` edge off that path may exit ``(a, b)``. When paths exist
    in every page, no edge off all paths exits, and each connected component
    of the graph minus the path nodes lies on a single side of ``(a, b)``.
    """
    pos = emb.layout.pos
    edges = graph.edges()
    out: list[str] = []
    for a, b in _pairs_to_check(graph.n, exhaustive_limit, samples, seed):
        paths = {}
        for c in range(1, emb.k + 1):
            p = monochromatic_path(graph, emb, a, b, c)
            if p is not None:
                paths[c] = p
        for c, p in paths.items():
            on = set(p)
            for x, y in edges:
                if emb.pages[(x, y)] == c and x not in on and y not in on and _exits_either_arc(x, y, a, b, pos):
                    out.append(f"({a},{b}) page {c}: edge ({x},{y}) exits around path {p}")
        if len(paths) < emb.k:
            continue
        union = set().union(*map(set, paths.values()))
        for x, y in edges:
            if x not in union and y not in union and _exits_either_arc(x, y, a, b, pos):
                out.append(f"({a},{b}) all pages: edge ({x},{y}) exits")
        for comp in _components_without(graph, union):
            sides = {_between(pos[v], pos[a], pos[b]) for v in comp}
            if len(sides) > 1:
                out.append(f"({a},{b}) all pages: component {sorted(comp)[:6]} straddles the interval")
    return out


def _components_without(graph: Graph, removed: set[int]) -> list[list[int]]:
    seen = set(removed)
    comps = []
    for s in range(graph.n):
        if s in seen:
            continue
        seen.add(s)
        comp = [s]
        stack = [s]
        while stack:
            u = stack.pop()
            for w in graph.neighbors(u):
                if w not in seen:
                    seen.add(w)
                    comp.append(w)
                    stack.append(w)
        comps.append(comp)
    return comps
