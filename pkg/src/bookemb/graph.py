"""Undirected simple graphs with named roles and a triangle registry.

Two representations share one read surface (``n``, ``m``, ``roles``,
``edge_array()``, ``triangle_array()``):

* :class:`Graph` -- mutable adjacency sets, used by every builder and solver.
* :class:`CompactGraph` -- frozen numpy arrays, used for the multi-million
  node instances where Python sets would not fit in memory.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np


class GraphError(ValueError):
    pass


class RoleCollision(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class DuplicateEdge(GraphError):
    pass


class UnknownNode(GraphError):
    pass


class NotATriangle(GraphError):
    pass


def edge_key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


class Graph:
    """Simple undirected graph on dense integer ids ``0..n-1``."""

    def __init__(self, n: int = 0) -> None:
        self._adj: list[set[int]] = [set() for _ in range(n)]
        self._m = 0
        self.roles: dict[str, int] = {}
        self.triangles: list[tuple[int, int, int]] = []

    @property
    def n(self) -> int:
        return len(self._adj)

    @property
    def m(self) -> int:
        return self._m

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m}, roles={len(self.roles)}, triangles={len(self.triangles)})"

    def add_node(self, role: str | None = None) -> int:
        if role is not None and role in self.roles:
            raise RoleCollision(f"role {role!r} already assigned to node {self.roles[role]}")
        v = len(self._adj)
        self._adj.append(set())
        if role is not None:
            self.roles[role] = v
        return v

    def add_nodes(self, count: int) -> range:
        start = len(self._adj)
        self._adj.extend(set() for _ in range(count))
        return range(start, start + count)

    def set_role(self, role: str, v: int) -> None:
        self._check_node(v)
        if role in self.roles:
            raise RoleCollision(f"role {role!r} already assigned to node {self.roles[role]}")
        self.roles[role] = v

    def role(self, name: str) -> int:
        try:
            return self.roles[name]
        except KeyError:
            raise KeyError(f"unknown role {name!r}") from None

    def role_of(self, v: int) -> str | None:
        for name, u in self.roles.items():
            if u == v:
                return name
        return None

    def _check_node(self, v: int) -> None:
        if not (isinstance(v, (int, np.integer)) and 0 <= v < len(self._adj)):
            raise UnknownNode(f"node {v!r} not in graph with {len(self._adj)} nodes")

    def add_edge(self, u: int, v: int) -> None:
        self._check_node(u)
        self._check_node(v)
        if u == v:
            raise SelfLoop(f"self-loop at node {u}")
        if v in self._adj[u]:
            raise DuplicateEdge(f"edge {edge_key(u, v)} already present")
        self._adj[u].add(v)
        self._adj[v].add(u)
        self._m += 1

    def add_edges(self, pairs: Iterable[tuple[int, int]]) -> None:
        for u, v in pairs:
            self.add_edge(u, v)

    def has_edge(self, u: int, v: int) -> bool:
        return 0 <= u < len(self._adj) and v in self._adj[u]

    def neighbors(self, v: int) -> set[int]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def edges(self) -> list[tuple[int, int]]:
        """All edges as ``(u, v)`` with ``u < v``, sorted."""
        return sorted((u, v) for u, nbrs in enumerate(self._adj) for v in nbrs if u < v)

    def iter_edges(self) -> Iterator[tuple[int, int]]:
        for u, nbrs in enumerate(self._adj):
            for v in sorted(nbrs):
                if u < v:
                    yield (u, v)

    def register_triangle(self, t: tuple[int, int, int]) -> None:
        a, b, c = t
        for x, y in ((a, b), (b, c), (a, c)):
            if not self.has_edge(x, y):
                raise NotATriangle(f"{t}: edge {edge_key(x, y)} missing")
        self.triangles.append((a, b, c))

    def copy(self) -> Graph:
        g = Graph()
        g._adj = [set(s) for s in self._adj]
        g._m = self._m
        g.roles = dict(self.roles)
        g.triangles = list(self.triangles)
        return g

    def edge_array(self) -> np.ndarray:
        e = self.edges()
        return np.array(e, dtype=np.int64).reshape(len(e), 2)

    def triangle_array(self) -> np.ndarray:
        return np.array(self.triangles, dtype=np.int64).reshape(len(self.triangles), 3)

    def to_compact(self) -> CompactGraph:
        return CompactGraph(self.n, self.edge_array(), dict(self.roles), self.triangle_array())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and self._adj == other._adj
            and self.roles == other.roles
            and self.triangles == other.triangles
        )


@dataclass
class CompactGraph:
    """Array-backed graph. ``edges`` is an ``(m, 2)`` array of ``u < v`` pairs."""

    n: int
    edges: np.ndarray
    roles: dict[str, int] = field(default_factory=dict)
    triangles: np.ndarray = field(default_factory=lambda: np.zeros((0, 3), dtype=np.int64))

    @property
    def m(self) -> int:
        return int(self.edges.shape[0])

    def edge_array(self) -> np.ndarray:
        return self.edges

    def triangle_array(self) -> np.ndarray:
        return self.triangles

    def role(self, name: str) -> int:
        return self.roles[name]

    def to_graph(self) -> Graph:
        g = Graph(self.n)
        for u, v in self.edges.tolist():
            g.add_edge(u, v)
        g.roles = dict(self.roles)
        for t in self.triangles.tolist():
            g.register_triangle(tuple(t))
        return g


@dataclass
class ValidationReport:
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    @property
    def clean(self) -> bool:
        return not self.errors and not self.warnings

    def __bool__(self) -> bool:
        return self.clean


def validate(graph: Graph | CompactGraph) -> ValidationReport:
    """Check the structural invariants; never raises.

    The planar bound ``m <= 3n - 6`` is necessary only, hence reported as a
    warning.
    """
    if isinstance(graph, CompactGraph):
        return _validate_compact(graph)
    rep = ValidationReport()
    n = graph.n
    for u in range(n):
        nb = graph.neighbors(u)
        if u in nb:
            rep.errors.append(f"self-loop at {u}")
        for v in nb:
            if not (0 <= v < n):
                rep.errors.append(f"edge ({u},{v}) references unknown node")
            elif u not in graph.neighbors(v):
                rep.errors.append(f"asymmetric adjacency ({u},{v})")
    _check_roles(graph.roles, n, rep)
    seen: set[tuple[int, ...]] = set()
    for t in graph.triangles:
        a, b, c = t
        for x, y in ((a, b), (b, c), (a, c)):
            if not graph.has_edge(x, y):
                rep.errors.append(f"triangle {t}: edge {edge_key(x, y)} missing")
        key = tuple(sorted(t))
        if key in seen:
            rep.warnings.append(f"triangle {t} registered more than once")
        seen.add(key)
    _planar_bound(n, graph.m, rep)
    return rep


def _check_roles(roles: dict[str, int], n: int, rep: ValidationReport) -> None:
    for name, v in roles.items():
        if not (0 <= v < n):
            rep.errors.append(f"role {name!r} points to missing node {v}")


def _planar_bound(n: int, m: int, rep: ValidationReport) -> None:
    if n >= 3 and m > 3 * n - 6:
        rep.warnings.append(f"planar edge bound violated: m={m} > 3n-6={3 * n - 6}")


def _validate_compact(g: CompactGraph) -> ValidationReport:
    rep = ValidationReport()
    e = g.edges
    n = g.n
    if e.size:
        if int(e.min()) < 0 or int(e.max()) >= n:
            rep.errors.append("edge references unknown node")
        loops = int(np.count_nonzero(e[:, 0] == e[:, 1]))
        if loops:
            rep.errors.append(f"{loops} self-loops")
        if np.any(e[:, 0] > e[:, 1]):
            rep.errors.append("edge pairs not stored with u < v")
        keys = _edge_keys(e, n)
        keys.sort()
        dup = int(np.count_nonzero(keys[1:] == keys[:-1]))
        if dup:
            rep.errors.append(f"{dup} duplicate edges")
        t = g.triangles
        if t.size:
            for x, y in ((0, 1), (1, 2), (0, 2)):
                tk = _edge_keys(np.stack([t[:, x], t[:, y]], axis=1), n)
                idx = np.searchsorted(keys, tk)
                idx[idx >= keys.size] = 0
                missing = int(np.count_nonzero(keys[idx] != tk))
                if missing:
                    rep.errors.append(f"{missing} triangles with a missing edge")
        del keys
    _check_roles(g.roles, n, rep)
    _planar_bound(n, g.m, rep)
    return rep


def _edge_keys(pairs: np.ndarray, n: int) -> np.ndarray:
    lo = np.minimum(pairs[:, 0], pairs[:, 1]).astype(np.int64)
    hi = np.maximum(pairs[:, 0], pairs[:, 1]).astype(np.int64)
    return lo * np.int64(n) + hi
