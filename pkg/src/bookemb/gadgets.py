"""Builders for the gadget graphs Q1, Q2, the quad and the final graph G.

Node ids are assigned deterministically. Q1 uses ids 0..9 in the order of
``Q1_ROLES``; Q2 continues with ``ea``/``eb`` (10, 11) and then stellation
centers in the order the faces are visited.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import CompactGraph, Graph, NotATriangle, edge_key

Triangle = tuple[int, int, int]

# role name, short label
Q1_ROLES = (
    ("outer_terminal_1", "1"),
    ("outer_terminal_2", "2"),
    ("inner_a", "a"),
    ("inner_b", "b"),
    ("center_c1", "c1"),
    ("center_c2", "c2"),
    ("d1a", "d1a"),
    ("d1b", "d1b"),
    ("d2a", "d2a"),
    ("d2b", "d2b"),
)
Q2_EXTRA_ROLES = (("ea", "ea"), ("eb", "eb"))
SHORT = {short: role for role, short in Q1_ROLES + Q2_EXTRA_ROLES}

Q1_VARIANTS = ("none", "plus12", "plusAB")
Q2_VARIANTS = ("none", "plus12", "centers_edge", "terminals_edge")


@dataclass(frozen=True)
class GadgetSpec:
    stellation_depth: int = 2
    quad_copies: int = 15
    path_length: int = 1000

    def __post_init__(self) -> None:
        if self.stellation_depth < 0:
            raise ValueError("stellation depth must be >= 0")
        if self.quad_copies < 1:
            raise ValueError("quad needs at least one copy")
        if self.path_length < 2:
            raise ValueError("path length must be >= 2")


class InvalidSpec(ValueError):
    pass


def stellate(graph: Graph, triangle: Triangle, depth: int) -> list[Triangle]:
    """Recursively insert centers into a registered triangle.

    Returns the leaf faces (``3**depth`` of them; the triangle itself when
    ``depth`` is 0).
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if tuple(triangle) not in graph.triangles:
        raise NotATriangle(f"{triangle} is not registered")
    return _stellate(graph, tuple(triangle), depth)


def _stellate(graph: Graph, t: Triangle, depth: int) -> list[Triangle]:
    if depth == 0:
        return [t]
    a, b, c = t
    x = graph.add_node()
    graph.add_edge(a, x)
    graph.add_edge(b, x)
    graph.add_edge(c, x)
    subs = [(a, b, x), (b, c, x), (a, c, x)]
    for s in subs:
        graph.register_triangle(s)
    leaves = []
    for s in subs:
        leaves.extend(_stellate(graph, s, depth - 1))
    return leaves


def stellation_nodes(depth: int) -> int:
    return (3**depth - 1) // 2


def stellation_edges(depth: int) -> int:
    return 3 * (3**depth - 1) // 2


# -- Q1 -----------------------------------------------------------------------

_Q1_BASE_EDGES = [
    ("1", "a"), ("1", "b"), ("2", "a"), ("2", "b"),
    ("1", "c1"), ("2", "c2"),
    ("a", "c1"), ("b", "c1"), ("a", "c2"), ("b", "c2"),
]
# center -> the triangle it stellates
_Q1_CENTERS = {
    "d1a": ("1", "a", "c1"),
    "d1b": ("1", "b", "c1"),
    "d2a": ("2", "a", "c2"),
    "d2b": ("2", "b", "c2"),
}


def _q1_core() -> tuple[Graph, dict[str, int], list[Triangle]]:
    g = Graph()
    ids = {}
    for role, short in Q1_ROLES:
        ids[short] = g.add_node(role)
    for x, y in _Q1_BASE_EDGES:
        g.add_edge(ids[x], ids[y])
    faces: list[Triangle] = []
    for d, tri in _Q1_CENTERS.items():
        p, q, r = (ids[s] for s in tri)
        c = ids[d]
        for w in (p, q, r):
            g.add_edge(w, c)
        g.register_triangle((p, q, r))
        for s in ((p, q, c), (q, r, c), (p, r, c)):
            g.register_triangle(s)
            faces.append(s)
    return g, ids, faces


def build_q1(variant: str = "none") -> Graph:
    if variant not in Q1_VARIANTS:
        raise InvalidSpec(f"unknown Q1 variant {variant!r}")
    g, ids, _ = _q1_core()
    if variant == "plus12":
        g.add_edge(ids["1"], ids["2"])
    elif variant == "plusAB":
        g.add_edge(ids["a"], ids["b"])
    return g


# -- Q2 -----------------------------------------------------------------------


def _q2_faces(variant: str) -> tuple[Graph, dict[str, int], list[Triangle]]:
    g, ids, faces = _q1_core()
    inner = "c1c2" if variant in ("none", "plus12", "centers_edge") else "ab"
    if inner == "c1c2":
        g.add_edge(ids["c1"], ids["c2"])
    else:
        g.add_edge(ids["a"], ids["b"])
    for name, hub in (("ea", "a"), ("eb", "b")):
        e = g.add_node(name)
        ids[name] = e
        if inner == "c1c2":
            tri = (ids[hub], ids["c1"], ids["c2"])
        else:
            # (a, b) splits the c1-a-c2-b quadrilateral the other way
            tri = (ids["a"], ids["b"], ids["c1" if hub == "a" else "c2"])
        for w in tri:
            g.add_edge(w, e)
        g.register_triangle(tri)
        p, q, r = tri
        for s in ((p, q, e), (q, r, e), (p, r, e)):
            g.register_triangle(s)
            faces.append(s)
    return g, ids, faces


def build_q2(depth: int = 2, variant: str = "centers_edge") -> Graph:
    """Q2: Q1 plus an inner edge and two more centers, internal faces
    stellated ``depth`` times.

    ``none``/``centers_edge`` use the edge (c1, c2); ``terminals_edge`` uses
    (a, b) instead; ``plus12`` is the default graph plus the edge (1, 2).
    """
    if variant not in Q2_VARIANTS:
        raise InvalidSpec(f"unknown Q2 variant {variant!r}")
    if depth < 0:
        raise InvalidSpec("depth must be >= 0")
    g, ids, faces = _q2_faces(variant)
    for f in faces:
        _stellate(g, f, depth)
    if variant == "plus12":
        g.add_edge(ids["1"], ids["2"])
    return g


def q2_counts(depth: int) -> tuple[int, int]:
    return 12 + 18 * stellation_nodes(depth), 29 + 18 * stellation_edges(depth)


# -- quad ---------------------------------------------------------------------


def build_quad(copies: int = 15, depth: int = 2, variant: str = "none", q2_variant: str = "centers_edge") -> Graph:
    """Glue ``copies`` Q2 graphs back to back on shared outer terminals.

    Inner terminal ``b`` of copy ``i`` is identified with ``a`` of copy
    ``i + 1``; the resulting duplicate edges to the outer terminals are kept
    once. Roles: ``outer_terminal_1``, ``outer_terminal_2``,
    ``inner_terminal[1..copies+1]`` and ``copy[i].<role>`` for the named
    nodes of every copy.
    """
    if copies < 1:
        raise InvalidSpec("quad needs at least one copy")
    if variant not in ("none", "plus12"):
        raise InvalidSpec(f"unknown quad variant {variant!r}")
    base = build_q2(depth, q2_variant)
    t1, t2 = base.role("outer_terminal_1"), base.role("outer_terminal_2")
    qa, qb = base.role("inner_a"), base.role("inner_b")
    base_edges = base.edges()
    g = Graph()
    o1 = g.add_node("outer_terminal_1")
    o2 = g.add_node("outer_terminal_2")
    prev_b = g.add_node("inner_terminal[1]")
    named = {v: r for r, v in base.roles.items()}
    for i in range(1, copies + 1):
        mp = {t1: o1, t2: o2, qa: prev_b}
        for v in range(base.n):
            if v in mp:
                continue
            if v == qb:
                mp[v] = g.add_node(f"inner_terminal[{i + 1}]")
            else:
                mp[v] = g.add_node()
        for v, r in named.items():
            if r.startswith("outer_terminal"):
                continue
            g.set_role(f"copy[{i}].{r}", mp[v])
        for u, v in base_edges:
            x, y = mp[u], mp[v]
            if i > 1 and g.has_edge(x, y):
                # only (outer, shared inner terminal) edges can repeat
                assert {x, y} & {o1, o2} and prev_b in (x, y)
                continue
            g.add_edge(x, y)
        for t in base.triangles:
            g.triangles.append(tuple(mp[w] for w in t))
        prev_b = mp[qb]
    if variant == "plus12":
        g.add_edge(o1, o2)
    return g


def quad_counts(copies: int, depth: int) -> tuple[int, int]:
    n2, m2 = q2_counts(depth)
    return 2 + copies * (n2 - 2) - (copies - 1), copies * m2 - 2 * (copies - 1)


def innermost_terminal(copies: int) -> int:
    """1-based index of the inner terminal joined to a small triangle's central node.

    The copies of Q2 sit side by side between the outer terminals, so only the
    first and last inner terminals lie on the quad's outer face. The last one
    is taken as the side facing the triangle's interior; a middle terminal
    would make G non-planar.
    """
    return copies + 1


# -- the final graph G --------------------------------------------------------


def g_counts(n: int, copies: int, depth: int) -> tuple[int, int]:
    nq, mq = quad_counts(copies, depth)
    nodes = 2 + n + 2 * (n - 1) * (1 + 3 + 9 * (nq - 2))
    edges = (n - 1) + 2 * n + 2 * (n - 1) * (3 + 3 * 6 + 9 * mq)
    return nodes, edges


def big_triangles(n: int) -> list[tuple[int, int]]:
    """(terminal t, path index i) for the big triangle (t, x_i, x_{i+1})."""
    return [(t, i) for i in range(1, n) for t in (1, 2)]


def build_g(n: int = 1000, copies: int = 15, depth: int = 2, innermost: int | None = None) -> CompactGraph:
    """The hard graph: a path x_1..x_n, terminals 1 and 2 joined to every x_i,
    each big triangle split by a center, and inside every small triangle a
    quad on each side plus a central node joined to the triangle's corners
    and to one inner terminal of each of its three quads.

    Ids: terminals 0, 1; x_i is ``1 + i``; then one block per big triangle (in
    :func:`big_triangles` order) holding its center, three central nodes and
    nine quad interiors. Registered triangles are the big and small ones.
    """
    if n < 2:
        raise InvalidSpec("path length n must be >= 2")
    if copies < 1 or depth < 0:
        raise InvalidSpec("need copies >= 1 and depth >= 0")
    innermost = innermost_terminal(copies) if innermost is None else innermost
    if not (1 <= innermost <= copies + 1):
        raise InvalidSpec("innermost terminal index out of range")

    quad = build_quad(copies, depth)
    nq = quad.n
    inner = nq - 2
    q_edges = quad.edge_array()  # locals: 0, 1 outer terminals
    q_inner_local = quad.role(f"inner_terminal[{innermost}]")
    block = 1 + 3 + 9 * inner
    bigs = big_triangles(n)
    nb = len(bigs)
    total_nodes = 2 + n + nb * block
    dtype = np.int32 if total_nodes < 2**31 else np.int64

    tb = np.array([t - 1 for t, _ in bigs], dtype=np.int64)  # terminal id
    xi = np.array([1 + i for _, i in bigs], dtype=np.int64)
    xj = xi + 1
    base = 2 + n + np.arange(nb, dtype=np.int64) * block
    center = base
    centrals = base[:, None] + 1 + np.arange(3, dtype=np.int64)[None, :]

    # small triangles: (t, x_i, C), (t, x_{i+1}, C), (x_i, x_{i+1}, C)
    smalls = np.stack(
        [
            np.stack([tb, xi, center], axis=1),
            np.stack([tb, xj, center], axis=1),
            np.stack([xi, xj, center], axis=1),
        ],
        axis=1,
    )  # (nb, 3, 3)
    side_pairs = ((0, 1), (1, 2), (0, 2))

    parts = []
    path = np.arange(2, 2 + n - 1, dtype=np.int64)
    parts.append(np.stack([path, path + 1], axis=1))
    xs = np.arange(2, 2 + n, dtype=np.int64)
    parts.append(np.stack([np.zeros(n, np.int64), xs], axis=1))
    parts.append(np.stack([np.ones(n, np.int64), xs], axis=1))
    for corner in (tb, xi, xj):
        parts.append(np.stack([corner, center], axis=1))
    central_extra = []
    for s in range(3):
        c = centrals[:, s]
        for corner in range(3):
            parts.append(np.stack([smalls[:, s, corner], c], axis=1))
        for side, (p, q) in enumerate(side_pairs):
            qi = 3 * s + side
            offset = base + 4 + qi * inner
            central_extra.append(np.stack([c, offset + (q_inner_local - 2)], axis=1))
    parts.extend(central_extra)
    head = np.concatenate(parts, axis=0).astype(dtype)

    local = q_edges.astype(np.int64)
    is_outer = local < 2
    q_total = nb * 9
    e_body = np.empty((q_total * local.shape[0], 2), dtype=dtype)
    row = 0
    chunk = local.shape[0]
    for s in range(3):
        for side, (p, q) in enumerate(side_pairs):
            qi = 3 * s + side
            t_one = smalls[:, s, p]
            t_two = smalls[:, s, q]
            offset = base + 4 + qi * inner
            for col in range(2):
                lc = local[:, col]
                vals = offset[:, None] + (lc[None, :] - 2)
                vals = np.where(lc[None, :] == 0, t_one[:, None], vals)
                vals = np.where(lc[None, :] == 1, t_two[:, None], vals)
                # rows of this (s, side) slice are interleaved per big triangle
                e_body[row : row + nb * chunk, col] = vals.reshape(-1)
            row += nb * chunk
    edges = np.concatenate([head, e_body], axis=0)
    del e_body, head
    lo = np.minimum(edges[:, 0], edges[:, 1])
    hi = np.maximum(edges[:, 0], edges[:, 1])
    edges[:, 0] = lo
    edges[:, 1] = hi
    del lo, hi
    order = np.lexsort((edges[:, 1], edges[:, 0]))
    edges = edges[order]
    del order

    bigs_arr = np.stack([tb, xi, xj], axis=1)
    tris = np.concatenate([bigs_arr, smalls.reshape(-1, 3)], axis=0).astype(dtype)

    roles = {"outer_terminal_1": 0, "outer_terminal_2": 1}
    for i in range(1, n + 1):
        roles[f"path_node[{i}]"] = 1 + i
    for j, (t, i) in enumerate(bigs):
        roles[f"big_center[{t},{i}]"] = int(center[j])
    return CompactGraph(int(total_nodes), edges, roles, tris)


def q1_copy_in_g(i: int, n: int, copies: int, depth: int) -> dict[str, int]:
    """Q1-role -> G-node map for the copy with inner terminals x_i, x_{i+1}."""
    block = 4 + 9 * (quad_counts(copies, depth)[0] - 2)
    bigs = big_triangles(n)
    j1 = bigs.index((1, i))
    j2 = bigs.index((2, i))
    b1 = 2 + n + j1 * block
    b2 = 2 + n + j2 * block
    return {
        "outer_terminal_1": 0,
        "outer_terminal_2": 1,
        "inner_a": 1 + i,
        "inner_b": 2 + i,
        "center_c1": b1,
        "center_c2": b2,
        "d1a": b1 + 1,
        "d1b": b1 + 2,
        "d2a": b2 + 1,
        "d2b": b2 + 2,
    }


GADGETS = ("q1", "q1+12", "q1+ab", "q2", "q2+12", "quad", "quad+12", "g")


def build(name: str, depth: int = 2, copies: int = 15, n: int = 1000, variant: str | None = None):
    """Dispatch by CLI gadget name."""
    if name == "q1":
        return build_q1(variant or "none")
    if name == "q1+12":
        return build_q1("plus12")
    if name == "q1+ab":
        return build_q1("plusAB")
    if name == "q2":
        return build_q2(depth, variant or "centers_edge")
    if name == "q2+12":
        return build_q2(depth, "plus12")
    if name == "quad":
        return build_quad(copies, depth, "none", variant or "centers_edge")
    if name == "quad+12":
        return build_quad(copies, depth, "plus12", variant or "centers_edge")
    if name == "g":
        return build_g(n, copies, depth)
    raise InvalidSpec(f"unknown gadget {name!r}; choose from {', '.join(GADGETS)}")
