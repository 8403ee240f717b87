import networkx as nx
import numpy as np
import pytest

import counting
from bookemb.gadgets import (
    InvalidSpec,
    build,
    build_g,
    build_q1,
    build_q2,
    build_quad,
    g_counts,
    innermost_terminal,
    q1_copy_in_g,
    q2_counts,
    quad_counts,
    stellate,
    stellation_nodes,
)
from bookemb.graph import Graph, NotATriangle, validate


def as_nx(g):
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges() if isinstance(g, Graph) else map(tuple, g.edges.tolist()))
    return h


def test_q1_shape():
    g = build_q1()
    assert (g.n, g.m) == (10, 22)
    assert nx.is_isomorphic(as_nx(g), counting.q1()[0])
    assert build_q1("plus12").has_edge(g.role("outer_terminal_1"), g.role("outer_terminal_2"))
    assert build_q1("plusAB").has_edge(g.role("inner_a"), g.role("inner_b"))


def test_q1_role_adjacency():
    g = build_q1()
    r = g.role
    assert set(g.neighbors(r("center_c1"))) >= {r("outer_terminal_1"), r("inner_a"), r("inner_b")}
    assert set(g.neighbors(r("d2b"))) == {r("outer_terminal_2"), r("inner_b"), r("center_c2")}
    assert not g.has_edge(r("outer_terminal_1"), r("center_c2"))


def test_stellate_counts_and_errors():
    g = Graph(3)
    g.add_edges([(0, 1), (1, 2), (0, 2)])
    with pytest.raises(NotATriangle):
        stellate(g, (0, 1, 2), 1)
    g.register_triangle((0, 1, 2))
    leaves = stellate(g, (0, 1, 2), 2)
    assert len(leaves) == 9 and g.n == 3 + stellation_nodes(2)


@pytest.mark.parametrize("depth", [0, 1, 2])
def test_q2_against_counting_oracle(depth):
    g = build_q2(depth)
    ref = counting.q2(depth)
    assert (g.n, g.m) == (ref.number_of_nodes(), ref.number_of_edges()) == q2_counts(depth)
    assert nx.check_planarity(as_nx(g))[0]


def test_q2_depth2_literal_counts():
    g = build_q2(2)
    assert (g.n, g.m) == (84, 245)


@pytest.mark.parametrize("copies", [1, 2, 15])
@pytest.mark.parametrize("depth", [0, 1, 2])
def test_quad_against_counting_oracle(copies, depth):
    g = build_quad(copies, depth)
    ref = counting.quad(copies, depth)
    assert (g.n, g.m) == (ref.number_of_nodes(), ref.number_of_edges()) == quad_counts(copies, depth)
    terms = [k for k in g.roles if k.startswith("inner_terminal[")]
    assert len(terms) == copies + 1


def test_quad_default_literal_counts():
    g = build_quad()
    assert g.n == 1218
    assert len([k for k in g.roles if k.startswith("inner_terminal[")]) == 16
    assert innermost_terminal(15) == 16


def test_quad_is_planar_and_iso_small():
    g = build_quad(2, 1)
    assert nx.check_planarity(as_nx(g))[0]
    assert nx.is_isomorphic(as_nx(g), counting.quad(2, 1))


@pytest.mark.parametrize("n,copies,depth", [(2, 1, 0), (3, 2, 0), (2, 2, 1)])
def test_g_against_counting_oracle(n, copies, depth):
    g = build_g(n, copies, depth)
    ref = counting.graph_g(n, copies, depth)
    assert (g.n, g.m) == (ref.number_of_nodes(), ref.number_of_edges()) == g_counts(n, copies, depth)
    assert validate(g).ok
    assert nx.check_planarity(as_nx(g))[0]


def test_g_small_isomorphic_to_oracle():
    assert nx.is_isomorphic(as_nx(build_g(2, 1, 0)), counting.graph_g(2, 1, 0))


def test_g3_default_counts():
    g = build_g(3)
    ref = counting.graph_g(3, 15, 2)
    assert g.n == 43797 == g_counts(3, 15, 2)[0] == ref.number_of_nodes()
    assert g.m == ref.number_of_edges()
    rep = validate(g)
    assert rep.ok
    assert nx.check_planarity(as_nx(g))[0]


def test_middle_terminal_breaks_planarity():
    # why the boundary inner terminal is the one wired to the central node
    assert not nx.check_planarity(as_nx(build_g(2, 2, 0, innermost=2)))[0]
    assert nx.check_planarity(as_nx(build_g(2, 2, 0, innermost=1)))[0]


def test_q1_copy_embeds_in_g():
    n, copies, depth = 4, 1, 0
    g = build_g(n, copies, depth)
    ref = build_q1()
    edges = {tuple(e) for e in g.edges.tolist()}
    for i in range(1, n):
        mp = q1_copy_in_g(i, n, copies, depth)
        assert len(set(mp.values())) == 10
        for u, v in ref.edges():
            x, y = mp[ref.role_of(u)], mp[ref.role_of(v)]
            assert (min(x, y), max(x, y)) in edges


def test_g_edges_sorted_unique():
    e = build_g(3, 2, 1).edges
    assert np.all(e[:, 0] < e[:, 1])
    keys = e[:, 0].astype(np.int64) * (1 << 32) + e[:, 1]
    assert np.all(np.diff(keys) > 0)


def test_invalid_specs():
    with pytest.raises(InvalidSpec):
        build_g(1)
    with pytest.raises(InvalidSpec):
        build_quad(0)
    with pytest.raises(InvalidSpec):
        build("nope")
    with pytest.raises(InvalidSpec):
        build_q1("plusXY")


def _role_injection_holds(small, big, rename):
    for u, v in small.edges():
        ru, rv = small.role_of(u), small.role_of(v)
        if ru is None or rv is None:
            continue
        assert big.has_edge(big.role(rename(ru)), big.role(rename(rv))), (ru, rv)


def test_q1_in_q2_in_quad_by_roles():
    q1, q2, quad = build_q1(), build_q2(2), build_quad(3, 2)
    # every Q1 edge joins two named nodes
    assert all(q1.role_of(u) and q1.role_of(v) for u, v in q1.edges())
    _role_injection_holds(q1, q2, lambda r: r)
    for i in (1, 2, 3):
        def rename(r, i=i):
            return r if r.startswith("outer_terminal") else f"copy[{i}].{r}"
        _role_injection_holds(q2, quad, rename)
    assert quad.role("copy[1].inner_b") == quad.role("copy[2].inner_a") == quad.role("inner_terminal[2]")
