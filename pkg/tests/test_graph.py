import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bookemb.graph import (
    CompactGraph,
    DuplicateEdge,
    Graph,
    NotATriangle,
    RoleCollision,
    SelfLoop,
    UnknownNode,
    validate,
)


def test_add_node_indices_and_roles():
    g = Graph()
    assert g.add_node() == 0
    g.add_nodes(2)
    assert g.add_node("center_c1") == 3
    assert g.role("center_c1") == 3
    assert g.role_of(3) == "center_c1"
    with pytest.raises(RoleCollision):
        g.add_node("center_c1")


def test_edge_errors():
    g = Graph(2)
    g.add_edge(0, 1)
    assert g.has_edge(1, 0)
    with pytest.raises(DuplicateEdge):
        g.add_edge(1, 0)
    with pytest.raises(SelfLoop):
        g.add_edge(0, 0)
    with pytest.raises(UnknownNode):
        g.add_edge(0, 5)


def test_triangle_registry():
    g = Graph(3)
    g.add_edges([(0, 1), (1, 2)])
    with pytest.raises(NotATriangle):
        g.register_triangle((0, 1, 2))
    g.add_edge(0, 2)
    g.register_triangle((0, 1, 2))
    assert g.triangles == [(0, 1, 2)]


def test_validate_planar_bound_is_warning():
    g = Graph(5)
    for u in range(5):
        for v in range(u + 1, 5):
            g.add_edge(u, v)
    rep = validate(g)
    assert rep.ok and not rep.clean
    assert any("planar" in w for w in rep.warnings)


def test_validate_bad_role():
    g = Graph(2)
    g.roles["x"] = 7
    assert not validate(g).ok


def test_compact_validation_catches_duplicates_and_loops():
    cg = CompactGraph(3, np.array([[0, 1], [0, 1], [2, 2]]))
    errs = validate(cg).errors
    assert any("duplicate" in e for e in errs)
    assert any("self-loop" in e for e in errs)


def test_compact_missing_triangle_edge():
    cg = CompactGraph(3, np.array([[0, 1], [1, 2]]), triangles=np.array([[0, 1, 2]]))
    assert any("triangle" in e for e in validate(cg).errors)


@st.composite
def graphs(draw):
    n = draw(st.integers(1, 9))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True) if pairs else st.just([]))
    g = Graph(n)
    g.add_edges(chosen)
    return g


@given(graphs())
@settings(max_examples=60, deadline=None)
def test_compact_round_trip(g):
    cg = g.to_compact()
    assert cg.to_graph() == g
    assert validate(cg).errors == validate(g).errors
    assert cg.m == g.m
    assert g.edges() == sorted(g.edges())
