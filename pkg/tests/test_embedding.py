import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bookemb.embedding import (
    BookEmbedding,
    Layout,
    ShapeMismatch,
    canonical_key,
    canonicalize,
    check_proposition1,
    conflicts,
    exits_interval,
    in_arc,
    is_valid,
    monochromatic_path,
    validate_embedding,
)
from bookemb.graph import Graph


def k4():
    g = Graph(4)
    g.add_edges(itertools.combinations(range(4), 2))
    return g


def test_layout_rejects_non_permutation():
    with pytest.raises(ShapeMismatch):
        Layout((0, 0, 1))


def test_conflict_definition():
    lay = Layout((0, 1, 2, 3))
    assert conflicts((0, 2), (1, 3), lay)
    assert not conflicts((0, 1), (2, 3), lay)
    assert not conflicts((0, 2), (2, 3), lay)  # shared endpoint
    # rotation invariance on the circle
    assert conflicts((0, 2), (1, 3), Layout((2, 3, 0, 1)))


def test_in_arc_excluding_and_forward():
    assert in_arc(1, 0, 2, 4)
    assert not in_arc(3, 0, 2, 4)
    assert in_arc(3, 0, 2, 4, pe=1)
    assert in_arc(3, 2, 0, 4)


def test_exits_interval():
    lay = Layout((0, 1, 2, 3, 4))
    assert exits_interval((1, 3), 0, 2, lay, excluding=4)
    assert not exits_interval((1, 2), 0, 2, lay, excluding=4)  # ends on boundary
    assert not exits_interval((1, 0), 0, 2, lay, excluding=4)


def test_k4_one_page_invalid_two_pages_valid():
    g = k4()
    pages1 = {e: 1 for e in g.edges()}
    emb = BookEmbedding.from_order((0, 1, 2, 3), pages1, 1)
    assert validate_embedding(g, emb) == [((0, 2), (1, 3))]
    pages1[(1, 3)] = 2
    assert is_valid(g, BookEmbedding.from_order((0, 1, 2, 3), pages1, 2))


def test_shape_mismatch():
    g = k4()
    with pytest.raises(ShapeMismatch):
        validate_embedding(g, BookEmbedding.from_order((0, 1, 2, 3), {(0, 1): 1}, 1))
    with pytest.raises(ShapeMismatch):
        validate_embedding(g, BookEmbedding.from_order((0, 1, 2, 3), {e: 3 for e in g.edges()}, 2))


def test_canonicalize_rotation_and_reflection():
    emb = BookEmbedding.from_order((2, 3, 0, 1), {}, 1, {"u": 0.5})
    c = canonicalize(emb)
    assert c.order[0] == 0 and c.order[1] < c.order[-1]
    # marker sat between 2 and 3; stays between them after the transform
    p = c.markers["u"]
    lo = int(p)
    pair = {c.order[lo], c.order[(lo + 1) % 4]}
    assert pair == {2, 3}
    assert canonicalize(emb, reflect=False).order == (0, 1, 2, 3)


def test_canonical_key_identifies_mirror_images():
    a = BookEmbedding.from_order((0, 1, 2, 3), {}, 1)
    b = BookEmbedding.from_order((0, 3, 2, 1), {}, 1)
    assert canonical_key(a) == canonical_key(b)
    assert canonical_key(a, reflect=False) != canonical_key(b, reflect=False)


def test_monochromatic_path():
    g = Graph(3)
    g.add_edges([(0, 1), (1, 2)])
    emb = BookEmbedding.from_order((0, 1, 2), {(0, 1): 1, (1, 2): 1}, 1)
    assert monochromatic_path(g, emb, 0, 2, 1) == [0, 1, 2]
    assert monochromatic_path(g, emb, 0, 2, 2) is None


def test_proposition1_detects_exit_across_path():
    g = Graph(4)
    g.add_edges([(0, 2), (1, 3)])
    bad = BookEmbedding.from_order((0, 1, 2, 3), {(0, 2): 1, (1, 3): 1}, 1)
    assert check_proposition1(g, bad)
    good = bad.with_pages({(0, 2): 1, (1, 3): 2})
    assert check_proposition1(g, BookEmbedding.from_order(good.order, good.pages, 2)) == []


@st.composite
def embeddings(draw):
    n = draw(st.integers(2, 8))
    pairs = list(itertools.combinations(range(n), 2))
    edges = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=12))
    k = draw(st.integers(1, 3))
    order = draw(st.permutations(range(n)))
    pages = {e: draw(st.integers(1, k)) for e in edges}
    g = Graph(n)
    g.add_edges(edges)
    return g, BookEmbedding.from_order(order, pages, k)


@given(embeddings())
@settings(max_examples=150, deadline=None)
def test_validate_matches_pairwise_definition(ge):
    g, emb = ge
    naive = sorted(
        (e, f)
        for e, f in itertools.combinations(g.edges(), 2)
        if emb.pages[e] == emb.pages[f] and conflicts(e, f, emb.layout)
    )
    assert validate_embedding(g, emb) == naive
    # validity is invariant under rotation and reflection
    c = canonicalize(emb)
    assert is_valid(g, c) == (not naive)
