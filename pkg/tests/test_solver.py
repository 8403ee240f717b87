import itertools
import random

import pytest
from oracle import brute_force, brute_pagenumber

from bookemb.constraints import Arc, ConstraintSet, EdgeColorIs, InOpenInterval
from bookemb.embedding import is_valid
from bookemb.graph import Graph
from bookemb.lemmas import random_connected_graph
from bookemb.solver import (
    Budget,
    SearchOptions,
    Status,
    decide_k_pages,
    edge_density_lower_bound,
    enumerate_models,
    pagenumber,
)


def complete(n):
    g = Graph(n)
    g.add_edges(itertools.combinations(range(n), 2))
    return g


def cycle(n):
    g = Graph(n)
    g.add_edges((i, (i + 1) % n) for i in range(n))
    return g


def star(leaves):
    g = Graph(leaves + 1)
    g.add_edges((0, i) for i in range(1, leaves + 1))
    return g


@pytest.mark.parametrize("g,k,expected", [
    (complete(4), 1, Status.UNSAT),
    (complete(4), 2, Status.SAT),
    (cycle(5), 1, Status.SAT),
    (complete(5), 2, Status.UNSAT),
    (complete(5), 3, Status.SAT),
])
def test_decide_small(g, k, expected):
    v = decide_k_pages(g, k)
    assert v.status is expected
    if v.sat:
        assert is_valid(g, v.witness)
    else:
        assert v.exhausted


@pytest.mark.parametrize("g,pn", [(cycle(5), 1), (complete(4), 2), (complete(5), 3), (star(5), 1), (complete(6), 3)])
def test_pagenumber_small(g, pn):
    assert pagenumber(g).pagenumber == pn


def test_pagenumber_edgeless():
    res = pagenumber(Graph(3))
    assert res.pagenumber == 0


def test_density_lower_bound():
    assert edge_density_lower_bound(4, 6) == 2
    assert edge_density_lower_bound(5, 7) == 1
    assert edge_density_lower_bound(5, 10) == 3


def test_budget_gives_unknown():
    v = decide_k_pages(complete(7), 3, budget=Budget(max_nodes=50))
    assert v.status is Status.UNKNOWN and not v.exhausted


def test_budget_validation():
    with pytest.raises(ValueError):
        Budget(max_nodes=0)
    with pytest.raises(ValueError):
        decide_k_pages(cycle(4), 0)


def test_constraints_respected():
    g = cycle(4)
    cs = ConstraintSet([EdgeColorIs((0, 1), 2), InOpenInterval(2, Arc(1, 3, excluding=0))])
    v = decide_k_pages(g, 2, cs)
    assert v.sat and v.witness.page(0, 1) == 2


def test_options_do_not_change_verdicts():
    rng = random.Random(7)
    for _ in range(25):
        g = random_connected_graph(rng, rng.randint(4, 7), 0.5)
        for k in (1, 2):
            base = decide_k_pages(g, k).status
            for opt in (SearchOptions(propagate=False), SearchOptions(symmetry=False), SearchOptions(prop1_pruning=True)):
                assert decide_k_pages(g, k, options=opt).status is base


def test_parallel_matches_serial():
    g = complete(6)
    for k in (2, 3):
        assert decide_k_pages(g, k, budget=Budget(threads=2)).status is decide_k_pages(g, k).status


def test_enumeration_counts_match_oracle():
    # distinct 1-page embeddings of C5 up to rotation/reflection: one order
    en = enumerate_models(cycle(5), 1)
    assert en.complete and len(en.models) == 1
    en = enumerate_models(complete(4), 2)
    assert en.complete
    assert all(is_valid(complete(4), m) for m in en.models)


def test_enumeration_cap():
    en = enumerate_models(complete(5), 3, cap=2)
    assert len(en.models) == 2 and not en.complete


def test_random_agreement_with_oracle():
    rng = random.Random(11)
    for _ in range(20):
        g = random_connected_graph(rng, rng.randint(4, 6), rng.uniform(0.2, 0.8))
        assert pagenumber(g).pagenumber == brute_pagenumber(g.n, g.edges())


def test_constrained_agreement_with_oracle():
    rng = random.Random(5)
    for _ in range(15):
        g = random_connected_graph(rng, 5, 0.4)
        e = rng.choice(g.edges())
        cs = [EdgeColorIs(e, 2), InOpenInterval(0, Arc("u", "v", excluding=1))]
        ok, _ = brute_force(g.n, g.edges(), 2, cs, ["u", "v"])
        assert decide_k_pages(g, 2, ConstraintSet(cs)).sat == ok
