import itertools
import random

import numpy as np
import pytest

from gndsearch.bounds import (
    lb_gnd,
    lb_nd,
    node_prunable_keyword,
    node_prunable_nd,
    vertex_prunable_keyword,
    vertex_prunable_nd,
    weight_list,
)
from gndsearch.embedding import EMPTY_SET_MBR, Mbr
from gndsearch.errors import GndSearchError
from gndsearch.graph import Graph
from gndsearch.semantics import Aggregate


def matching_costs(qlist, vlist):
    """Every bijective zero-padded matching's cost; the independent reference.

    The data list is padded with zeros up to the query length, then every
    injective assignment of padded data weights to query positions is costed.
    """
    padded = list(vlist) + [0.0] * max(0, len(qlist) - len(vlist))
    costs = set()
    for perm in itertools.permutations(padded, len(qlist)):
        costs.add(sum(max(qw - vw, 0.0) for qw, vw in zip(qlist, perm)))
    return costs


def test_weight_list():
    g = Graph(
        {0: [], 1: [], 2: [], 3: [], 4: []},
        [(1, 2, 3.0), (1, 3, 5.0), (1, 4, 2.0)],
    )
    assert weight_list(g, 0) == []
    assert weight_list(g, 1) == [5.0, 3.0, 2.0]
    star = Graph({0: [], 1: [], 2: []}, [(0, 1, 2.0), (0, 2, 2.0)])
    assert weight_list(star, 0) == [2.0, 2.0]


def test_lb_nd_examples():
    assert lb_nd([5.0, 3.0], [5.0, 3.0]) == 0.0
    # reference: matchings of [5,3] onto [6,2] cost {1, 3}; the bound hits the min
    assert matching_costs([5.0, 3.0], [6.0, 2.0]) == {1.0, 3.0}
    assert lb_nd([5.0, 3.0], [6.0, 2.0]) == 1.0
    assert lb_nd([3.0], []) == 3.0
    assert lb_nd([], [4.0]) == 0.0


def test_lb_nd_is_tight_minimum_exhaustive():
    # weights on a dyadic grid keep every difference and sum exact in float64,
    # so the bound-vs-enumeration comparison carries zero tolerance
    rng = random.Random(424242)
    for trial in range(400):
        nq = rng.randint(0, 5)
        nv = rng.randint(0, 5)
        qlist = sorted((rng.randrange(1, 257) / 32.0 for _ in range(nq)), reverse=True)
        vlist = sorted((rng.randrange(1, 257) / 32.0 for _ in range(nv)), reverse=True)
        bound = lb_nd(qlist, vlist)
        if not qlist:
            assert bound == 0.0
            continue
        costs = matching_costs(qlist, vlist)
        assert bound == min(costs), (qlist, vlist)


def test_lb_gnd():
    assert lb_gnd([0.0, 0.0], Aggregate.SUM) == 0.0
    assert lb_gnd([1.0, 2.0], Aggregate.SUM) == 3.0
    assert lb_gnd([1.0, 2.0], Aggregate.MAX) == 2.0
    with pytest.raises(GndSearchError):
        lb_gnd([], Aggregate.MAX)


def test_vertex_prunable_keyword():
    v = Mbr(np.array([0.0, 0.0]), np.array([1.0, 1.0]))
    inside = Mbr(np.array([0.2, 0.2]), np.array([0.8, 0.8]))
    outside = Mbr(np.array([2.0, 2.0]), np.array([3.0, 3.0]))
    assert not vertex_prunable_keyword(v, {0: inside, 1: outside})
    assert vertex_prunable_keyword(v, {0: outside})
    # an empty-keyword query vertex is contained everywhere: never prunable
    assert not vertex_prunable_keyword(v, {0: outside, 1: EMPTY_SET_MBR})


def test_vertex_prunable_nd():
    assert not vertex_prunable_nd([1.0], [1.0], 0.0)  # bound 0 <= delta 0
    assert vertex_prunable_nd([5.0, 3.0], [6.0, 2.0], 0.5)
    assert not vertex_prunable_nd([5.0, 3.0], [6.0, 2.0], 1e18)


def test_node_prunable_keyword_mirrors_vertex_rule():
    agg = Mbr(np.array([0.0, 0.0]), np.array([4.0, 4.0]))
    q_in = Mbr(np.array([1.0, 1.0]), np.array([2.0, 2.0]))
    q_out = Mbr(np.array([5.0, 5.0]), np.array([6.0, 6.0]))
    assert not node_prunable_keyword(agg, {0: q_in})
    assert node_prunable_keyword(agg, {0: q_out})
    assert not node_prunable_keyword(agg, {0: q_out, 1: q_in})


def test_node_prunable_nd():
    # isolated query vertex has an empty list: bound 0, never prunable
    assert not node_prunable_nd([1.0], {0: [], 1: [9.0]}, 0.5)
    assert node_prunable_nd([], {0: [3.0]}, 1.0)
    assert not node_prunable_nd([], {0: [3.0]}, 3.0)


def test_lb_gnd_below_exact_score():
    from gndsearch.semantics import gnd_score

    from conftest import random_query_from, random_small_graph

    rng = random.Random(17)
    for _ in range(100):
        g = random_small_graph(rng, 7)
        q = random_query_from(g, rng, 3)
        qorder = sorted(q.vertices)
        mapping = dict(zip(qorder, rng.sample(sorted(g.vertices), 3)))
        per_pair = [
            lb_nd(weight_list(q, qj), weight_list(g, vi)) for qj, vi in mapping.items()
        ]
        for agg in Aggregate:
            assert lb_gnd(per_pair, agg) <= gnd_score(q, g, mapping, agg) + 1e-12


def test_node_list_dominance():
    rng = random.Random(5)
    for _ in range(300):
        members = [
            sorted((rng.uniform(0, 9) for _ in range(rng.randint(0, 5))), reverse=True)
            for _ in range(rng.randint(1, 4))
        ]
        length = max((len(m) for m in members), default=0)
        node = [
            max((m[z] if z < len(m) else 0.0) for m in members) for z in range(length)
        ]
        qlist = sorted((rng.uniform(0, 9) for _ in range(rng.randint(0, 5))), reverse=True)
        for m in members:
            assert lb_nd(qlist, node) <= lb_nd(qlist, m) + 1e-12
