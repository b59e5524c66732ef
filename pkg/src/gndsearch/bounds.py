"""Sorted edge-weight lists, neighbor-difference lower bounds, and pruning predicates.

A weight list holds a vertex's incident edge weights in non-ascending order;
positions past its end read 0, realizing the missing-edge convention. Matching
the two sorted lists position-by-position lower-bounds the neighbor difference
of every actual vertex-to-vertex matching (swap argument), so comparing the
bound against the threshold prunes without false negatives.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence

from .embedding import Mbr, mbr_contains
from .errors import GndSearchError
from .graph import Graph
from .semantics import Aggregate

SortedWeightList = list[float]


def weight_list(g: Graph, v: int) -> SortedWeightList:
    """Incident edge weights of ``v``, sorted non-ascending."""
    return sorted(g.neighbors(v).values(), reverse=True)


def lb_nd(qlist: Sequence[float], vlist: Sequence[float]) -> float:
    """Lower bound of the neighbor difference from the two sorted lists."""
    nv = len(vlist)
    total = 0.0
    for z, qw in enumerate(qlist):
        vw = vlist[z] if z < nv else 0.0
        if qw > vw:
            total += qw - vw
    return total


def lb_gnd(per_pair: Sequence[float], aggregate: Aggregate) -> float:
    """Aggregate of per-pair lower bounds; a lower bound of the exact score."""
    if not per_pair:
        raise GndSearchError("graph-level bound needs at least one pair")
    return aggregate.apply(list(per_pair))


def vertex_prunable_keyword(v_mbr: Mbr, q_mbrs: Mapping[int, Mbr]) -> bool:
    """Prune a vertex whose box contains no query vertex's box."""
    return all(not mbr_contains(v_mbr, qm) for qm in q_mbrs.values())


def vertex_prunable_nd(
    qlist: Sequence[float], vlist: Sequence[float], delta: float
) -> bool:
    """Prune a (query vertex, vertex) pair whose bound already exceeds the threshold."""
    return lb_nd(qlist, vlist) > delta


def node_prunable_keyword(node_mbr: Mbr, q_mbrs: Mapping[int, Mbr]) -> bool:
    """Prune an index entry whose aggregate box contains no query vertex's box."""
    return all(not mbr_contains(node_mbr, qm) for qm in q_mbrs.values())


def node_prunable_nd(
    node_list: Sequence[float], q_wlists: Mapping[int, Sequence[float]], delta: float
) -> bool:
    """Prune an index entry whose aggregate list bound exceeds the threshold for
    every query vertex."""
    return all(lb_nd(qlist, node_list) > delta for qlist in q_wlists.values())
