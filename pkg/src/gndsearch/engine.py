"""Online query answering: index traversal for candidates, then stack refinement.

Traversal walks the tree breadth-first. Every node carries the set of query
vertices still relevant to it; a child entry keeps a query vertex only if the
entry's aggregate box contains that vertex's box and the aggregate weight-list
bound stays within the threshold. Leaves apply the same two tests per vertex.

Refinement assembles candidate vertices depth-first, starting from the query
vertex with the fewest candidates and always extending with the unmatched
query vertex most strongly attached (by summed query edge weight) to the
matched ones. Complete mappings pass the graph-level lower bound before the
exact score and connectivity checks.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .bounds import lb_gnd, lb_nd, weight_list
from .embedding import EmbeddingTable, Mbr, mbr_contains
from .errors import FingerprintMismatchError
from .graph import Graph
from .index import InternalNode, LeafNode, TreeIndex
from .semantics import Aggregate, Answer, QueryParams, gnd_score

CandidateSets = dict[int, set[int]]


@dataclass(frozen=True)
class EngineOptions:
    """Pruning toggles (ablation) and the optional adjacency-based early filter."""

    use_mbr: bool = True
    use_nd: bool = True
    use_gnd: bool = True
    early_connect: bool = False

    @staticmethod
    def from_disabled(tokens: set[str]) -> "EngineOptions":
        unknown = tokens - {"mbr", "nd", "gnd"}
        if unknown:
            raise ValueError(f"unknown pruning stages: {sorted(unknown)}")
        return EngineOptions(
            use_mbr="mbr" not in tokens,
            use_nd="nd" not in tokens,
            use_gnd="gnd" not in tokens,
        )


@dataclass
class QueryStats:
    candidates_total: int = 0
    pruning_power: float = 0.0
    answers: int = 0
    wall_time: float = 0.0
    nodes_visited: int = 0
    complete_mappings: int = 0
    refined_mappings: int = 0

    def stats_line(self) -> str:
        return (
            f"stats pruning_power={self.pruning_power:.6f} "
            f"candidates={self.candidates_total} answers={self.answers} "
            f"wall_ms={self.wall_time * 1000.0:.3f}"
        )


@dataclass
class _QuerySide:
    """Per-query precomputation shared by traversal and refinement."""

    order: list[int]
    mbrs: dict[int, Mbr]
    wlists: dict[int, tuple[float, ...]]

    @staticmethod
    def build(q: Graph, table: EmbeddingTable) -> "_QuerySide":
        order = sorted(q.vertices)
        return _QuerySide(
            order=order,
            mbrs={qj: table.mbr_of_keyword_set(q.keyword_set(qj)) for qj in order},
            wlists={qj: tuple(weight_list(q, qj)) for qj in order},
        )


def _check_fingerprints(ix: TreeIndex, g: Graph, table: EmbeddingTable) -> None:
    if ix.graph_fingerprint and ix.graph_fingerprint != g.fingerprint():
        raise FingerprintMismatchError("index was built against a different graph")
    if ix.embedding_fingerprint and ix.embedding_fingerprint != table.fingerprint():
        raise FingerprintMismatchError("index was built against a different embedding table")


def retrieve_candidates(
    g: Graph,
    ix: TreeIndex,
    q: Graph,
    table: EmbeddingTable,
    params: QueryParams,
    options: EngineOptions = EngineOptions(),
    stats: QueryStats | None = None,
) -> CandidateSets:
    """Breadth-first index traversal; per query vertex, the surviving vertices."""
    _check_fingerprints(ix, g, table)
    qs = _QuerySide.build(q, table)
    cands: CandidateSets = {qj: set() for qj in qs.order}

    queue: list[tuple[LeafNode | InternalNode, list[int]]] = [(ix.root, qs.order)]
    head = 0
    while head < len(queue):
        node, relevant = queue[head]
        head += 1
        if stats is not None:
            stats.nodes_visited += 1
        if isinstance(node, LeafNode):
            for vid, aux in node.entries:
                for qj in relevant:
                    if options.use_mbr and not mbr_contains(aux.mbr, qs.mbrs[qj]):
                        continue
                    if options.use_nd and lb_nd(qs.wlists[qj], aux.wlist) > params.delta:
                        continue
                    cands[qj].add(vid)
        else:
            for entry in node.entries:
                surviving = [
                    qj
                    for qj in relevant
                    if (not options.use_mbr or mbr_contains(entry.mbr, qs.mbrs[qj]))
                    and (not options.use_nd or lb_nd(qs.wlists[qj], entry.wlist) <= params.delta)
                ]
                if surviving:
                    queue.append((entry.child, surviving))
    return cands


def refine(
    g: Graph,
    q: Graph,
    cands: CandidateSets,
    params: QueryParams,
    options: EngineOptions = EngineOptions(),
    stats: QueryStats | None = None,
) -> set[Answer]:
    """Depth-first assembly of candidate vertices into exact-checked answers.

    While the graph-level bound stage is enabled, partial mappings are pruned
    by a running lower bound: per matched pair, the larger of the sorted-list
    bound and the accumulated shortfalls of already-mapped neighbor edges.
    Every recorded shortfall is an exact summand of that pair's final
    neighbor difference and all remaining summands are non-negative, so the
    running aggregate never exceeds the final score of any completion.
    """
    qorder = sorted(q.vertices)
    if any(not cands.get(qj) for qj in qorder):
        return set()
    q_keywords = {qj: q.keyword_set(qj) for qj in qorder}
    q_wlists = {qj: tuple(weight_list(q, qj)) for qj in qorder}
    sorted_cands = {qj: sorted(cands[qj], reverse=True) for qj in qorder}
    is_sum = params.aggregate is Aggregate.SUM
    delta = params.delta

    g_wlist_cache: dict[int, tuple[float, ...]] = {}

    def data_wlist(vi: int) -> tuple[float, ...]:
        cached = g_wlist_cache.get(vi)
        if cached is None:
            cached = tuple(weight_list(g, vi))
            g_wlist_cache[vi] = cached
        return cached

    static_cache: dict[tuple[int, int], float] = {}

    def static_lb(qj: int, vi: int) -> float:
        key = (qj, vi)
        cached = static_cache.get(key)
        if cached is None:
            cached = lb_nd(q_wlists[qj], data_wlist(vi))
            static_cache[key] = cached
        return cached

    def pick_next(matched: dict[int, int]) -> int:
        # ascending scan keeps the smallest id on ties
        best_qj, best_weight = -1, -1.0
        for qj in qorder:
            if qj in matched:
                continue
            attached = sum(w for nj, w in q.neighbors(qj).items() if nj in matched)
            if attached > best_weight:
                best_qj, best_weight = qj, attached
        return best_qj

    def pair_bounds_after(
        mapping: dict[int, int], shortfalls: dict[int, float], q_next: int, vi: int
    ) -> dict[int, float] | None:
        """Updated shortfalls with (q_next -> vi) added, or None when prunable."""
        new_shortfalls = dict(shortfalls)
        added = 0.0
        for nj, qw in q.neighbors(q_next).items():
            partner = mapping.get(nj)
            if partner is None:
                continue
            s = qw - g.weight_or_zero(vi, partner)
            if s > 0.0:
                added += s
                new_shortfalls[nj] = new_shortfalls.get(nj, 0.0) + s
        new_shortfalls[q_next] = added
        total = 0.0
        worst = 0.0
        for qj, vj in mapping.items():
            b = max(static_lb(qj, vj), new_shortfalls.get(qj, 0.0))
            total += b
            worst = b if b > worst else worst
        b = max(static_lb(q_next, vi), added)
        total += b
        worst = b if b > worst else worst
        if (total if is_sum else worst) > delta:
            return None
        return new_shortfalls

    start = min(qorder, key=lambda qj: (len(cands[qj]), qj))
    answers: set[Answer] = set()
    Entry = tuple[dict[int, int], set[int], int, dict[int, float]]
    stack: list[Entry] = []
    for vi in sorted_cands[start]:
        if not q_keywords[start] <= g.keyword_set(vi):
            continue
        if options.use_gnd:
            shortfalls = pair_bounds_after({}, {}, start, vi)
            if shortfalls is None:
                continue
        else:
            shortfalls = {}
        stack.append(({start: vi}, {vi}, q.num_vertices - 1, shortfalls))

    while stack:
        mapping, used, remaining, shortfalls = stack.pop()
        if remaining == 0:
            if stats is not None:
                stats.complete_mappings += 1
            if options.use_gnd:
                per_pair = [static_lb(qj, vi) for qj, vi in mapping.items()]
                if lb_gnd(per_pair, params.aggregate) > delta:
                    continue
            if stats is not None:
                stats.refined_mappings += 1
            score = gnd_score(q, g, mapping, params.aggregate)
            if score <= delta and g.is_connected_subset(mapping.values()):
                answers.add(Answer.from_mapping(mapping, score))
            continue

        q_next = pick_next(mapping)
        for vi in sorted_cands[q_next]:
            if vi in used:
                continue
            if not q_keywords[q_next] <= g.keyword_set(vi):
                continue
            if options.early_connect and not any(u in g.neighbors(vi) for u in used):
                continue
            if options.use_gnd:
                new_shortfalls = pair_bounds_after(mapping, shortfalls, q_next, vi)
                if new_shortfalls is None:
                    continue
            else:
                new_shortfalls = shortfalls
            stack.append(({**mapping, q_next: vi}, used | {vi}, remaining - 1, new_shortfalls))

    return answers


def s3gnd_query(
    g: Graph,
    ix: TreeIndex,
    q: Graph,
    table: EmbeddingTable,
    params: QueryParams,
    options: EngineOptions = EngineOptions(),
) -> tuple[set[Answer], QueryStats]:
    """Candidate retrieval plus refinement, with populated run statistics."""
    stats = QueryStats()
    started = time.perf_counter()
    cands = retrieve_candidates(g, ix, q, table, params, options, stats)
    answers = refine(g, q, cands, params, options, stats)
    stats.wall_time = time.perf_counter() - started
    stats.candidates_total = sum(len(c) for c in cands.values())
    stats.pruning_power = 1.0 - stats.candidates_total / (q.num_vertices * g.num_vertices)
    stats.answers = len(answers)
    return answers, stats
