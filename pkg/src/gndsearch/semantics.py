"""Exact neighbor-difference scoring, the answer predicate, and a brute-force oracle.

The neighbor difference of a matched pair (qj, vi) charges, for every query
neighbor nj of qj, the shortfall max{w(qj,nj) - w(vi, M(nj)), 0}; a missing
data edge reads weight 0. The graph-level score aggregates per-pair values
with MAX or SUM and is compared inclusively against the threshold.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path

from .errors import MappingError, OracleCapError
from .graph import Graph

Mapping_ = dict[int, int]


class Aggregate(enum.Enum):
    MAX = "max"
    SUM = "sum"

    def apply(self, values: list[float]) -> float:
        if not values:
            raise ValueError("aggregate of an empty collection")
        return max(values) if self is Aggregate.MAX else sum(values)

    @classmethod
    def parse(cls, token: str) -> "Aggregate":
        try:
            return cls(token.lower())
        except ValueError:
            raise ValueError(f"unknown aggregate {token!r}; expected 'max' or 'sum'") from None


@dataclass(frozen=True)
class QueryParams:
    """Threshold and aggregate of one query."""

    delta: float
    aggregate: Aggregate

    def __post_init__(self):
        if self.delta < 0:
            raise ValueError(f"threshold must be non-negative, got {self.delta}")


@dataclass(frozen=True, order=True)
class Answer:
    """One matching: the mapping (sorted by query vertex id) and its exact score."""

    sort_index: tuple = field(init=False, repr=False)
    mapping: tuple[tuple[int, int], ...]
    gnd: float

    def __post_init__(self):
        object.__setattr__(self, "sort_index", (self.gnd, self.vertex_tuple(), self.mapping))

    @property
    def vertex_set(self) -> frozenset[int]:
        return frozenset(v for _, v in self.mapping)

    def vertex_tuple(self) -> tuple[int, ...]:
        return tuple(sorted(v for _, v in self.mapping))

    def as_dict(self) -> Mapping_:
        return dict(self.mapping)

    @staticmethod
    def from_mapping(mapping: Mapping_, gnd: float) -> "Answer":
        return Answer(mapping=tuple(sorted(mapping.items())), gnd=gnd)


def _check_mapping(q: Graph, mapping: Mapping_) -> None:
    if set(mapping) != q.vertices:
        raise MappingError("mapping must be total over the query vertex set")
    if len(set(mapping.values())) != len(mapping):
        raise MappingError("mapping must be injective")


def nd_score(q: Graph, qj: int, g: Graph, vi: int, mapping: Mapping_) -> float:
    """Neighbor difference of the matched pair (qj, vi) under ``mapping``."""
    _check_mapping(q, mapping)
    if mapping.get(qj) != vi:
        raise MappingError(f"mapping sends {qj} to {mapping.get(qj)}, not {vi}")
    total = 0.0
    for nj, qw in q.neighbors(qj).items():
        total += max(qw - g.weight_or_zero(vi, mapping[nj]), 0.0)
    return total


def gnd_score(q: Graph, g: Graph, mapping: Mapping_, aggregate: Aggregate) -> float:
    """Aggregate of per-pair neighbor differences over the whole mapping."""
    _check_mapping(q, mapping)
    per_pair = [nd_score(q, qj, g, vi, mapping) for qj, vi in mapping.items()]
    return aggregate.apply(per_pair)


def is_answer(q: Graph, g: Graph, mapping: Mapping_, params: QueryParams) -> bool:
    """Keyword containment on every pair, score within threshold, connected image."""
    _check_mapping(q, mapping)
    for qj, vi in mapping.items():
        if not q.keyword_set(qj) <= g.keyword_set(vi):
            return False
    if gnd_score(q, g, mapping, params.aggregate) > params.delta:
        return False
    return g.is_connected_subset(mapping.values())


# -- brute-force oracle ------------------------------------------------------


def _connected_ksubsets(g: Graph, k: int):
    """Yield every connected k-vertex subset exactly once (ESU enumeration)."""
    adj = {v: sorted(g.neighbors(v)) for v in sorted(g.vertices)}

    def extend(sub: list[int], ext: list[int], root: int):
        if len(sub) == k:
            yield tuple(sub)
            return
        seen = set(sub)
        while ext:
            w = ext.pop()
            # exclusive extension: only strictly-new neighbors of w may join,
            # which guarantees each subset is generated once
            blocked = set(ext) | seen
            new_ext = ext + [
                u
                for u in adj[w]
                if u > root and u not in blocked and not any(u in g.neighbors(s) for s in sub)
            ]
            yield from extend(sub + [w], new_ext, root)

    for root in adj:
        initial = [u for u in adj[root] if u > root]
        yield from extend([root], initial, root)


def _compatible(q: Graph, g: Graph, subset: tuple[int, ...]) -> dict[int, list[int]]:
    """Per query vertex, the subset members satisfying keyword containment."""
    cands: dict[int, list[int]] = {}
    for qj in sorted(q.vertices):
        qk = q.keyword_set(qj)
        cands[qj] = [v for v in subset if qk <= g.keyword_set(v)]
    return cands


def brute_force_s3gnd(
    g: Graph, q: Graph, params: QueryParams, cap: int = 500
) -> list[Answer]:
    """Reference answer set by exhaustive enumeration.

    Enumerates every connected vertex subset of query size, then every
    injective keyword-compatible assignment onto it, and keeps mappings whose
    exact score passes the threshold. Deterministic output order:
    (sorted vertex set, mapping).
    """
    if g.num_vertices > cap:
        raise OracleCapError(
            f"graph has {g.num_vertices} vertices, above the oracle cap {cap}"
        )
    k = q.num_vertices
    qorder = sorted(q.vertices)
    answers: list[Answer] = []

    for subset in _connected_ksubsets(g, k):
        cands = _compatible(q, g, subset)
        if any(not cands[qj] for qj in qorder):
            continue

        def assign(idx: int, mapping: Mapping_, used: set[int]):
            if idx == k:
                score = gnd_score(q, g, mapping, params.aggregate)
                if score <= params.delta:
                    answers.append(Answer.from_mapping(mapping, score))
                return
            qj = qorder[idx]
            for v in cands[qj]:
                if v not in used:
                    mapping[qj] = v
                    used.add(v)
                    assign(idx + 1, mapping, used)
                    del mapping[qj]
                    used.remove(v)

        assign(0, {}, set())

    answers.sort(key=lambda a: (a.vertex_tuple(), a.mapping))
    return answers


# -- answer stream -----------------------------------------------------------


def format_answer(answer: Answer) -> str:
    gnd = answer.gnd
    gnd_str = str(int(gnd)) if gnd == int(gnd) else repr(gnd)
    pairs = " ".join(f"{qj}:{vi}" for qj, vi in answer.mapping)
    return f"a {gnd_str} {pairs}"


def write_answers(answers: list[Answer], path: str | Path) -> None:
    ordered = sorted(answers)
    lines = [format_answer(a) for a in ordered]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def dedupe_answers(answers: list[Answer]) -> list[Answer]:
    """Keep one answer per vertex set: minimum score, ties by mapping order."""
    best: dict[tuple[int, ...], Answer] = {}
    for a in sorted(answers, key=lambda a: (a.gnd, a.mapping)):
        best.setdefault(a.vertex_tuple(), a)
    return sorted(best.values())
