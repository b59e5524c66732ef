"""Synthetic benchmark graphs (small-world) and query workload extraction.

Graphs follow the Newman-Watts-Strogatz construction: a ring lattice where
every vertex connects to its ring_k nearest ring neighbors, plus random
shortcuts added with a fixed probability and no edge removal. Keywords are
drawn per vertex from a fixed-size domain under a uniform, ranked-Gaussian,
or Zipf distribution; weights are uniform integers.

Queries are connected subgraphs extracted by random walk, with per-keyword
and per-non-tree-edge subsampling; a spanning tree is always kept so every
query stays connected.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass

import networkx as nx

from .errors import GndSearchError
from .graph import Graph, validate_query_graph

# Benchmark defaults; bold values of the evaluation parameter table.
DEFAULT_DELTA_MAX = 1.0
DEFAULT_DELTA_SUM = 3.0
DEFAULT_KW_PER_VERTEX = 3
DEFAULT_SIGMA_SIZE = 50
DEFAULT_QUERY_SIZE = 5
DEFAULT_GRAPH_SIZE = 50_000
DEFAULT_WEIGHT_RANGE = (1, 5)
DEFAULT_KW_SAMPLE_RATE = 0.9
DEFAULT_EDGE_SAMPLE_RATE = 0.7
DEFAULT_QUERIES_PER_WORKLOAD = 50


class KeywordDist(enum.Enum):
    UNIFORM = "uniform"
    GAUSSIAN = "gaussian"
    ZIPF = "zipf"

    @classmethod
    def parse(cls, token: str) -> "KeywordDist":
        try:
            return cls(token.lower())
        except ValueError:
            raise ValueError(f"unknown keyword distribution {token!r}") from None


@dataclass(frozen=True)
class SynthConfig:
    n: int = DEFAULT_GRAPH_SIZE
    ring_k: int = 4
    p_shortcut: float = 0.1
    sigma_size: int = DEFAULT_SIGMA_SIZE
    kw_per_vertex: int = DEFAULT_KW_PER_VERTEX
    kw_dist: KeywordDist = KeywordDist.UNIFORM
    weight_range: tuple[int, int] = DEFAULT_WEIGHT_RANGE
    seed: int = 0

    def __post_init__(self):
        if self.n < 3:
            raise GndSearchError(f"need at least 3 vertices, got {self.n}")
        if not 0.0 <= self.p_shortcut <= 1.0:
            raise GndSearchError(f"shortcut probability out of [0, 1]: {self.p_shortcut}")
        if not 0 <= self.kw_per_vertex <= self.sigma_size:
            raise GndSearchError(
                f"keywords per vertex ({self.kw_per_vertex}) exceeds domain size "
                f"({self.sigma_size})"
            )
        lo, hi = self.weight_range
        if lo < 1 or hi < lo:
            raise GndSearchError(f"bad integer weight range: {self.weight_range}")


@dataclass(frozen=True)
class QueryGenConfig:
    qsize: int = DEFAULT_QUERY_SIZE
    kw_sample_rate: float = DEFAULT_KW_SAMPLE_RATE
    edge_sample_rate: float = DEFAULT_EDGE_SAMPLE_RATE
    seed: int = 0

    def __post_init__(self):
        if self.qsize < 2:
            raise GndSearchError(f"query size must be >= 2, got {self.qsize}")
        for name, rate in (("kw", self.kw_sample_rate), ("edge", self.edge_sample_rate)):
            if not 0.0 < rate <= 1.0:
                raise GndSearchError(f"{name} sampling rate out of (0, 1]: {rate}")


def _keyword_sampler(cfg: SynthConfig, rng: random.Random):
    """Draw kw_per_vertex distinct ranked keywords under the configured law."""
    sigma = cfg.sigma_size
    if cfg.kw_dist is KeywordDist.UNIFORM:
        def draw() -> int:
            return rng.randrange(sigma)
    elif cfg.kw_dist is KeywordDist.GAUSSIAN:
        mu, stddev = (sigma - 1) / 2.0, sigma / 6.0

        def draw() -> int:
            return min(sigma - 1, max(0, round(rng.gauss(mu, stddev))))
    else:
        inv_ranks = [1.0 / (i + 1) for i in range(sigma)]  # Zipf exponent 1.0

        def draw() -> int:
            return rng.choices(range(sigma), weights=inv_ranks, k=1)[0]

    def sample() -> set[int]:
        chosen: set[int] = set()
        while len(chosen) < cfg.kw_per_vertex:
            chosen.add(draw())
        return chosen

    return sample


def gen_synthetic(cfg: SynthConfig) -> Graph:
    """Small-world data graph, reproducible bit-for-bit from the config."""
    structure = nx.newman_watts_strogatz_graph(
        cfg.n, cfg.ring_k, cfg.p_shortcut, seed=cfg.seed
    )
    kw_rng = random.Random(f"synth-keywords:{cfg.seed}")
    w_rng = random.Random(f"synth-weights:{cfg.seed}")
    sample_keywords = _keyword_sampler(cfg, kw_rng)

    keywords = {
        v: [f"kw{i}" for i in sorted(sample_keywords())] for v in sorted(structure.nodes)
    }
    lo, hi = cfg.weight_range
    edges = [
        (u, v, float(w_rng.randint(lo, hi)))
        for u, v in sorted((min(e), max(e)) for e in structure.edges)
    ]
    return Graph(keywords, edges, sigma_size=cfg.sigma_size)


def _random_walk_vertices(g: Graph, qsize: int, rng: random.Random) -> set[int]:
    vertices = sorted(g.vertices)
    max_steps = 100 * qsize
    for _ in range(50):
        current = rng.choice(vertices)
        visited = {current}
        for _ in range(max_steps):
            if len(visited) == qsize:
                return visited
            nbrs = sorted(g.neighbors(current))
            if not nbrs:
                break
            current = rng.choice(nbrs)
            visited.add(current)
        if len(visited) == qsize:
            return visited
    raise GndSearchError(
        f"random walk failed to collect {qsize} distinct vertices; graph too sparse?"
    )


def _spanning_tree_edges(g: Graph, vs: set[int]) -> set[tuple[int, int]]:
    """Deterministic BFS tree inside the induced subgraph on ``vs``."""
    start = min(vs)
    seen = {start}
    tree: set[tuple[int, int]] = set()
    frontier = [start]
    while frontier:
        u = frontier.pop(0)
        for v in sorted(g.neighbors(u)):
            if v in vs and v not in seen:
                seen.add(v)
                tree.add((min(u, v), max(u, v)))
                frontier.append(v)
    return tree


def gen_queries(g: Graph, cfg: QueryGenConfig, count: int) -> list[Graph]:
    """Extract ``count`` connected query graphs, deterministic per seed."""
    queries = []
    for i in range(count):
        rng = random.Random(f"query-gen:{cfg.seed}:{i}")
        vs = _random_walk_vertices(g, cfg.qsize, rng)
        tree = _spanning_tree_edges(g, vs)
        keywords = {}
        for v in sorted(vs):
            kept = [k for k in sorted(g.keyword_set(v)) if rng.random() < cfg.kw_sample_rate]
            keywords[v] = kept
        edges = []
        for u, v, w in g.induced_subgraph(vs).edges():
            if (u, v) in tree or rng.random() < cfg.edge_sample_rate:
                edges.append((u, v, w))
        queries.append(validate_query_graph(Graph(keywords, edges, sigma_size=g.sigma_size)))
    return queries


def default_delta(aggregate_token: str) -> float:
    return DEFAULT_DELTA_MAX if aggregate_token.lower() == "max" else DEFAULT_DELTA_SUM
