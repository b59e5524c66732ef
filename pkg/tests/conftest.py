import itertools
import random

import pytest

from gndsearch.graph import Graph
from gndsearch.semantics import Answer, QueryParams, gnd_score, is_answer


@pytest.fixture
def toy_graph() -> Graph:
    """Five vertices over four keywords; two vertices share one keyword set."""
    return Graph(
        keywords={
            1: {"k1", "k2", "k3", "k4"},
            2: {"k1", "k2"},
            3: {"k2", "k3", "k4"},
            4: {"k3", "k4"},
            5: {"k2", "k3", "k4"},
        },
        edges=[(1, 2, 1.0), (2, 3, 2.0), (3, 4, 1.0), (4, 5, 3.0), (5, 1, 2.0)],
    )


@pytest.fixture
def hand6_graph() -> Graph:
    return Graph(
        keywords={1: {"a"}, 2: {"a", "b"}, 3: {"b"}, 4: {"a"}, 5: {"b", "c"}, 6: {"c"}},
        edges=[
            (1, 2, 5.0),
            (2, 3, 3.0),
            (3, 4, 2.0),
            (4, 5, 4.0),
            (5, 6, 1.0),
            (2, 5, 2.0),
            (1, 3, 1.0),
        ],
    )


@pytest.fixture
def hand3_query() -> Graph:
    return Graph(
        keywords={0: {"a"}, 1: {"b"}, 2: {"c"}},
        edges=[(0, 1, 4.0), (1, 2, 1.0)],
    )


def naive_s3gnd(g: Graph, q: Graph, params: QueryParams) -> list[Answer]:
    """Second, fully naive enumerator: all subsets x all permutations."""
    qorder = sorted(q.vertices)
    k = len(qorder)
    answers = []
    for subset in itertools.combinations(sorted(g.vertices), k):
        for perm in itertools.permutations(subset):
            mapping = dict(zip(qorder, perm))
            if is_answer(q, g, mapping, params):
                score = gnd_score(q, g, mapping, params.aggregate)
                answers.append(Answer.from_mapping(mapping, score))
    answers.sort(key=lambda a: (a.vertex_tuple(), a.mapping))
    return answers


def random_small_graph(rng: random.Random, n: int, sigma: int = 5, max_kw: int = 2) -> Graph:
    """Connected-ish random graph for randomized trials."""
    alphabet = [f"w{i}" for i in range(sigma)]
    keywords = {
        v: rng.sample(alphabet, rng.randint(0, max_kw)) for v in range(n)
    }
    edges = []
    seen = set()
    for v in range(1, n):
        u = rng.randrange(v)
        seen.add((u, v))
        edges.append((u, v, float(rng.randint(1, 5))))
    extra = rng.randint(0, n)
    for _ in range(extra):
        u, v = rng.randrange(n), rng.randrange(n)
        if u == v:
            continue
        key = (min(u, v), max(u, v))
        if key in seen:
            continue
        seen.add(key)
        edges.append((key[0], key[1], float(rng.randint(1, 5))))
    return Graph(keywords, edges)


def random_query_from(g: Graph, rng: random.Random, k: int) -> Graph:
    """Connected k-vertex query sampled from g with perturbed weights/keywords."""
    vertices = sorted(g.vertices)
    for _ in range(200):
        current = rng.choice(vertices)
        visited = {current}
        for _ in range(40 * k):
            nbrs = sorted(g.neighbors(current))
            if not nbrs:
                break
            current = rng.choice(nbrs)
            visited.add(current)
            if len(visited) == k:
                break
        if len(visited) == k:
            break
    else:
        raise RuntimeError("could not sample a connected query")
    sub = g.induced_subgraph(visited)
    keywords = {
        v: [kw for kw in sorted(sub.keyword_set(v)) if rng.random() < 0.8]
        for v in sorted(visited)
    }
    edges = []
    for u, v, w in sub.edges():
        jitter = rng.choice([-1.0, 0.0, 0.0, 1.0])
        edges.append((u, v, max(w + jitter, 1.0)))
    return Graph(keywords, edges)
