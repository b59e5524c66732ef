import collections

import pytest

from gndsearch.errors import GndSearchError
from gndsearch.graph import save_graph
from gndsearch.semantics import Aggregate, QueryParams, is_answer
from gndsearch.workload import (
    DEFAULT_DELTA_MAX,
    DEFAULT_DELTA_SUM,
    DEFAULT_EDGE_SAMPLE_RATE,
    DEFAULT_GRAPH_SIZE,
    DEFAULT_KW_PER_VERTEX,
    DEFAULT_KW_SAMPLE_RATE,
    DEFAULT_QUERY_SIZE,
    DEFAULT_SIGMA_SIZE,
    KeywordDist,
    QueryGenConfig,
    SynthConfig,
    gen_queries,
    gen_synthetic,
)


def test_benchmark_defaults_match_parameter_table():
    assert DEFAULT_DELTA_MAX == 1.0
    assert DEFAULT_DELTA_SUM == 3.0
    assert DEFAULT_KW_PER_VERTEX == 3
    assert DEFAULT_SIGMA_SIZE == 50
    assert DEFAULT_QUERY_SIZE == 5
    assert DEFAULT_GRAPH_SIZE == 50_000
    assert DEFAULT_KW_SAMPLE_RATE == 0.9
    assert DEFAULT_EDGE_SAMPLE_RATE == 0.7


def test_pure_ring_is_connected():
    g = gen_synthetic(SynthConfig(n=30, ring_k=4, p_shortcut=0.0, sigma_size=6, kw_per_vertex=1, seed=1))
    assert g.is_connected()
    # ring lattice degree: each vertex links to its ring_k nearest neighbors
    assert g.num_edges == 30 * 4 // 2


def test_generation_deterministic():
    cfg = SynthConfig(n=60, sigma_size=10, kw_per_vertex=2, seed=42)
    assert gen_synthetic(cfg) == gen_synthetic(cfg)
    other = gen_synthetic(SynthConfig(n=60, sigma_size=10, kw_per_vertex=2, seed=43))
    assert gen_synthetic(cfg) != other


def test_keyword_count_and_weights():
    cfg = SynthConfig(n=100, sigma_size=12, kw_per_vertex=3, weight_range=(2, 4), seed=0)
    g = gen_synthetic(cfg)
    for v in g.vertices:
        assert len(g.keyword_set(v)) == 3
    for _, _, w in g.edges():
        assert w in (2.0, 3.0, 4.0)
    assert len(g.keyword_domain()) <= 12


def test_uniform_keywords_chi_square():
    cfg = SynthConfig(n=2000, sigma_size=10, kw_per_vertex=1, seed=7)
    g = gen_synthetic(cfg)
    counts = collections.Counter()
    for v in g.vertices:
        counts.update(g.keyword_set(v))
    expected = 2000 / 10
    chi2 = sum((counts[f"kw{i}"] - expected) ** 2 / expected for i in range(10))
    # 9 dof; 27.9 is the 0.1% tail
    assert chi2 < 27.9


def test_gaussian_and_zipf_shapes():
    gau = gen_synthetic(
        SynthConfig(n=1500, sigma_size=20, kw_per_vertex=1, kw_dist=KeywordDist.GAUSSIAN, seed=3)
    )
    counts = collections.Counter()
    for v in gau.vertices:
        counts.update(gau.keyword_set(v))
    middle = sum(counts[f"kw{i}"] for i in range(8, 12))
    edges_mass = sum(counts[f"kw{i}"] for i in (0, 1, 18, 19))
    assert middle > edges_mass  # mass concentrates at the ranked center

    zipf = gen_synthetic(
        SynthConfig(n=1500, sigma_size=20, kw_per_vertex=1, kw_dist=KeywordDist.ZIPF, seed=3)
    )
    zcounts = collections.Counter()
    for v in zipf.vertices:
        zcounts.update(zipf.keyword_set(v))
    assert zcounts["kw0"] > zcounts["kw10"] > 0


def test_invalid_configs():
    with pytest.raises(GndSearchError):
        SynthConfig(n=2)
    with pytest.raises(GndSearchError):
        SynthConfig(n=10, p_shortcut=1.5)
    with pytest.raises(GndSearchError):
        SynthConfig(n=10, sigma_size=3, kw_per_vertex=5)
    with pytest.raises(GndSearchError):
        SynthConfig(n=10, weight_range=(0, 3))
    with pytest.raises(GndSearchError):
        QueryGenConfig(qsize=1)
    with pytest.raises(GndSearchError):
        QueryGenConfig(kw_sample_rate=0.0)


def test_queries_are_connected_subsets():
    g = gen_synthetic(SynthConfig(n=120, sigma_size=10, kw_per_vertex=2, seed=9))
    queries = gen_queries(g, QueryGenConfig(qsize=4, seed=9), 10)
    assert len(queries) == 10
    for q in queries:
        assert q.num_vertices == 4
        assert q.is_connected()
        assert q.vertices <= g.vertices
        for v in q.vertices:
            assert q.keyword_set(v) <= g.keyword_set(v)
        for u, v, w in q.edges():
            assert g.neighbors(u)[v] == w


def test_full_rate_query_self_matches():
    g = gen_synthetic(SynthConfig(n=80, sigma_size=10, kw_per_vertex=2, seed=5))
    cfg = QueryGenConfig(qsize=3, kw_sample_rate=1.0, edge_sample_rate=1.0, seed=5)
    (q,) = gen_queries(g, cfg, 1)
    identity = {v: v for v in q.vertices}
    assert is_answer(q, g, identity, QueryParams(0.0, Aggregate.SUM))


def test_qsize_two_single_edge():
    g = gen_synthetic(SynthConfig(n=50, sigma_size=6, kw_per_vertex=1, seed=2))
    queries = gen_queries(g, QueryGenConfig(qsize=2, seed=2), 5)
    for q in queries:
        assert q.num_vertices == 2
        assert q.num_edges == 1


def test_query_workload_deterministic():
    g = gen_synthetic(SynthConfig(n=100, sigma_size=10, kw_per_vertex=2, seed=4))
    a = gen_queries(g, QueryGenConfig(qsize=3, seed=6), 8)
    b = gen_queries(g, QueryGenConfig(qsize=3, seed=6), 8)
    assert a == b


def test_generated_files_roundtrip(tmp_path):
    from gndsearch.graph import load_graph

    g = gen_synthetic(SynthConfig(n=40, sigma_size=8, kw_per_vertex=2, seed=11))
    save_graph(g, tmp_path / "g.txt")
    assert load_graph(tmp_path / "g.txt") == g
    (q,) = gen_queries(g, QueryGenConfig(qsize=3, seed=11), 1)
    save_graph(q, tmp_path / "q.txt")
    assert load_graph(tmp_path / "q.txt", kind="query") == q
