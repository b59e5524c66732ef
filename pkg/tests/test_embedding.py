import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gndsearch.embedding import (
    EMPTY_SET_MBR,
    EPSILON,
    LOG_EPSILON,
    EmbeddingTable,
    Mbr,
    area_expansion,
    fallback_embeddings,
    load_embeddings,
    mbr_contains,
    mbr_intersect,
    mbr_log_area,
    mbr_union,
)
from gndsearch.errors import (
    DimensionMismatchError,
    GndSearchError,
    UnknownKeywordError,
)


def box(lo, hi):
    return Mbr(np.array(lo, float), np.array(hi, float))


def test_load_embeddings(tmp_path):
    path = tmp_path / "emb.txt"
    path.write_text("emb 2\na 0.0 1.0\nb 2.5 -1.0\n")
    t = load_embeddings(path)
    assert t.dim == 2
    assert list(t.vector("a")) == [0.0, 1.0]
    with pytest.raises(UnknownKeywordError):
        t.vector("zzz")


def test_load_embeddings_errors(tmp_path):
    bad_arity = tmp_path / "a.txt"
    bad_arity.write_text("emb 2\na 0.0 1.0 2.0\n")
    with pytest.raises(GndSearchError):
        load_embeddings(bad_arity)
    dup = tmp_path / "b.txt"
    dup.write_text("emb 2\na 0 1\na 1 2\n")
    with pytest.raises(GndSearchError):
        load_embeddings(dup)
    inf = tmp_path / "c.txt"
    inf.write_text("emb 2\na inf 1\n")
    with pytest.raises(GndSearchError):
        load_embeddings(inf)


def test_embedding_roundtrip_is_bit_exact(tmp_path):
    rng = np.random.default_rng(3)
    vectors = {f"k{i}": rng.normal(size=5) for i in range(20)}
    t = EmbeddingTable(5, {k: v.copy() for k, v in vectors.items()})
    t.save(tmp_path / "e.txt")
    back = load_embeddings(tmp_path / "e.txt")
    for k, v in vectors.items():
        assert np.array_equal(back.vector(k), v)
    assert back.fingerprint() == t.fingerprint()


def test_fallback_determinism():
    t1 = fallback_embeddings({"x", "y"}, 4, 11)
    t2 = fallback_embeddings({"y", "x"}, 4, 11)
    assert np.array_equal(t1.vector("x"), t2.vector("x"))
    assert np.array_equal(t1.vector("unseen"), t2.vector("unseen"))
    assert t1.fingerprint() == t2.fingerprint()
    t3 = fallback_embeddings({"x"}, 4, 12)
    assert not np.array_equal(t1.vector("x"), t3.vector("x"))
    assert t1.fingerprint() != t3.fingerprint()


def test_fallback_distinct_and_shapes():
    t = fallback_embeddings({"a"}, 2, 0)
    assert t.vector("a").shape == (2,)
    assert not np.array_equal(t.vector("a"), t.vector("b"))
    big = fallback_embeddings(set(), 19, 5)
    v = big.vector("tok")
    assert v.shape == (19,) and np.isfinite(v).all()


def test_mbr_of_keyword_set(tmp_path):
    t = EmbeddingTable(2, {"a": np.array([0.0, 0.0]), "b": np.array([1.0, 2.0])})
    m = t.mbr_of_keyword_set({"a", "b"})
    assert m == box([0, 0], [1, 2])
    point = t.mbr_of_keyword_set({"b"})
    assert point == box([1, 2], [1, 2])
    assert t.mbr_of_keyword_set(set()) is EMPTY_SET_MBR
    with pytest.raises(UnknownKeywordError):
        t.mbr_of_keyword_set({"nope"})


def test_contains_basics():
    unit = box([0, 0], [1, 1])
    assert mbr_contains(unit, unit)
    assert mbr_contains(unit, box([0.5, 0.5], [0.5, 0.5]))
    assert not mbr_contains(unit, box([0.5, 0.5], [1.5, 0.6]))
    assert mbr_contains(unit, EMPTY_SET_MBR)
    assert not mbr_contains(EMPTY_SET_MBR, unit)
    assert mbr_contains(EMPTY_SET_MBR, EMPTY_SET_MBR)
    with pytest.raises(DimensionMismatchError):
        mbr_contains(unit, box([0], [1]))


def test_subset_keyword_sets_give_contained_boxes():
    rng = random.Random(99)
    for _ in range(200):
        dim = rng.randint(2, 5)
        t = fallback_embeddings(set(), dim, rng.randint(0, 1000))
        universe = [f"k{i}" for i in range(8)]
        a = set(rng.sample(universe, rng.randint(0, 6)))
        b = a | set(rng.sample(universe, rng.randint(0, 6)))
        assert mbr_contains(t.mbr_of_keyword_set(b), t.mbr_of_keyword_set(a))


def test_intersect():
    m = box([0, 0], [2, 2])
    assert mbr_intersect(m, m) == m
    assert mbr_intersect(m, box([3, 0], [4, 1])) is None
    assert mbr_intersect(m, box([1, 1], [3, 3])) == box([1, 1], [2, 2])
    assert mbr_intersect(m, EMPTY_SET_MBR) is None


def test_log_area_values():
    assert mbr_log_area(box([0, 0], [1, 1])) == pytest.approx(0.0, abs=1e-5)
    e = math.e
    assert mbr_log_area(box([0, 0], [e, e])) == pytest.approx(2.0, abs=1e-5)
    assert mbr_log_area(box([3, 4], [3, 4])) == 2 * LOG_EPSILON
    with pytest.raises(GndSearchError):
        mbr_log_area(EMPTY_SET_MBR)


def test_union():
    m = box([0, 0], [1, 1])
    assert mbr_union(m, m) == m
    assert mbr_union(box([0, 0], [0, 0]), box([1, 1], [1, 1])) == box([0, 0], [1, 1])
    assert mbr_union(m, EMPTY_SET_MBR) == m
    assert mbr_union(EMPTY_SET_MBR, m) == m


def test_area_expansion():
    center = box([0, 0], [1, 1])
    assert area_expansion(center, box([0.2, 0.2], [0.8, 0.8])) == 0.0
    assert area_expansion(center, center) == 0.0
    # union grows to [0,2]x[0,1]: the log-area ratio is log 2
    grown = area_expansion(center, box([2, 0], [2, 0]))
    assert grown == pytest.approx(math.log(2.0), abs=1e-5)
    # independent check through raw side lengths
    expected = (math.log(2 + EPSILON) + math.log(1 + EPSILON)) - 2 * math.log(1 + EPSILON)
    assert grown == pytest.approx(expected, abs=0.0)
    assert area_expansion(center, EMPTY_SET_MBR) == 0.0
    cand = box([1, 1], [2, 3])
    assert area_expansion(EMPTY_SET_MBR, cand) == pytest.approx(
        mbr_log_area(cand) - 2 * LOG_EPSILON
    )


boxes_st = st.builds(
    lambda lows, sides: box(lows, [lo + s for lo, s in zip(lows, sides)]),
    st.lists(st.floats(-50, 50), min_size=2, max_size=2),
    st.lists(st.floats(0, 50), min_size=2, max_size=2),
)


@settings(max_examples=80)
@given(boxes_st, boxes_st, boxes_st)
def test_union_algebra(a, b, c):
    assert mbr_union(a, b) == mbr_union(b, a)
    assert mbr_union(a, mbr_union(b, c)) == mbr_union(mbr_union(a, b), c)
    assert mbr_union(a, a) == a
    assert mbr_log_area(mbr_union(a, b)) >= max(mbr_log_area(a), mbr_log_area(b))
    inter = mbr_intersect(a, b)
    if inter is not None:
        assert mbr_contains(a, inter) and mbr_contains(b, inter)


@settings(max_examples=80)
@given(boxes_st, boxes_st, boxes_st)
def test_containment_partial_order(a, b, c):
    assert mbr_contains(a, a)
    if mbr_contains(a, b) and mbr_contains(b, a):
        assert a == b
    if mbr_contains(a, b) and mbr_contains(b, c):
        assert mbr_contains(a, c)
