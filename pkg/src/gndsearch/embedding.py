"""Keyword embedding tables and the axis-aligned box geometry built on them.

Boxes ("MBRs") minimally enclose the embedding vectors of a keyword set.
Because min/max extrema are monotone under set union, a subset keyword set
always yields a contained box for *any* table, which is what makes box
containment a sound keyword-containment filter. The empty keyword set maps
to a distinguished sentinel contained in every box.

Areas are measured on a log scale throughout: sum of log(side + EPSILON),
with EPSILON guarding degenerate zero-width sides.
"""

from __future__ import annotations

import hashlib
import math
from collections.abc import Iterable
from pathlib import Path

import numpy as np

from .errors import DimensionMismatchError, GndSearchError, UnknownKeywordError

EPSILON = 1e-6
LOG_EPSILON = math.log(EPSILON)


class Mbr:
    """Axis-aligned box: component-wise bounds, or the empty-set sentinel."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi):
        lo = np.asarray(lo, dtype=np.float64)
        hi = np.asarray(hi, dtype=np.float64)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise DimensionMismatchError("bounds must be 1-d vectors of equal length")
        if not (np.isfinite(lo).all() and np.isfinite(hi).all()):
            raise GndSearchError("non-finite box bounds")
        if (lo > hi).any():
            raise GndSearchError("lower bound exceeds upper bound")
        lo.setflags(write=False)
        hi.setflags(write=False)
        self.lo = lo
        self.hi = hi

    @property
    def is_empty(self) -> bool:
        return self.lo is None

    @property
    def dim(self) -> int:
        return 0 if self.is_empty else len(self.lo)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Mbr):
            return NotImplemented
        if self.is_empty or other.is_empty:
            return self.is_empty and other.is_empty
        return np.array_equal(self.lo, other.lo) and np.array_equal(self.hi, other.hi)

    def __hash__(self) -> int:
        if self.is_empty:
            return hash("empty-mbr")
        return hash((self.lo.tobytes(), self.hi.tobytes()))

    def __repr__(self) -> str:
        if self.is_empty:
            return "Mbr(EMPTY)"
        return f"Mbr(lo={self.lo.tolist()}, hi={self.hi.tolist()})"


def _make_empty() -> Mbr:
    m = Mbr.__new__(Mbr)
    m.lo = None
    m.hi = None
    return m


#: Box of the empty keyword set: contained in everything, contains nothing.
EMPTY_SET_MBR = _make_empty()


def _check_dims(a: Mbr, b: Mbr) -> None:
    if a.dim != b.dim:
        raise DimensionMismatchError(f"box dimensions differ: {a.dim} vs {b.dim}")


def mbr_contains(outer: Mbr, inner: Mbr) -> bool:
    """Exact containment test; no tolerance, extrema of subsets are bit-identical."""
    if inner.is_empty:
        return True
    if outer.is_empty:
        return False
    _check_dims(outer, inner)
    return bool((outer.lo <= inner.lo).all() and (inner.hi <= outer.hi).all())


def mbr_intersect(a: Mbr, b: Mbr) -> Mbr | None:
    """Common box, or None when disjoint on some axis; sentinels intersect to nothing."""
    if a.is_empty or b.is_empty:
        return None
    _check_dims(a, b)
    lo = np.maximum(a.lo, b.lo)
    hi = np.minimum(a.hi, b.hi)
    if (lo > hi).any():
        return None
    return Mbr(lo, hi)


def mbr_union(a: Mbr, b: Mbr) -> Mbr:
    if a.is_empty:
        return b
    if b.is_empty:
        return a
    _check_dims(a, b)
    return Mbr(np.minimum(a.lo, b.lo), np.maximum(a.hi, b.hi))


def mbr_log_area(m: Mbr) -> float:
    if m.is_empty:
        raise GndSearchError("log-area of the empty-set sentinel is undefined")
    return float(np.log(m.hi - m.lo + EPSILON).sum())


def area_expansion(center: Mbr, candidate: Mbr) -> float:
    """Log-area growth of ``center`` when it absorbs ``candidate``; >= 0."""
    if candidate.is_empty:
        return 0.0
    if center.is_empty:
        # an empty center carries the point-box log-area floor
        return max(mbr_log_area(candidate) - candidate.dim * LOG_EPSILON, 0.0)
    _check_dims(center, candidate)
    return max(mbr_log_area(mbr_union(center, candidate)) - mbr_log_area(center), 0.0)


def mbr_of_points(points: np.ndarray) -> Mbr:
    points = np.asarray(points, dtype=np.float64)
    return Mbr(points.min(axis=0), points.max(axis=0))


# -- embedding tables ---------------------------------------------------------


def _hash_vector(token: str, dim: int, seed: int) -> np.ndarray:
    """Deterministic, platform-independent vector in [0, 1)^dim from the token."""
    out = np.empty(dim, dtype=np.float64)
    filled = 0
    block = 0
    while filled < dim:
        digest = hashlib.blake2b(
            f"{seed}\x1f{token}\x1f{block}".encode(), digest_size=64
        ).digest()
        words = np.frombuffer(digest, dtype="<u8").astype(np.float64) / 2.0**64
        take = min(dim - filled, len(words))
        out[filled : filled + take] = words[:take]
        filled += take
        block += 1
    out.setflags(write=False)
    return out


class EmbeddingTable:
    """Keyword -> d-dimensional vector map, file-backed or hash-derived.

    A file-backed table has a fixed keyword domain; lookups outside it fail.
    A fallback table derives any keyword's vector from a seeded hash, so its
    domain is unbounded and its fingerprint is a parameter marker.
    """

    def __init__(self, dim: int, vectors: dict[str, np.ndarray], fallback_seed: int | None = None):
        if dim < 1:
            raise GndSearchError(f"embedding dimension must be positive, got {dim}")
        self.dim = dim
        self._vectors = vectors
        self._fallback_seed = fallback_seed

    @property
    def is_fallback(self) -> bool:
        return self._fallback_seed is not None

    def keywords(self) -> list[str]:
        return sorted(self._vectors)

    def __contains__(self, keyword: str) -> bool:
        return keyword in self._vectors or self.is_fallback

    def vector(self, keyword: str) -> np.ndarray:
        vec = self._vectors.get(keyword)
        if vec is None:
            if self._fallback_seed is None:
                raise UnknownKeywordError(f"no embedding for keyword {keyword!r}")
            vec = _hash_vector(keyword, self.dim, self._fallback_seed)
            self._vectors[keyword] = vec
        return vec

    def mbr_of_keyword_set(self, keywords: Iterable[str]) -> Mbr:
        kws = sorted(set(keywords))
        if not kws:
            return EMPTY_SET_MBR
        return mbr_of_points(np.stack([self.vector(k) for k in kws]))

    def fingerprint(self) -> str:
        if self.is_fallback:
            marker = f"fallback-hash-table:d={self.dim}:seed={self._fallback_seed}"
            return hashlib.sha256(marker.encode()).hexdigest()
        return hashlib.sha256("\n".join(self._dump_lines()).encode()).hexdigest()

    def _dump_lines(self) -> list[str]:
        lines = [f"emb {self.dim}"]
        for kw in self.keywords():
            comps = " ".join(f"{c:.17g}" for c in self._vectors[kw])
            lines.append(f"{kw} {comps}")
        return lines

    def save(self, path: str | Path) -> None:
        Path(path).write_text("\n".join(self._dump_lines()) + "\n", encoding="utf-8")


def load_embeddings(path: str | Path) -> EmbeddingTable:
    """Read the embedding file: header ``emb <d>`` then one row per keyword."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    rows = [ln.strip() for ln in lines if ln.strip() and not ln.strip().startswith("#")]
    if not rows or not rows[0].startswith("emb "):
        raise GndSearchError("embedding file must start with 'emb <d>'")
    try:
        dim = int(rows[0].split()[1])
    except (IndexError, ValueError) as exc:
        raise GndSearchError("malformed embedding header") from exc
    vectors: dict[str, np.ndarray] = {}
    for row in rows[1:]:
        fields = row.split()
        kw = fields[0]
        if kw in vectors:
            raise GndSearchError(f"duplicate embedding row for keyword {kw!r}")
        comps = np.array([float(x) for x in fields[1:]], dtype=np.float64)
        if len(comps) != dim:
            raise GndSearchError(
                f"keyword {kw!r} has {len(comps)} components, header declares {dim}"
            )
        if not np.isfinite(comps).all():
            raise GndSearchError(f"non-finite component for keyword {kw!r}")
        comps.setflags(write=False)
        vectors[kw] = comps
    return EmbeddingTable(dim, vectors)


def fallback_embeddings(keywords: Iterable[str], dim: int, seed: int) -> EmbeddingTable:
    """Hash-derived table covering ``keywords`` now and any other token on demand."""
    if dim < 2:
        raise GndSearchError(f"fallback table needs dimension >= 2, got {dim}")
    table = EmbeddingTable(dim, {}, fallback_seed=seed)
    for kw in keywords:
        table.vector(kw)
    return table
