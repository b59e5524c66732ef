"""Hierarchical tree index over per-vertex auxiliary data.

Construction partitions vertices top-down: a group small enough becomes a
leaf; otherwise greedy seed boxes with minimal mutual overlap start fanout
children, vertices are re-assigned for a fixed number of rounds to the child
whose running union box grows least, and the recursion descends. Each
assignment round caps every child at ceil(n / fanout) members, which pins the
tree height to the log_fanout formula and guarantees termination when many
boxes coincide; vertices are processed in a seed-shuffled deterministic order.

Internal entries carry two aggregates over all descendant vertices: the union
box and the position-wise maximum of the sorted weight lists. Both only ever
over-approximate members, which is what makes node-level pruning sound.

Index file layout (little-endian, version 1):

    magic  b"GNDIDX"; u16 version; u32 fanout; u32 dim
    str    embedding fingerprint   (u16 length + utf-8 bytes)
    str    graph fingerprint
    node   root, recursively:
             u8 kind (0 leaf, 1 internal); u32 entry count
             leaf entry:     u64 vertex id, mbr, wlist
             internal entry: mbr, wlist, then the child node inline
    mbr    u8 flag (0 empty, 1 box); if box: dim f64 lows, dim f64 highs
    wlist  u32 length; length f64 values
"""

from __future__ import annotations

import math
import random
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bounds import weight_list
from .embedding import (
    EPSILON,
    LOG_EPSILON,
    EMPTY_SET_MBR,
    EmbeddingTable,
    Mbr,
    mbr_union,
)
from .errors import GndSearchError, IndexFormatError
from .graph import Graph

_MAGIC = b"GNDIDX"
_VERSION = 1


@dataclass(frozen=True)
class VertexAux:
    """Per-vertex pruning payload: keyword-embedding box and sorted weight list."""

    mbr: Mbr
    wlist: tuple[float, ...]


@dataclass
class LeafNode:
    entries: list[tuple[int, VertexAux]]

    kind = "leaf"


@dataclass
class ChildEntry:
    mbr: Mbr
    wlist: tuple[float, ...]
    child: "IndexNode"


@dataclass
class InternalNode:
    entries: list[ChildEntry]

    kind = "internal"


IndexNode = LeafNode | InternalNode


@dataclass
class TreeIndex:
    root: IndexNode
    fanout: int
    dim: int
    embedding_fingerprint: str = ""
    graph_fingerprint: str = ""

    def height(self) -> int:
        def depth(node: IndexNode) -> int:
            if isinstance(node, LeafNode):
                return 1
            return 1 + max(depth(e.child) for e in node.entries)

        return depth(self.root)

    def leaf_vertex_ids(self) -> list[int]:
        out: list[int] = []

        def walk(node: IndexNode) -> None:
            if isinstance(node, LeafNode):
                out.extend(vid for vid, _ in node.entries)
            else:
                for e in node.entries:
                    walk(e.child)

        walk(self.root)
        return out


def compute_aux(g: Graph, table: EmbeddingTable) -> dict[int, VertexAux]:
    """Keyword-embedding box and non-ascending incident weight list per vertex."""
    return {
        v: VertexAux(
            mbr=table.mbr_of_keyword_set(g.keyword_set(v)),
            wlist=tuple(weight_list(g, v)),
        )
        for v in sorted(g.vertices)
    }


def _max_wlist(lists: list[tuple[float, ...]]) -> tuple[float, ...]:
    length = max((len(w) for w in lists), default=0)
    out = [0.0] * length
    for w in lists:
        for z, value in enumerate(w):
            if value > out[z]:
                out[z] = value
    return tuple(out)


def _agg_of(ids: list[int], aux: dict[int, VertexAux]) -> tuple[Mbr, tuple[float, ...]]:
    mbr = EMPTY_SET_MBR
    for v in ids:
        mbr = mbr_union(mbr, aux[v].mbr)
    return mbr, _max_wlist([aux[v].wlist for v in ids])


class _Boxes:
    """Stacked box bounds for one vertex group; empties encoded as (+inf, -inf)."""

    def __init__(self, ids: list[int], aux: dict[int, VertexAux], dim: int):
        n = len(ids)
        self.ids = ids
        self.lo = np.full((n, dim), np.inf)
        self.hi = np.full((n, dim), -np.inf)
        self.empty = np.zeros(n, dtype=bool)
        for row, v in enumerate(ids):
            m = aux[v].mbr
            if m.is_empty:
                self.empty[row] = True
            else:
                self.lo[row] = m.lo
                self.hi[row] = m.hi
        self.dim = dim
        self.log_area = np.where(
            self.empty,
            dim * LOG_EPSILON,
            np.log(np.clip(self.hi - self.lo, 0.0, None) + EPSILON).sum(axis=1),
        )

    def overlap_with(self, row: int) -> np.ndarray:
        """Log-area of each box's intersection with box ``row``; floor if disjoint."""
        floor = self.dim * LOG_EPSILON
        if self.empty[row]:
            return np.full(len(self.ids), floor)
        ilo = np.maximum(self.lo, self.lo[row])
        ihi = np.minimum(self.hi, self.hi[row])
        sides = ihi - ilo
        exists = (sides >= 0).all(axis=1) & ~self.empty
        la = np.log(np.clip(sides, 0.0, None) + EPSILON).sum(axis=1)
        return np.where(exists, la, floor)


def _select_seeds(boxes: _Boxes, fanout: int) -> list[int]:
    """Greedy seed rows: largest box first, then minimal summed overlap."""
    # ids are ascending within a group and argmax/argmin return the first
    # occurrence, so ties resolve to the lowest vertex id
    first = int(np.argmax(boxes.log_area))
    seeds = [first]
    total_overlap = boxes.overlap_with(first)
    while len(seeds) < fanout:
        masked = total_overlap.copy()
        masked[seeds] = np.inf
        pick = int(np.argmin(masked))
        seeds.append(pick)
        total_overlap = total_overlap + boxes.overlap_with(pick)
    return seeds


def _assign_rounds(
    boxes: _Boxes, seeds: list[int], max_iter: int, rng: random.Random
) -> list[list[int]]:
    """Capacity-capped min-expansion assignment; returns member rows per child."""
    n = len(boxes.ids)
    f = len(seeds)
    capacity = math.ceil(n / f)
    c_lo = boxes.lo[seeds].copy()
    c_hi = boxes.hi[seeds].copy()
    c_empty = boxes.empty[seeds].copy()

    order = list(range(n))
    rng.shuffle(order)
    groups: list[list[int]] = [[] for _ in range(f)]

    for _ in range(max_iter):
        center_la = np.where(
            c_empty,
            boxes.dim * LOG_EPSILON,
            np.log(np.clip(c_hi - c_lo, 0.0, None) + EPSILON).sum(axis=1),
        )
        # n x f expansion costs; child column loop keeps memory flat
        cost = np.empty((n, f))
        for j in range(f):
            u_lo = np.minimum(boxes.lo, c_lo[j])
            u_hi = np.maximum(boxes.hi, c_hi[j])
            with np.errstate(invalid="ignore"):
                u_la = np.log(np.clip(u_hi - u_lo, 0.0, None) + EPSILON).sum(axis=1)
            cost[:, j] = np.clip(u_la - center_la[j], 0.0, None)
        cost[boxes.empty, :] = 0.0

        groups = [[] for _ in range(f)]
        counts = [0] * f
        for row in order:
            for j in np.argsort(cost[row], kind="stable"):
                if counts[j] < capacity:
                    groups[j].append(row)
                    counts[j] += 1
                    break

        for j, members in enumerate(groups):
            if not members:
                c_empty[j] = True
                c_lo[j] = np.inf
                c_hi[j] = -np.inf
                continue
            rows = np.array(members)
            nonempty = rows[~boxes.empty[rows]]
            if len(nonempty) == 0:
                c_empty[j] = True
                c_lo[j] = np.inf
                c_hi[j] = -np.inf
            else:
                c_empty[j] = False
                c_lo[j] = boxes.lo[nonempty].min(axis=0)
                c_hi[j] = boxes.hi[nonempty].max(axis=0)

    return [sorted(g) for g in groups if g]


def build_index(
    aux: dict[int, VertexAux],
    fanout: int,
    max_iter: int = 3,
    seed: int = 0,
    embedding_fingerprint: str = "",
    graph_fingerprint: str = "",
) -> TreeIndex:
    """Build the tree; deterministic for identical (aux, fanout, max_iter, seed)."""
    if fanout < 2:
        raise GndSearchError(f"fanout must be >= 2, got {fanout}")
    if max_iter < 1:
        raise GndSearchError(f"max_iter must be >= 1, got {max_iter}")
    if not aux:
        raise GndSearchError("cannot index an empty auxiliary map")

    dim = next((a.mbr.dim for a in aux.values() if not a.mbr.is_empty), 0)

    def build(ids: list[int], path: str) -> IndexNode:
        if len(ids) <= fanout:
            return LeafNode(entries=[(v, aux[v]) for v in ids])
        boxes = _Boxes(ids, aux, dim)
        seeds = _select_seeds(boxes, fanout)
        rng = random.Random(f"index-build:{seed}:{path}")
        groups = _assign_rounds(boxes, seeds, max_iter, rng)
        entries = []
        for slot, rows in enumerate(groups):
            child_ids = [ids[r] for r in rows]
            child = build(child_ids, f"{path}/{slot}")
            agg_mbr, agg_wlist = _agg_of(child_ids, aux)
            entries.append(ChildEntry(mbr=agg_mbr, wlist=agg_wlist, child=child))
        return InternalNode(entries=entries)

    root = build(sorted(aux), "root")
    return TreeIndex(
        root=root,
        fanout=fanout,
        dim=dim,
        embedding_fingerprint=embedding_fingerprint,
        graph_fingerprint=graph_fingerprint,
    )


# -- persistence ---------------------------------------------------------------


def _pack_str(s: str) -> bytes:
    raw = s.encode("utf-8")
    return struct.pack("<H", len(raw)) + raw


def _pack_mbr(m: Mbr) -> bytes:
    if m.is_empty:
        return b"\x00"
    return b"\x01" + m.lo.astype("<f8").tobytes() + m.hi.astype("<f8").tobytes()


def _pack_wlist(w: tuple[float, ...]) -> bytes:
    return struct.pack("<I", len(w)) + struct.pack(f"<{len(w)}d", *w)


def _pack_node(node: IndexNode, dim: int) -> bytes:
    parts = []
    if isinstance(node, LeafNode):
        parts.append(struct.pack("<BI", 0, len(node.entries)))
        for vid, aux in node.entries:
            parts.append(struct.pack("<Q", vid))
            parts.append(_pack_mbr(aux.mbr))
            parts.append(_pack_wlist(aux.wlist))
    else:
        parts.append(struct.pack("<BI", 1, len(node.entries)))
        for e in node.entries:
            parts.append(_pack_mbr(e.mbr))
            parts.append(_pack_wlist(e.wlist))
            parts.append(_pack_node(e.child, dim))
    return b"".join(parts)


def save_index(ix: TreeIndex, path: str | Path) -> None:
    if not ix.embedding_fingerprint or not ix.graph_fingerprint:
        raise GndSearchError("refusing to save an index without both fingerprints")
    blob = b"".join(
        [
            _MAGIC,
            struct.pack("<H", _VERSION),
            struct.pack("<II", ix.fanout, ix.dim),
            _pack_str(ix.embedding_fingerprint),
            _pack_str(ix.graph_fingerprint),
            _pack_node(ix.root, ix.dim),
        ]
    )
    Path(path).write_bytes(blob)


class _Cursor:
    def __init__(self, blob: bytes):
        self.blob = blob
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.blob):
            raise IndexFormatError("truncated index file")
        out = self.blob[self.pos : self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def _read_str(cur: _Cursor) -> str:
    (length,) = cur.unpack("<H")
    return cur.take(length).decode("utf-8")


def _read_mbr(cur: _Cursor, dim: int) -> Mbr:
    (flag,) = cur.unpack("<B")
    if flag == 0:
        return EMPTY_SET_MBR
    if flag != 1:
        raise IndexFormatError(f"bad box flag {flag}")
    lo = np.frombuffer(cur.take(8 * dim), dtype="<f8").copy()
    hi = np.frombuffer(cur.take(8 * dim), dtype="<f8").copy()
    return Mbr(lo, hi)


def _read_wlist(cur: _Cursor) -> tuple[float, ...]:
    (length,) = cur.unpack("<I")
    return cur.unpack(f"<{length}d")


def _read_node(cur: _Cursor, dim: int) -> IndexNode:
    kind, count = cur.unpack("<BI")
    if kind == 0:
        entries = []
        for _ in range(count):
            (vid,) = cur.unpack("<Q")
            entries.append((vid, VertexAux(_read_mbr(cur, dim), _read_wlist(cur))))
        return LeafNode(entries=entries)
    if kind == 1:
        children = []
        for _ in range(count):
            mbr = _read_mbr(cur, dim)
            wlist = _read_wlist(cur)
            children.append(ChildEntry(mbr=mbr, wlist=wlist, child=_read_node(cur, dim)))
        return InternalNode(entries=children)
    raise IndexFormatError(f"bad node kind {kind}")


def load_index(path: str | Path) -> TreeIndex:
    cur = _Cursor(Path(path).read_bytes())
    if cur.take(len(_MAGIC)) != _MAGIC:
        raise IndexFormatError("not an index file (bad magic)")
    (version,) = cur.unpack("<H")
    if version != _VERSION:
        raise IndexFormatError(f"unsupported index version {version}, expected {_VERSION}")
    fanout, dim = cur.unpack("<II")
    emb_fp = _read_str(cur)
    graph_fp = _read_str(cur)
    if not emb_fp or not graph_fp:
        raise IndexFormatError("index file is missing a fingerprint")
    root = _read_node(cur, dim)
    if cur.pos != len(cur.blob):
        raise IndexFormatError("trailing bytes after the root node")
    return TreeIndex(
        root=root,
        fanout=fanout,
        dim=dim,
        embedding_fingerprint=emb_fp,
        graph_fingerprint=graph_fp,
    )
