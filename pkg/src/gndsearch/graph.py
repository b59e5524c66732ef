"""Weighted graph model with per-vertex keyword sets, plus text-file ingestion.

File format (one record per line, ``#`` starts a comment):

    g <|V|> <|E|> <|Sigma|>          optional header; counts are validated
    v <id> <kw1>,<kw2>,...           keyword list, or ``-`` for an empty set
    e <id1> <id2> <weight>           undirected, listed once, weight > 0

Vertices must be declared before edges that reference them. Query files use
the same format; the threshold and aggregate are not file content.
"""

from __future__ import annotations

import hashlib
from collections import deque
from collections.abc import Iterable, Mapping
from pathlib import Path

from .errors import GraphFormatError, GraphValidationError, UnknownVertexError

# Keyword tokens may not contain whitespace or commas, and "-" is reserved
# for the empty keyword list.
_FORBIDDEN = set(" \t\r\n,")


def _check_keyword(token: str) -> str:
    if not token or token == "-" or any(c in _FORBIDDEN for c in token):
        raise GraphValidationError(f"invalid keyword token: {token!r}")
    return token


def _format_weight(w: float) -> str:
    return str(int(w)) if w == int(w) else repr(w)


class Graph:
    """Undirected weighted graph; immutable after construction.

    Adjacency is stored symmetrically (both directions carry the same
    weight), realizing the edge mapping of the data model.
    """

    __slots__ = ("_keywords", "_adj", "_sigma_size", "_num_edges")

    def __init__(
        self,
        keywords: Mapping[int, Iterable[str]],
        edges: Iterable[tuple[int, int, float]],
        sigma_size: int | None = None,
    ):
        self._keywords: dict[int, frozenset[str]] = {}
        for vid, kws in keywords.items():
            if vid < 0:
                raise GraphValidationError(f"negative vertex id: {vid}")
            self._keywords[int(vid)] = frozenset(_check_keyword(k) for k in kws)

        self._adj: dict[int, dict[int, float]] = {v: {} for v in self._keywords}
        n_edges = 0
        for u, v, w in edges:
            if u not in self._adj or v not in self._adj:
                missing = u if u not in self._adj else v
                raise UnknownVertexError(f"edge references undeclared vertex {missing}")
            if u == v:
                raise GraphValidationError(f"self-loop on vertex {u}")
            w = float(w)
            if not w > 0:
                raise GraphValidationError(f"non-positive weight {w} on edge ({u}, {v})")
            if v in self._adj[u]:
                raise GraphValidationError(f"duplicate edge ({u}, {v})")
            self._adj[u][v] = w
            self._adj[v][u] = w
            n_edges += 1
        self._num_edges = n_edges

        distinct = len(self.keyword_domain())
        if sigma_size is None:
            sigma_size = distinct
        elif distinct > sigma_size:
            raise GraphValidationError(
                f"graph uses {distinct} distinct keywords but declares |Sigma| = {sigma_size}"
            )
        self._sigma_size = sigma_size

    # -- accessors ---------------------------------------------------------

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(self._keywords)

    @property
    def num_vertices(self) -> int:
        return len(self._keywords)

    @property
    def num_edges(self) -> int:
        return self._num_edges

    @property
    def sigma_size(self) -> int:
        return self._sigma_size

    def __contains__(self, vid: int) -> bool:
        return vid in self._keywords

    def keyword_set(self, vid: int) -> frozenset[str]:
        self._require(vid)
        return self._keywords[vid]

    def keyword_domain(self) -> frozenset[str]:
        return frozenset().union(*self._keywords.values()) if self._keywords else frozenset()

    def neighbors(self, vid: int) -> dict[int, float]:
        """1-hop neighborhood of ``vid`` as ``{neighbor: weight}``."""
        self._require(vid)
        return self._adj[vid]

    def weight_or_zero(self, u: int, v: int) -> float:
        """Edge weight, or 0 when the edge does not exist (missing-edge convention)."""
        return self._adj.get(u, {}).get(v, 0.0)

    def degree(self, vid: int) -> int:
        self._require(vid)
        return len(self._adj[vid])

    def edges(self) -> list[tuple[int, int, float]]:
        """All edges once, as (min id, max id, weight), sorted."""
        out = []
        for u, nbrs in self._adj.items():
            for v, w in nbrs.items():
                if u < v:
                    out.append((u, v, w))
        out.sort()
        return out

    def _require(self, vid: int) -> None:
        if vid not in self._keywords:
            raise UnknownVertexError(f"unknown vertex id {vid}")

    # -- derived graphs and connectivity ------------------------------------

    def induced_subgraph(self, vs: Iterable[int]) -> "Graph":
        """Subgraph on ``vs`` with every edge of this graph inside ``vs``."""
        vset = set(vs)
        for v in vset:
            self._require(v)
        kws = {v: self._keywords[v] for v in vset}
        edges = [(u, v, w) for u, v, w in self.edges() if u in vset and v in vset]
        return Graph(kws, edges, sigma_size=self._sigma_size)

    def is_connected_subset(self, vs: Iterable[int]) -> bool:
        """True iff the induced subgraph on ``vs`` is connected (BFS)."""
        vset = set(vs)
        if not vset:
            raise GraphValidationError("connectivity of the empty vertex set is undefined")
        for v in vset:
            self._require(v)
        start = next(iter(vset))
        seen = {start}
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for n in self._adj[u]:
                if n in vset and n not in seen:
                    seen.add(n)
                    queue.append(n)
        return len(seen) == len(vset)

    def is_connected(self) -> bool:
        if not self._keywords:
            return False
        return self.is_connected_subset(self._keywords)

    # -- serialization -------------------------------------------------------

    def canonical_lines(self) -> list[str]:
        lines = [f"g {self.num_vertices} {self.num_edges} {self._sigma_size}"]
        for vid in sorted(self._keywords):
            kws = ",".join(sorted(self._keywords[vid])) or "-"
            lines.append(f"v {vid} {kws}")
        for u, v, w in self.edges():
            lines.append(f"e {u} {v} {_format_weight(w)}")
        return lines

    def fingerprint(self) -> str:
        digest = hashlib.sha256("\n".join(self.canonical_lines()).encode())
        return digest.hexdigest()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self._keywords == other._keywords
            and self._adj == other._adj
            and self._sigma_size == other._sigma_size
        )

    def __repr__(self) -> str:
        return f"Graph(|V|={self.num_vertices}, |E|={self.num_edges}, |Sigma|={self._sigma_size})"


def validate_query_graph(g: Graph) -> Graph:
    """Queries must be connected and have at least two vertices."""
    if g.num_vertices < 2:
        raise GraphValidationError(f"query graph needs >= 2 vertices, got {g.num_vertices}")
    if not g.is_connected():
        raise GraphValidationError("query graph must be connected")
    return g


def parse_graph(text: str, kind: str = "data") -> Graph:
    """Parse the graph text format; see the module docstring for the grammar."""
    if kind not in ("data", "query"):
        raise ValueError(f"kind must be 'data' or 'query', got {kind!r}")
    header: tuple[int, int, int] | None = None
    keywords: dict[int, list[str]] = {}
    edges: list[tuple[int, int, float]] = []
    saw_record = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        tag = fields[0]
        try:
            if tag == "g":
                if saw_record or header is not None:
                    raise GraphFormatError("header must be the first record", lineno)
                if len(fields) != 4:
                    raise GraphFormatError("header needs 3 counts: g <|V|> <|E|> <|Sigma|>", lineno)
                header = (int(fields[1]), int(fields[2]), int(fields[3]))
            elif tag == "v":
                if len(fields) != 3:
                    raise GraphFormatError("vertex record needs: v <id> <keywords|->", lineno)
                vid = int(fields[1])
                if vid in keywords:
                    raise GraphFormatError(f"duplicate vertex id {vid}", lineno)
                kws = [] if fields[2] == "-" else fields[2].split(",")
                keywords[vid] = kws
            elif tag == "e":
                if len(fields) != 4:
                    raise GraphFormatError("edge record needs: e <id1> <id2> <weight>", lineno)
                u, v = int(fields[1]), int(fields[2])
                if u not in keywords or v not in keywords:
                    raise GraphFormatError(
                        f"edge ({u}, {v}) references an undeclared vertex", lineno
                    )
                edges.append((u, v, float(fields[3])))
            else:
                raise GraphFormatError(f"unknown record tag {tag!r}", lineno)
        except ValueError as exc:
            raise GraphFormatError(str(exc), lineno) from exc
        saw_record = saw_record or tag != "g"

    sigma = header[2] if header else None
    try:
        g = Graph(keywords, edges, sigma_size=sigma)
    except (GraphValidationError, UnknownVertexError) as exc:
        raise type(exc)(str(exc)) from exc
    if header is not None:
        nv, ne, _ = header
        if g.num_vertices != nv:
            raise GraphValidationError(f"header declares {nv} vertices, file has {g.num_vertices}")
        if g.num_edges != ne:
            raise GraphValidationError(f"header declares {ne} edges, file has {g.num_edges}")
    if kind == "query":
        validate_query_graph(g)
    return g


def load_graph(path: str | Path, kind: str = "data") -> Graph:
    return parse_graph(Path(path).read_text(encoding="utf-8"), kind=kind)


def save_graph(g: Graph, path: str | Path) -> None:
    Path(path).write_text("\n".join(g.canonical_lines()) + "\n", encoding="utf-8")
