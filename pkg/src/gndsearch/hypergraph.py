"""Keyword hypergraph construction, hyperedge-pair sampling, and trainer export.

Each distinct non-empty vertex keyword set of a data graph becomes one
hyperedge, weighted by how many vertices carry exactly that set; keywords
become hypergraph vertices. Sampled hyperedge pairs are grouped by set
relation: containment (d1), proper intersection (d2), disjoint (d3). The
trainer re-splits d3 by current box geometry each epoch, so the engine only
samples the three set-level categories.

Trainer input file format:

    H <|V(H)|> <|E(H)|> <d_target>
    k <index> <token>
    he <index> <weight> <kidx1>,<kidx2>,...
    p1 <eidx_subset> <eidx_superset>
    p2 <eidx_a> <eidx_b>
    p3 <eidx_a> <eidx_b>
"""

from __future__ import annotations

import random
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from .errors import GndSearchError, GraphFormatError
from .graph import Graph

#: Default sampling budget cap; containment pairs are the scarce category.
DEFAULT_BASE_COUNT_CAP = 10_000

#: Rejection-sampling attempt budget, as a multiple of the target count.
_ATTEMPT_FACTOR = 60

#: Below this hyperedge count all pairs are classified exhaustively instead.
_EXHAUSTIVE_LIMIT = 1500


@dataclass(frozen=True)
class Hyperedge:
    keywords: frozenset[str]
    weight: int


@dataclass
class KeywordHypergraph:
    """Keywords (sorted) and hyperedges (canonically ordered by keyword tuple)."""

    keywords: list[str]
    hyperedges: list[Hyperedge]
    _kw_pos: dict[str, int] = field(init=False, repr=False)
    _edge_pos: dict[frozenset[str], int] = field(init=False, repr=False)

    def __post_init__(self):
        self._kw_pos = {k: i for i, k in enumerate(self.keywords)}
        self._edge_pos = {e.keywords: i for i, e in enumerate(self.hyperedges)}
        if len(self._edge_pos) != len(self.hyperedges):
            raise GndSearchError("hyperedge keyword sets must be distinct")

    @property
    def num_keywords(self) -> int:
        return len(self.keywords)

    @property
    def num_hyperedges(self) -> int:
        return len(self.hyperedges)

    def keyword_index(self, keyword: str) -> int:
        if keyword not in self._kw_pos:
            raise GndSearchError(f"unknown hypergraph keyword {keyword!r}")
        return self._kw_pos[keyword]

    def incidence(self, keyword: str, edge_index: int) -> int:
        """1 iff the keyword is a member of the hyperedge, else 0."""
        self.keyword_index(keyword)
        if not 0 <= edge_index < len(self.hyperedges):
            raise GndSearchError(f"hyperedge index {edge_index} out of range")
        return int(keyword in self.hyperedges[edge_index].keywords)


@dataclass
class PairDataset:
    """Sampled unordered hyperedge-id pairs, grouped by keyword-set relation."""

    d1: list[tuple[int, int]]  # (subset, superset), strict containment
    d2: list[tuple[int, int]]  # intersecting, neither contains the other
    d3: list[tuple[int, int]]  # disjoint keyword sets
    seed: int
    warnings: list[str] = field(default_factory=list)


def build_hypergraph(g: Graph) -> KeywordHypergraph:
    """One hyperedge per distinct non-empty keyword set; weight = multiplicity."""
    counts: dict[frozenset[str], int] = {}
    for v in g.vertices:
        kws = g.keyword_set(v)
        if kws:
            counts[kws] = counts.get(kws, 0) + 1
    keywords = sorted(set().union(*counts) if counts else set())
    ordered = sorted(counts, key=lambda s: tuple(sorted(s)))
    hyperedges = [Hyperedge(kws, counts[kws]) for kws in ordered]
    return KeywordHypergraph(keywords, hyperedges)


def _classify(a: frozenset[str], b: frozenset[str]) -> str:
    if not a & b:
        return "d3"
    if a < b or b < a:
        return "d1"
    return "d2"


def _containment_pairs(h: KeywordHypergraph) -> list[tuple[int, int]]:
    """All (subset, superset) hyperedge pairs, via a keyword inverted index."""
    postings: dict[str, set[int]] = {k: set() for k in h.keywords}
    for i, e in enumerate(h.hyperedges):
        for k in e.keywords:
            postings[k].add(i)
    pairs = []
    for i, e in enumerate(h.hyperedges):
        supersets = set.intersection(*(postings[k] for k in e.keywords))
        for j in sorted(supersets):
            if j != i:
                pairs.append((i, j))
    return sorted(pairs)


def sample_pairs(h: KeywordHypergraph, base_count: int | None, seed: int) -> PairDataset:
    """Sample unique unordered pairs with targets 2u / 2u / 2u for d1 / d2 / d3.

    The doubled d3 target covers the trainer's per-epoch split of d3 into its
    two geometric sub-cases at an initial 2:2:1:1 ratio. Categories short of
    qualifying pairs fill to exhaustion with a warning. Deterministic per seed.
    """
    m = h.num_hyperedges
    if m < 2:
        raise GndSearchError("pair sampling needs at least two hyperedges")
    rng = random.Random(f"pair-sampler:{seed}")
    containment = _containment_pairs(h)
    if base_count is None:
        base_count = min(len(containment), DEFAULT_BASE_COUNT_CAP) or 1
    if base_count < 1:
        raise GndSearchError(f"base count must be positive, got {base_count}")
    target = 2 * base_count

    notes: list[str] = []
    if len(containment) > target:
        d1 = sorted(rng.sample(containment, target))
    else:
        d1 = containment
        if len(d1) < target:
            notes.append(f"d1 exhausted at {len(d1)} of {target} pairs")

    edge_sets = [e.keywords for e in h.hyperedges]
    d2: list[tuple[int, int]] = []
    d3: list[tuple[int, int]] = []
    if m * (m - 1) // 2 <= _EXHAUSTIVE_LIMIT * (_EXHAUSTIVE_LIMIT - 1) // 2 and m <= _EXHAUSTIVE_LIMIT:
        all_d2 = []
        all_d3 = []
        for i in range(m):
            for j in range(i + 1, m):
                cat = _classify(edge_sets[i], edge_sets[j])
                if cat == "d2":
                    all_d2.append((i, j))
                elif cat == "d3":
                    all_d3.append((i, j))
        for pool, out, name in ((all_d2, d2, "d2"), (all_d3, d3, "d3")):
            if len(pool) > target:
                out.extend(sorted(rng.sample(pool, target)))
            else:
                out.extend(pool)
                if len(pool) < target:
                    notes.append(f"{name} exhausted at {len(pool)} of {target} pairs")
    else:
        seen: set[tuple[int, int]] = set()
        budget = _ATTEMPT_FACTOR * target
        while budget > 0 and (len(d2) < target or len(d3) < target):
            budget -= 1
            i = rng.randrange(m)
            j = rng.randrange(m)
            if i == j:
                continue
            pair = (min(i, j), max(i, j))
            if pair in seen:
                continue
            seen.add(pair)
            cat = _classify(edge_sets[pair[0]], edge_sets[pair[1]])
            if cat == "d2" and len(d2) < target:
                d2.append(pair)
            elif cat == "d3" and len(d3) < target:
                d3.append(pair)
        for out, name in ((d2, "d2"), (d3, "d3")):
            if len(out) < target:
                notes.append(f"{name} undersampled at {len(out)} of {target} pairs")
        d2.sort()
        d3.sort()

    for name, pairs in (("d1", d1), ("d2", d2), ("d3", d3)):
        if not pairs:
            notes.append(f"no {name} pairs found")
    for note in notes:
        warnings.warn(note, stacklevel=2)
    return PairDataset(d1=d1, d2=d2, d3=d3, seed=seed, warnings=notes)


def export_hypergraph(
    h: KeywordHypergraph, ds: PairDataset, path: str | Path, dim: int = 64
) -> None:
    """Write the trainer input file; round-trips losslessly via import_hypergraph."""
    lines = [f"H {h.num_keywords} {h.num_hyperedges} {dim}"]
    for i, kw in enumerate(h.keywords):
        lines.append(f"k {i} {kw}")
    for i, e in enumerate(h.hyperedges):
        members = ",".join(str(h.keyword_index(k)) for k in sorted(e.keywords))
        lines.append(f"he {i} {e.weight} {members}")
    for tag, pairs in (("p1", ds.d1), ("p2", ds.d2), ("p3", ds.d3)):
        for a, b in pairs:
            lines.append(f"{tag} {a} {b}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def import_hypergraph(path: str | Path) -> tuple[KeywordHypergraph, PairDataset, int]:
    """Read a trainer input file back; inverse of export_hypergraph."""
    rows = [
        ln.strip()
        for ln in Path(path).read_text(encoding="utf-8").splitlines()
        if ln.strip() and not ln.strip().startswith("#")
    ]
    if not rows or not rows[0].startswith("H "):
        raise GraphFormatError("trainer file must start with 'H <|V|> <|E|> <d>'")
    try:
        n_kw, n_he, dim = (int(x) for x in rows[0].split()[1:4])
    except ValueError as exc:
        raise GraphFormatError("malformed trainer header") from exc

    kw_by_idx: dict[int, str] = {}
    he_rows: dict[int, tuple[int, list[int]]] = {}
    pairs: dict[str, list[tuple[int, int]]] = {"p1": [], "p2": [], "p3": []}
    for lineno, row in enumerate(rows[1:], start=2):
        fields = row.split()
        tag = fields[0]
        try:
            if tag == "k":
                kw_by_idx[int(fields[1])] = fields[2]
            elif tag == "he":
                members = [int(x) for x in fields[3].split(",")]
                he_rows[int(fields[1])] = (int(fields[2]), members)
            elif tag in pairs:
                pairs[tag].append((int(fields[1]), int(fields[2])))
            else:
                raise GraphFormatError(f"unknown record tag {tag!r}", lineno)
        except (IndexError, ValueError) as exc:
            raise GraphFormatError(str(exc), lineno) from exc
    if len(kw_by_idx) != n_kw or len(he_rows) != n_he:
        raise GraphFormatError("trainer header counts do not match the records")

    keywords = [kw_by_idx[i] for i in range(n_kw)]
    hyperedges = []
    for i in range(n_he):
        weight, members = he_rows[i]
        hyperedges.append(Hyperedge(frozenset(keywords[j] for j in members), weight))
    h = KeywordHypergraph(keywords, hyperedges)
    ds = PairDataset(d1=pairs["p1"], d2=pairs["p2"], d3=pairs["p3"], seed=0)
    return h, ds, dim
