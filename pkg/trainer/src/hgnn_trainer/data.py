"""Reader for the engine's hypergraph export, the trainer's only input format.

    H <|V(H)|> <|E(H)|> <d_target>
    k <index> <token>
    he <index> <weight> <kidx1>,<kidx2>,...
    p1 <eidx_subset> <eidx_superset>
    p2 <eidx_a> <eidx_b>
    p3 <eidx_a> <eidx_b>
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path


class TrainerInputError(Exception):
    pass


@dataclass
class HypergraphData:
    keywords: list[str]
    members: list[tuple[int, ...]]  # keyword indices per hyperedge, ascending
    weights: list[int]
    d1: list[tuple[int, int]] = field(default_factory=list)
    d2: list[tuple[int, int]] = field(default_factory=list)
    d3: list[tuple[int, int]] = field(default_factory=list)
    dim: int = 64

    @property
    def num_keywords(self) -> int:
        return len(self.keywords)

    @property
    def num_hyperedges(self) -> int:
        return len(self.members)


def load_training_file(path: str | Path) -> HypergraphData:
    rows = [
        ln.strip()
        for ln in Path(path).read_text(encoding="utf-8").splitlines()
        if ln.strip() and not ln.strip().startswith("#")
    ]
    if not rows or not rows[0].startswith("H "):
        raise TrainerInputError("input must start with 'H <|V|> <|E|> <d>'")
    try:
        n_kw, n_he, dim = (int(x) for x in rows[0].split()[1:4])
    except (ValueError, IndexError) as exc:
        raise TrainerInputError("malformed header") from exc

    kw_by_idx: dict[int, str] = {}
    he_by_idx: dict[int, tuple[int, tuple[int, ...]]] = {}
    pairs: dict[str, list[tuple[int, int]]] = {"p1": [], "p2": [], "p3": []}
    for row in rows[1:]:
        fields = row.split()
        tag = fields[0]
        try:
            if tag == "k":
                kw_by_idx[int(fields[1])] = fields[2]
            elif tag == "he":
                members = tuple(sorted(int(x) for x in fields[3].split(",")))
                he_by_idx[int(fields[1])] = (int(fields[2]), members)
            elif tag in pairs:
                pairs[tag].append((int(fields[1]), int(fields[2])))
            else:
                raise TrainerInputError(f"unknown record tag {tag!r}")
        except (ValueError, IndexError) as exc:
            raise TrainerInputError(f"malformed record: {row!r}") from exc

    if len(kw_by_idx) != n_kw or len(he_by_idx) != n_he:
        raise TrainerInputError("header counts do not match records")
    keywords = [kw_by_idx[i] for i in range(n_kw)]
    weights = []
    members = []
    for i in range(n_he):
        w, m = he_by_idx[i]
        if w < 1:
            raise TrainerInputError(f"hyperedge {i} has non-positive weight {w}")
        if any(j < 0 or j >= n_kw for j in m):
            raise TrainerInputError(f"hyperedge {i} references an unknown keyword index")
        weights.append(w)
        members.append(m)
    for tag, plist in pairs.items():
        for a, b in plist:
            if not (0 <= a < n_he and 0 <= b < n_he):
                raise TrainerInputError(f"{tag} pair ({a}, {b}) out of range")
    return HypergraphData(
        keywords=keywords,
        members=members,
        weights=weights,
        d1=pairs["p1"],
        d2=pairs["p2"],
        d3=pairs["p3"],
        dim=dim,
    )
