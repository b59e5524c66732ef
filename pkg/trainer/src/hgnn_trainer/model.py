"""Hypergraph message passing and the box-containment contrastive loss.

One propagation layer mixes keyword embeddings through the normalized
incidence structure:

    O' = relu( Dv^-1/2  X  W  De^-1  X^T  Dv^-1/2  O  Theta )

where X is the binary keyword-by-hyperedge incidence matrix, W the
hyperedge weights normalized by their maximum, De hyperedge cardinalities,
and Dv the weighted keyword degrees. The propagation matrix is constant, so
it is materialized once.

The loss drives hyperedge boxes (per-dimension extrema over member keyword
embeddings) to be small and mutually disjoint: contained pairs are charged
the inner box's log-area, intersecting pairs their overlap's log-area, and
disjoint keyword sets either their overlap (while their boxes still meet) or
the sum of both log-areas once separated. Overlap sides pass through
relu(side) + epsilon inside the log, so the loss stays finite and
subdifferentiable everywhere.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np
import torch

from .data import HypergraphData


@dataclass(frozen=True)
class TrainConfig:
    layers: int = 2
    dim: int = 64
    lr: float = 1e-3
    epochs: int = 200
    seed: int = 0
    epsilon: float = 1e-6  # must match the engine's log-area guard
    freeze_init: bool = False

    def __post_init__(self):
        if self.layers < 1:
            raise ValueError(f"need at least one layer, got {self.layers}")
        if self.dim < 2:
            raise ValueError(f"need dimension >= 2, got {self.dim}")


def _token_gaussian(token: str, dim: int, seed: int) -> np.ndarray:
    """Deterministic per-token standard-normal row (hash stream + Box-Muller)."""
    need = 2 * dim
    uniforms = np.empty(need)
    filled = 0
    block = 0
    while filled < need:
        digest = hashlib.blake2b(
            f"init:{seed}\x1f{token}\x1f{block}".encode(), digest_size=64
        ).digest()
        words = np.frombuffer(digest, dtype="<u8").astype(np.float64) / 2.0**64
        take = min(need - filled, len(words))
        uniforms[filled : filled + take] = words[:take]
        filled += take
        block += 1
    u1 = np.clip(uniforms[:dim], 1e-12, 1.0)
    u2 = uniforms[dim:]
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * math.pi * u2)


def guard_isolated_keywords(data: HypergraphData) -> HypergraphData:
    """Give keywords outside every hyperedge a singleton self-hyperedge.

    Impossible for engine-built inputs, but a zero vertex degree would make
    the normalization singular, so hand-built files are repaired.
    """
    covered = set()
    for m in data.members:
        covered.update(m)
    isolated = [i for i in range(data.num_keywords) if i not in covered]
    if not isolated:
        return data
    min_w = min(data.weights) if data.weights else 1
    members = list(data.members) + [(i,) for i in isolated]
    weights = list(data.weights) + [min_w] * len(isolated)
    return HypergraphData(
        keywords=data.keywords,
        members=members,
        weights=weights,
        d1=data.d1,
        d2=data.d2,
        d3=data.d3,
        dim=data.dim,
    )


def propagation_matrix(data: HypergraphData) -> torch.Tensor:
    nk, ne = data.num_keywords, data.num_hyperedges
    chi = torch.zeros((nk, ne), dtype=torch.float64)
    for e, members in enumerate(data.members):
        for k in members:
            chi[k, e] = 1.0
    w_norm = torch.tensor(data.weights, dtype=torch.float64) / max(data.weights)
    edge_deg = torch.tensor([len(m) for m in data.members], dtype=torch.float64)
    vertex_deg = chi @ w_norm
    dv_isqrt = vertex_deg.rsqrt()
    # Dv^-1/2 X W De^-1 X^T Dv^-1/2, materialized as one |V| x |V| matrix
    left = dv_isqrt[:, None] * chi * (w_norm / edge_deg)[None, :]
    return (left @ chi.T) * dv_isqrt[None, :]


class KeywordEmbeddingModel(torch.nn.Module):
    """Stacked propagation layers over a trainable token-seeded feature matrix."""

    def __init__(self, data: HypergraphData, cfg: TrainConfig):
        super().__init__()
        self.register_buffer("prop", propagation_matrix(data))
        init = np.stack([_token_gaussian(t, cfg.dim, cfg.seed) for t in data.keywords])
        features = torch.tensor(init, dtype=torch.float64)
        if cfg.freeze_init:
            self.register_buffer("features", features)
        else:
            self.features = torch.nn.Parameter(features)
        rng = np.random.default_rng(cfg.seed)
        limit = math.sqrt(6.0 / (2 * cfg.dim))
        self.thetas = torch.nn.ParameterList(
            torch.nn.Parameter(
                torch.tensor(rng.uniform(-limit, limit, size=(cfg.dim, cfg.dim)))
            )
            for _ in range(cfg.layers)
        )

    def forward(self) -> torch.Tensor:
        out = self.features
        for theta in self.thetas:
            out = torch.relu(self.prop @ out @ theta)
        return out


def hyperedge_boxes(
    embeddings: torch.Tensor, data: HypergraphData
) -> tuple[torch.Tensor, torch.Tensor]:
    """Per-hyperedge (lo, hi) extrema over member keyword embeddings."""
    width = max(len(m) for m in data.members)
    idx = torch.zeros((data.num_hyperedges, width), dtype=torch.long)
    mask = torch.zeros((data.num_hyperedges, width), dtype=torch.bool)
    for e, members in enumerate(data.members):
        idx[e, : len(members)] = torch.tensor(members)
        mask[e, : len(members)] = True
    gathered = embeddings[idx]  # E x width x d
    pad = mask[:, :, None]
    lo = torch.where(pad, gathered, torch.inf).amin(dim=1)
    hi = torch.where(pad, gathered, -torch.inf).amax(dim=1)
    return lo, hi


def _log_area(lo: torch.Tensor, hi: torch.Tensor, eps: float) -> torch.Tensor:
    return torch.log(hi - lo + eps).sum(dim=-1)


def _overlap_log_area(
    lo: torch.Tensor, hi: torch.Tensor, pairs: torch.Tensor, eps: float
) -> torch.Tensor:
    a, b = pairs[:, 0], pairs[:, 1]
    sides = torch.minimum(hi[a], hi[b]) - torch.maximum(lo[a], lo[b])
    return torch.log(torch.relu(sides) + eps).sum(dim=-1)


def contrastive_loss(
    lo: torch.Tensor,
    hi: torch.Tensor,
    data: HypergraphData,
    eps: float,
) -> torch.Tensor:
    loss = lo.new_zeros(())
    if data.d1:
        inner = torch.tensor([a for a, _ in data.d1])
        loss = loss + _log_area(lo[inner], hi[inner], eps).mean()
    if data.d2:
        loss = loss + _overlap_log_area(lo, hi, torch.tensor(data.d2), eps).mean()
    if data.d3:
        pairs = torch.tensor(data.d3)
        a, b = pairs[:, 0], pairs[:, 1]
        # split by current geometry: boxes still meeting are pushed apart via
        # their overlap, separated ones keep shrinking individually
        meets = (torch.minimum(hi[a], hi[b]) >= torch.maximum(lo[a], lo[b])).all(dim=1)
        if meets.any():
            loss = loss + _overlap_log_area(lo, hi, pairs[meets], eps).mean()
        if (~meets).any():
            sep = pairs[~meets]
            loss = loss + (
                _log_area(lo[sep[:, 0]], hi[sep[:, 0]], eps)
                + _log_area(lo[sep[:, 1]], hi[sep[:, 1]], eps)
            ).mean()
    return loss
