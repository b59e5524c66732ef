"""Training loop: forward, box extrema, loss, step; emits the engine's embedding file."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from .data import HypergraphData
from .model import (
    KeywordEmbeddingModel,
    TrainConfig,
    contrastive_loss,
    guard_isolated_keywords,
    hyperedge_boxes,
)


class TrainingDiverged(Exception):
    pass


@dataclass
class TrainResult:
    keywords: list[str]
    embeddings: np.ndarray  # |V(H)| x d
    losses: list[float]  # loss evaluated at the start of each epoch


def train(data: HypergraphData, cfg: TrainConfig, state_dump: str | Path | None = None) -> TrainResult:
    """Deterministic single-device run; same data and config give the same bytes."""
    torch.set_num_threads(1)
    torch.manual_seed(cfg.seed)
    data = guard_isolated_keywords(data)
    model = KeywordEmbeddingModel(data, cfg)
    params = [p for p in model.parameters() if p.requires_grad]
    optimizer = torch.optim.Adam(params, lr=cfg.lr)

    losses: list[float] = []
    for epoch in range(cfg.epochs):
        embeddings = model()
        lo, hi = hyperedge_boxes(embeddings, data)
        loss = contrastive_loss(lo, hi, data, cfg.epsilon)
        value = loss.detach().item()
        if not math.isfinite(value):
            if state_dump is not None:
                Path(state_dump).write_text(
                    json.dumps({"epoch": epoch, "losses": losses, "loss": value}) + "\n"
                )
            raise TrainingDiverged(f"non-finite loss {value} at epoch {epoch}")
        losses.append(value)
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()

    with torch.no_grad():
        final = model().numpy().copy()
    if not np.isfinite(final).all():
        raise TrainingDiverged("non-finite embeddings after training")
    return TrainResult(keywords=data.keywords, embeddings=final, losses=losses)


def write_embeddings(result: TrainResult, path: str | Path) -> None:
    """Engine embedding file; 17 significant digits round-trip float64 exactly."""
    dim = result.embeddings.shape[1]
    lines = [f"emb {dim}"]
    order = sorted(range(len(result.keywords)), key=lambda i: result.keywords[i])
    for i in order:
        comps = " ".join(f"{c:.17g}" for c in result.embeddings[i])
        lines.append(f"{result.keywords[i]} {comps}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_training_log(result: TrainResult, path: str | Path) -> None:
    lines = [f"{epoch} {loss:.17g}" for epoch, loss in enumerate(result.losses)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
