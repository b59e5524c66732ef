"""Keyword-embedding trainer consuming the engine's hypergraph export format."""

from .data import HypergraphData, TrainerInputError, load_training_file
from .model import (
    KeywordEmbeddingModel,
    TrainConfig,
    contrastive_loss,
    hyperedge_boxes,
    propagation_matrix,
)
from .training import TrainingDiverged, TrainResult, train, write_embeddings, write_training_log

__version__ = "0.1.0"

__all__ = [
    "HypergraphData",
    "KeywordEmbeddingModel",
    "TrainConfig",
    "TrainResult",
    "TrainerInputError",
    "TrainingDiverged",
    "contrastive_loss",
    "hyperedge_boxes",
    "load_training_file",
    "propagation_matrix",
    "train",
    "write_embeddings",
    "write_training_log",
]
