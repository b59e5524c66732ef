"""Subgraph similarity search over weighted keyword graphs.

Retrieves connected subgraphs of a data graph that match a query graph under
keyword-set containment and a neighbor-difference threshold, using embedding
boxes, sorted-weight-list lower bounds, and a hierarchical index for pruning,
with a brute-force oracle for verification.
"""

from .embedding import (
    EMPTY_SET_MBR,
    EmbeddingTable,
    Mbr,
    fallback_embeddings,
    load_embeddings,
)
from .engine import EngineOptions, QueryStats, refine, retrieve_candidates, s3gnd_query
from .errors import GndSearchError
from .graph import Graph, load_graph, parse_graph, save_graph
from .hypergraph import KeywordHypergraph, PairDataset, build_hypergraph, sample_pairs
from .index import TreeIndex, VertexAux, build_index, compute_aux, load_index, save_index
from .semantics import (
    Aggregate,
    Answer,
    QueryParams,
    brute_force_s3gnd,
    gnd_score,
    is_answer,
    nd_score,
)
from .workload import QueryGenConfig, SynthConfig, gen_queries, gen_synthetic

__version__ = "0.1.0"

__all__ = [
    "Aggregate",
    "Answer",
    "EMPTY_SET_MBR",
    "EmbeddingTable",
    "EngineOptions",
    "GndSearchError",
    "Graph",
    "KeywordHypergraph",
    "Mbr",
    "PairDataset",
    "QueryGenConfig",
    "QueryParams",
    "QueryStats",
    "SynthConfig",
    "TreeIndex",
    "VertexAux",
    "brute_force_s3gnd",
    "build_hypergraph",
    "build_index",
    "compute_aux",
    "fallback_embeddings",
    "gen_queries",
    "gen_synthetic",
    "gnd_score",
    "is_answer",
    "load_embeddings",
    "load_graph",
    "load_index",
    "nd_score",
    "parse_graph",
    "refine",
    "retrieve_candidates",
    "s3gnd_query",
    "sample_pairs",
    "save_graph",
    "save_index",
]
