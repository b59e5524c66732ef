import warnings

import pytest

from gndsearch.graph import Graph
from gndsearch.hypergraph import build_hypergraph, export_hypergraph, sample_pairs

from hgnn_trainer import load_training_file


def toy_graph() -> Graph:
    return Graph(
        keywords={
            1: {"k1", "k2", "k3", "k4"},
            2: {"k1", "k2"},
            3: {"k2", "k3", "k4"},
            4: {"k3", "k4"},
            5: {"k2", "k3", "k4"},
        },
        edges=[(1, 2, 1.0), (2, 3, 2.0), (3, 4, 1.0), (4, 5, 3.0), (5, 1, 2.0)],
    )


def export_graph(g: Graph, path, dim=8, base_count=4, seed=1):
    h = build_hypergraph(g)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        ds = sample_pairs(h, base_count, seed=seed)
    export_hypergraph(h, ds, path, dim=dim)
    return h, ds


@pytest.fixture
def toy_data(tmp_path):
    path = tmp_path / "toy.txt"
    export_graph(toy_graph(), path)
    return load_training_file(path)
