import numpy as np
import pytest

from graph import AttributedGraph, save_graph


def make_graph(n, edges, d=3, seed=0, labels=None) -> AttributedGraph:
    rng = np.random.default_rng(seed)
    return AttributedGraph.from_edges(n, np.asarray(edges, dtype=np.int64).reshape(-1, 2),
                                      rng.normal(size=(n, d)), labels)


def random_graph(n, p, rng, d=3) -> AttributedGraph:
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(len(iu)) < p
    return AttributedGraph.from_edges(n, np.stack([iu[keep], ju[keep]], axis=1), rng.normal(size=(n, d)))


@pytest.fixture
def path3():
    """a - b - c as 0 - 1 - 2"""
    return make_graph(3, [(0, 1), (1, 2)])


@pytest.fixture
def triangle():
    return make_graph(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def toy6():
    """two triangles joined by a bridge, one anomaly per side"""
    edges = [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (3, 5)]
    labels = np.array([0, 1, 0, 0, 1, 0])
    return make_graph(6, edges, d=4, seed=3, labels=labels)


@pytest.fixture
def graph_files(tmp_path):
    """write a graph to edges.txt / attrs.txt / labels.txt under tmp_path"""
    def write(graph: AttributedGraph, prefix=''):
        paths = [tmp_path / f'{prefix}{name}' for name in ('edges.txt', 'attrs.txt', 'labels.txt')]
        save_graph(graph, *[str(p) for p in paths[:2]], str(paths[2]) if graph.labels is not None else None)
        return [str(p) for p in paths]
    return write
