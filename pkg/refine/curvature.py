"""
Ollivier-Ricci style edge curvature and the purified adjacency built from it.

kappa(i, j) = 1 - W(m_i, m_j), where m_i keeps mass tau on i and spreads 1 - tau
uniformly over the neighbors of i, and W is the exact 1-Wasserstein distance
under shortest-path hop distance (POT's network simplex, no entropic smoothing).
"""
import logging
from dataclasses import dataclass
from multiprocessing import Pool

import networkx as nx
import numpy as np
import ot
from tqdm import tqdm

from graph import AttributedGraph
from utill.errors import IsolatedNodeError, NotAnEdgeError, NotNormalizedError
from utill.logger import progress_enabled
from .adjacency import WeightedAdjacency

logger = logging.getLogger(__name__)

NORM_TOL = 1e-12

# supports of two adjacent nodes lie within 3 hops of each other
SUPPORT_CUTOFF = 3


@dataclass(frozen=True, eq=False)
class SparseDistribution:
    support: np.ndarray
    mass: np.ndarray

    def __post_init__(self):
        if len(self.support) != len(self.mass):
            raise ValueError('support and mass differ in length')
        if len(np.unique(self.support)) != len(self.support):
            raise ValueError('support ids must be distinct')

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return bool(np.all(self.mass >= 0) and abs(self.mass.sum() - 1.0) <= tol)

    def as_dict(self) -> dict[int, float]:
        return {int(k): float(v) for k, v in zip(self.support, self.mass)}


def neighbor_distribution(graph: AttributedGraph, node: int, tau: float) -> SparseDistribution:
    nb = graph.neighbors(node)
    if len(nb) == 0:
        raise IsolatedNodeError(f'node {node} has no neighbors')
    support = np.sort(np.append(nb, node))
    mass = np.full(len(support), (1.0 - tau) / len(nb))
    mass[support == node] = tau
    keep = mass > 0
    return SparseDistribution(support[keep], mass[keep])


class HopMetric:
    """
    Shortest-path hop distances from BFS, cached per source node.
    Unreachable pairs (or pairs beyond `cutoff`) get the sentinel distance N.
    """

    def __init__(self, graph: AttributedGraph | nx.Graph, cutoff: int | None = None):
        self._g = graph if isinstance(graph, nx.Graph) else graph.to_networkx()
        self.cutoff = cutoff
        self.sentinel = float(self._g.number_of_nodes())
        self._rows: dict[int, dict] = {}

    def row(self, source: int) -> dict:
        hit = self._rows.get(source)
        if hit is None:
            hit = nx.single_source_shortest_path_length(self._g, source, cutoff=self.cutoff)
            self._rows[source] = hit
        return hit

    def distance(self, u: int, v: int) -> float:
        return float(self.row(int(u)).get(int(v), self.sentinel))

    def matrix(self, sources, targets) -> np.ndarray:
        m = np.empty((len(sources), len(targets)), dtype=np.float64)
        for a, u in enumerate(sources):
            row = self.row(int(u))
            m[a] = [row.get(int(v), self.sentinel) for v in targets]
        return m


def wasserstein(p: SparseDistribution, q: SparseDistribution, ground: HopMetric) -> float:
    for name, dist in (('p', p), ('q', q)):
        if not dist.is_normalized():
            raise NotNormalizedError(f'{name} sums to {dist.mass.sum():.17g}, expected 1')
    cost = ground.matrix(p.support, q.support)
    return float(max(ot.emd2(p.mass, q.mass, cost), 0.0))


def edge_curvature(graph: AttributedGraph, i: int, j: int, tau: float,
                   ground: HopMetric | None = None) -> float:
    if not graph.has_edge(i, j):
        raise NotAnEdgeError(f'({i}, {j}) is not an edge')
    if ground is None:
        ground = HopMetric(graph, cutoff=SUPPORT_CUTOFF)
    # solve with the smaller id as source so both orientations share one LP
    a, b = (i, j) if i < j else (j, i)
    w = wasserstein(neighbor_distribution(graph, a, tau),
                    neighbor_distribution(graph, b, tau), ground)
    return 1.0 - w


# ---per-worker state for the process pool---
_graph: AttributedGraph | None = None
_ground: HopMetric | None = None
_tau: float = 0.5


def _init_worker(graph: AttributedGraph, tau: float):
    global _graph, _ground, _tau
    _graph = graph
    _ground = HopMetric(graph, cutoff=SUPPORT_CUTOFF)
    _tau = tau


def _curvature_chunk(edges: np.ndarray) -> np.ndarray:
    return np.array([edge_curvature(_graph, int(i), int(j), _tau, _ground) for i, j in edges],
                    dtype=np.float64)


def _chunks(edges: np.ndarray, workers: int) -> list[np.ndarray]:
    n = max(1, min(len(edges), workers * 4))
    return [c for c in np.array_split(edges, n) if len(c)]


def all_curvatures(graph: AttributedGraph, tau: float, workers: int = 1) -> np.ndarray:
    """kappa for every undirected edge, aligned with graph.edge_array()"""
    edges = graph.edge_array()
    if len(edges) == 0:
        return np.zeros(0, dtype=np.float64)
    chunks = _chunks(edges, workers)
    bar = dict(total=len(chunks), desc='curvature', disable=not progress_enabled())
    if workers <= 1:
        _init_worker(graph, tau)
        parts = [_curvature_chunk(c) for c in tqdm(chunks, **bar)]
    else:
        with Pool(processes=workers, initializer=_init_worker, initargs=(graph, tau)) as pool:
            parts = list(tqdm(pool.imap(_curvature_chunk, chunks), **bar))
    kappa = np.concatenate(parts)
    logger.info('curvature of %d edges: mean %.4f, min %.4f, max %.4f',
                len(kappa), kappa.mean(), kappa.min(), kappa.max())
    return kappa


def _edge_lookup(graph: AttributedGraph, src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """position in graph.edge_array() of each (src, dst) pair, either orientation"""
    edges = graph.edge_array()
    n = graph.num_nodes
    keys = edges[:, 0] * n + edges[:, 1]
    lo, hi = np.minimum(src, dst), np.maximum(src, dst)
    return np.searchsorted(keys, lo * n + hi)


def pur_pattern(graph: AttributedGraph, kappa: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(src, dst, raw) over N_i + {i}: raw kappa on edges, 0 on the self entry"""
    n = graph.num_nodes
    src = np.repeat(np.arange(n), graph.degrees)
    dst = np.asarray(graph.indices, dtype=np.int64)
    raw = kappa[_edge_lookup(graph, src, dst)] if len(dst) else np.zeros(0)
    self_ids = np.arange(n)
    return (np.concatenate([src, self_ids]), np.concatenate([dst, self_ids]),
            np.concatenate([raw, np.zeros(n)]))


def _row_softmax(adj: WeightedAdjacency) -> WeightedAdjacency:
    starts = adj.indptr[:-1]
    w = adj.weights
    shifted = w - np.repeat(np.maximum.reduceat(w, starts), adj.set_sizes())
    e = np.exp(shifted)
    e = e / np.repeat(np.add.reduceat(e, starts), adj.set_sizes())
    return WeightedAdjacency(adj.num_nodes, adj.indptr, adj.indices, e)


def purified_adjacency(graph: AttributedGraph, tau: float, kappa: np.ndarray | None = None,
                       workers: int = 1, normalize: bool = True) -> WeightedAdjacency:
    """
    Row-softmax of the curvature weights over each node's closed neighborhood.
    With normalize=False the raw (possibly negative) weights are returned.
    """
    if kappa is None:
        kappa = all_curvatures(graph, tau, workers)
    raw = WeightedAdjacency.from_triplets(graph.num_nodes, *pur_pattern(graph, kappa))
    return _row_softmax(raw) if normalize else raw
