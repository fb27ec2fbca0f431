"""
Graphlet degree vectors by ESU enumeration of connected induced subgraphs.

Orbit numbering follows ORCA:
  0 edge endpoint
  1, 2 path-of-3 end / middle; 3 triangle
  4, 5 path-of-4 end / middle; 6, 7 star leaf / center; 8 4-cycle
  9, 10, 11 paw tail / triangle degree-2 / triangle degree-3
  12, 13 diamond degree-2 / degree-3; 14 4-clique
"""
import logging
from dataclasses import dataclass
from multiprocessing import Pool

import numpy as np
from tqdm import tqdm

from graph import AttributedGraph
from utill.errors import ConfigError
from utill.logger import progress_enabled

logger = logging.getLogger(__name__)

ORBITS = {2: 1, 3: 4, 4: 15}


@dataclass(frozen=True, eq=False)
class GdvMatrix:
    counts: np.ndarray
    max_graphlet_size: int

    @property
    def num_orbits(self) -> int:
        return self.counts.shape[1]

    def columns(self) -> list[str]:
        return [f'o{k}' for k in range(self.num_orbits)]


def _orbit_of_3(edge_count: int, deg: int) -> int:
    if edge_count == 3:
        return 3
    return 1 if deg == 1 else 2


def _orbit_of_4(edge_count: int, degs: list[int], deg: int) -> int:
    if edge_count == 3:
        if 3 in degs:
            return 7 if deg == 3 else 6
        return 4 if deg == 1 else 5
    if edge_count == 4:
        if 3 in degs:
            return {1: 9, 2: 10, 3: 11}[deg]
        return 8
    if edge_count == 5:
        return 12 if deg == 2 else 13
    return 14


def _classify(nodes: list[int], adj: list[set], counts: np.ndarray):
    size = len(nodes)
    if size == 2:
        counts[nodes[0], 0] += 1
        counts[nodes[1], 0] += 1
        return
    degs = [sum(1 for v in nodes if v in adj[u]) for u in nodes]
    edge_count = sum(degs) // 2
    for u, d in zip(nodes, degs):
        o = _orbit_of_3(edge_count, d) if size == 3 else _orbit_of_4(edge_count, degs, d)
        counts[u, o] += 1


def _extend(sub: list[int], sub_nb: set, ext: list[int], root: int, max_size: int,
            adj: list[set], counts: np.ndarray):
    # each node of the ESU tree is one connected induced subgraph with min vertex `root`
    if len(sub) >= 2:
        _classify(sub, adj, counts)
    if len(sub) == max_size:
        return
    ext = list(ext)
    while ext:
        w = ext.pop()
        exclusive = [u for u in adj[w] if u > root and u not in sub_nb and u not in sub]
        _extend(sub + [w], sub_nb | adj[w], ext + exclusive, root, max_size, adj, counts)


def _count_roots(roots, adj: list[set], num_nodes: int, max_size: int) -> np.ndarray:
    counts = np.zeros((num_nodes, ORBITS[max_size]), dtype=np.int64)
    for v in roots:
        ext = [u for u in adj[v] if u > v]
        _extend([v], set(adj[v]) | {v}, ext, v, max_size, adj, counts)
    return counts


# ---per-worker state for the process pool---
_adj: list[set] = []
_n: int = 0
_size: int = 4


def _init_worker(adj: list[set], num_nodes: int, max_size: int):
    global _adj, _n, _size
    _adj, _n, _size = adj, num_nodes, max_size


def _count_chunk(roots) -> np.ndarray:
    return _count_roots(roots, _adj, _n, _size)


def gdv(graph: AttributedGraph, max_size: int = 4, workers: int = 1) -> GdvMatrix:
    if max_size not in (3, 4):
        raise ConfigError(f'max_graphlet_size must be 3 or 4, got {max_size}')
    n = graph.num_nodes
    adj = [set(graph.neighbors(i).tolist()) for i in range(n)]
    roots = np.arange(n)
    chunks = [c for c in np.array_split(roots, max(1, min(n, workers * 4))) if len(c)]
    bar = dict(total=len(chunks), desc='graphlets', disable=not progress_enabled())
    if workers <= 1 or n == 0:
        parts = [_count_roots(c.tolist(), adj, n, max_size) for c in tqdm(chunks, **bar)]
    else:
        with Pool(processes=workers, initializer=_init_worker, initargs=(adj, n, max_size)) as pool:
            parts = list(tqdm(pool.imap(_count_chunk, [c.tolist() for c in chunks]), **bar))
    counts = np.zeros((n, ORBITS[max_size]), dtype=np.int64)
    for p in parts:
        counts += p
    logger.info('graphlet degree vectors: %d nodes, %d orbits (T=%d)', n, counts.shape[1], max_size)
    return GdvMatrix(counts, max_size)
