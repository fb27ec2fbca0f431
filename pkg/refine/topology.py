"""
The refined topology computed once by `preprocess` and cached as CSV files:

    a_pur.csv       src,dst,weight   row-softmax purified adjacency
    a_pur_raw.csv   src,dst,weight   raw curvature weights (self entry 0)
    a_aug.csv       src,dst,weight   row-normalized augmented adjacency
    curvature.csv   src,dst,kappa    one row per undirected edge, src < dst
    gdv.csv         node,o0..oK      graphlet degree vectors
    topology.json   parameters and sizes
"""
import json
import logging
import os
from dataclasses import dataclass

import numpy as np
import pandas as pd

from graph import AttributedGraph
from utill.errors import MissingArtifactError
from .adjacency import WeightedAdjacency
from .augment import augmented_adjacency
from .curvature import all_curvatures, pur_pattern, purified_adjacency
from .graphlet import GdvMatrix, gdv

logger = logging.getLogger(__name__)

FILES = ('a_pur.csv', 'a_pur_raw.csv', 'a_aug.csv', 'curvature.csv', 'gdv.csv', 'topology.json')
FLOAT_FORMAT = '%.17g'


@dataclass(frozen=True, eq=False)
class RefinedTopology:
    a_pur: WeightedAdjacency
    a_aug: WeightedAdjacency
    a_pur_raw: WeightedAdjacency
    edges: np.ndarray
    raw_curvatures: np.ndarray
    gdv: GdvMatrix
    params: dict

    @property
    def num_nodes(self) -> int:
        return self.a_pur.num_nodes

    def curvature_of(self, i: int, j: int) -> float:
        lo, hi = min(i, j), max(i, j)
        hit = np.flatnonzero((self.edges[:, 0] == lo) & (self.edges[:, 1] == hi))
        if len(hit) == 0:
            raise KeyError((i, j))
        return float(self.raw_curvatures[hit[0]])

    def permuted(self, perm: np.ndarray) -> 'RefinedTopology':
        """relabel node old -> perm[old]"""
        e = perm[self.edges]
        order = np.lexsort((e.max(axis=1), e.min(axis=1)))
        e = np.sort(e, axis=1)[order]
        counts = np.empty_like(self.gdv.counts)
        counts[perm] = self.gdv.counts
        return RefinedTopology(self.a_pur.permuted(perm), self.a_aug.permuted(perm),
                               self.a_pur_raw.permuted(perm), e, self.raw_curvatures[order],
                               GdvMatrix(counts, self.gdv.max_graphlet_size), dict(self.params))


def build_topology(graph: AttributedGraph, tau: float = 0.5, max_graphlet_size: int = 4,
                   delta: float = 1.0, workers: int = 1) -> RefinedTopology:
    logger.info('refining topology: N=%d |E|=%d tau=%g T=%d delta=%g workers=%d',
                graph.num_nodes, graph.num_edges, tau, max_graphlet_size, delta, workers)
    kappa = all_curvatures(graph, tau, workers)
    a_pur = purified_adjacency(graph, tau, kappa)
    a_raw = WeightedAdjacency.from_triplets(graph.num_nodes, *pur_pattern(graph, kappa))
    counts = gdv(graph, max_graphlet_size, workers)
    a_aug = augmented_adjacency(graph, counts, delta)
    params = dict(tau=tau, max_graphlet_size=max_graphlet_size, delta=delta,
                  num_nodes=graph.num_nodes, num_edges=graph.num_edges)
    return RefinedTopology(a_pur, a_aug, a_raw, np.array(graph.edge_array()), kappa, counts, params)


def _write_adjacency(adj: WeightedAdjacency, path):
    src, dst, w = adj.triplets()
    pd.DataFrame({'src': src, 'dst': dst, 'weight': w}).to_csv(path, index=False, float_format=FLOAT_FORMAT)


def _read_adjacency(path, num_nodes: int) -> WeightedAdjacency:
    df = pd.read_csv(path, dtype={'src': np.int64, 'dst': np.int64, 'weight': np.float64},
                     float_precision='round_trip')
    return WeightedAdjacency.from_triplets(num_nodes, df['src'].to_numpy(), df['dst'].to_numpy(),
                                           df['weight'].to_numpy())


def save_topology(topology: RefinedTopology, out_dir) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    paths = [os.path.join(out_dir, f) for f in FILES]
    _write_adjacency(topology.a_pur, paths[0])
    _write_adjacency(topology.a_pur_raw, paths[1])
    _write_adjacency(topology.a_aug, paths[2])
    pd.DataFrame({'src': topology.edges[:, 0], 'dst': topology.edges[:, 1],
                  'kappa': topology.raw_curvatures}).to_csv(paths[3], index=False, float_format=FLOAT_FORMAT)
    g = pd.DataFrame(topology.gdv.counts, columns=topology.gdv.columns())
    g.insert(0, 'node', np.arange(topology.num_nodes))
    g.to_csv(paths[4], index=False)
    with open(paths[5], 'w', encoding='utf8') as f:
        json.dump(topology.params, f, indent=2, sort_keys=True)
    logger.info('topology cache written to %s', out_dir)
    return paths


def load_topology(out_dir) -> RefinedTopology:
    paths = [os.path.join(out_dir, f) for f in FILES]
    for p in paths:
        if not os.path.exists(p):
            raise MissingArtifactError(p, 'preprocess')
    with open(paths[5], encoding='utf8') as f:
        params = json.load(f)
    n = int(params['num_nodes'])
    kap = pd.read_csv(paths[3], float_precision='round_trip')
    g = pd.read_csv(paths[4]).sort_values('node')
    counts = g.drop(columns='node').to_numpy(dtype=np.int64)
    return RefinedTopology(
        a_pur=_read_adjacency(paths[0], n),
        a_aug=_read_adjacency(paths[2], n),
        a_pur_raw=_read_adjacency(paths[1], n),
        edges=kap[['src', 'dst']].to_numpy(dtype=np.int64).reshape(-1, 2),
        raw_curvatures=kap['kappa'].to_numpy(dtype=np.float64),
        gdv=GdvMatrix(counts, int(params['max_graphlet_size'])),
        params=params,
    )


def check_params(topology: RefinedTopology, tau: float, max_graphlet_size: int, delta: float):
    """warn when the cache was built with other refinement parameters"""
    want = dict(tau=tau, max_graphlet_size=max_graphlet_size, delta=delta)
    for k, v in want.items():
        have = topology.params.get(k)
        if have is not None and have != v:
            logger.warning('topology cache has %s=%s but the run asks for %s', k, have, v)
