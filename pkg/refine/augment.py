import logging

import numpy as np

from graph import AttributedGraph
from .adjacency import WeightedAdjacency
from .graphlet import GdvMatrix

logger = logging.getLogger(__name__)

SIM_TOL = 1e-12
BLOCK_ROWS = 1024


def unit_rows(counts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """L2-normalized GDV rows and the mask of rows with nonzero norm"""
    r = np.asarray(counts, dtype=np.float64)
    norms = np.linalg.norm(r, axis=1)
    nz = norms > 0
    unit = np.zeros_like(r)
    unit[nz] = r[nz] / norms[nz, None]
    return unit, nz


def snap(sims: np.ndarray) -> np.ndarray:
    """round-off around 1 is treated as exactly parallel"""
    sims = np.minimum(sims, 1.0)
    sims[sims >= 1.0 - SIM_TOL] = 1.0
    return sims


def augmented_adjacency(graph: AttributedGraph, gdv: GdvMatrix, delta: float = 1.0,
                        normalize: bool = True) -> WeightedAdjacency:
    """
    Connect every pair whose GDV cosine similarity is at least delta, weighted
    by sim * (deg_i + deg_j); the self entry gets 2 * deg_i. Isolated nodes
    (all-zero GDV) keep only {self: 1}.
    """
    n = graph.num_nodes
    if gdv.counts.shape[0] != n:
        raise ValueError(f'gdv has {gdv.counts.shape[0]} rows for {n} nodes')
    unit, nz = unit_rows(gdv.counts)
    deg = graph.degrees.astype(np.float64)
    cand = np.flatnonzero(nz)
    srcs, dsts, ws = [], [], []
    for start in range(0, len(cand), BLOCK_ROWS):
        rows = cand[start:start + BLOCK_ROWS]
        sims = snap(unit[rows] @ unit[cand].T)
        r, c = np.nonzero(sims >= delta - SIM_TOL)
        i, j = rows[r], cand[c]
        srcs.append(i)
        dsts.append(j)
        ws.append(sims[r, c] * (deg[i] + deg[j]))
    lonely = np.flatnonzero(~nz)
    srcs.append(lonely)
    dsts.append(lonely)
    ws.append(np.ones(len(lonely)))
    adj = WeightedAdjacency.from_triplets(n, np.concatenate(srcs), np.concatenate(dsts), np.concatenate(ws))
    logger.info('augmented adjacency: %d entries (%d off-diagonal), delta=%g',
                adj.nnz, adj.nnz - n, delta)
    if not normalize:
        return adj
    w = adj.weights / np.repeat(adj.row_sums(), adj.set_sizes())
    return WeightedAdjacency(n, adj.indptr, adj.indices, w)
