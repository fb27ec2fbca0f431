import logging

import numpy as np

from utill.errors import ConfigError
from utill.gen import make_rng
from .graphModels import AttributedGraph, NodeSplits

logger = logging.getLogger(__name__)


def _cut(ids: np.ndarray, r: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    n = len(ids)
    n_train = int(np.floor(n * r[0] + 1e-9))
    n_val = min(int(np.floor(n * r[1] + 1e-9)), n - n_train)
    return ids[:n_train], ids[n_train:n_train + n_val], ids[n_train + n_val:]


def split_nodes(graph: AttributedGraph, ratios, seed: int, stratify: bool = False) -> NodeSplits:
    """
    seeded permutation cut into floor(N*r_train) / floor(N*r_val) / rest.
    With `stratify` every label class is permuted and cut on its own.
    """
    r = np.asarray(ratios, dtype=np.float64)
    if r.shape != (3,) or (r < 0).any() or r.sum() <= 0:
        raise ConfigError(f'split ratios must be three non-negative numbers with positive sum, got {ratios}')
    r = r / r.sum()
    n = graph.num_nodes
    if not stratify:
        parts = _cut(make_rng(seed, 'split').permutation(n), r)
    else:
        if graph.labels is None:
            raise ConfigError('stratified splits need node labels')
        pieces = []
        for cls in np.unique(graph.labels):
            members = np.flatnonzero(graph.labels == cls)
            pieces.append(_cut(make_rng(seed, 'split', int(cls)).permutation(members), r))
        parts = tuple(np.concatenate([p[k] for p in pieces]) for k in range(3))
    return NodeSplits(*(np.sort(p) for p in parts))


def _node_ratios(graph: AttributedGraph, labels) -> tuple[np.ndarray, np.ndarray]:
    y = np.asarray(labels)
    if y.shape != (graph.num_nodes,):
        raise ValueError(f'labels length {y.shape} does not match N={graph.num_nodes}')
    deg = graph.degrees
    src = np.repeat(np.arange(graph.num_nodes), deg)
    differs = (y[src] != y[graph.indices]).astype(np.float64)
    counts = np.bincount(src, weights=differs, minlength=graph.num_nodes)
    ok = deg > 0
    ratios = np.zeros(graph.num_nodes)
    ratios[ok] = counts[ok] / deg[ok]
    return ratios, ok


def heterophily_ratio(graph: AttributedGraph, labels) -> float:
    """mean over non-isolated nodes of the fraction of differently-labeled neighbors"""
    ratios, ok = _node_ratios(graph, labels)
    skipped = int((~ok).sum())
    if skipped:
        logger.warning('heterophily ratio: %d isolated node(s) excluded from the average', skipped)
    if not ok.any():
        return 0.0
    return float(ratios[ok].mean())


def heterophily_by_class(graph: AttributedGraph, labels) -> dict:
    """overall ratio plus the same average restricted to anomalous (1) and normal (0) nodes"""
    ratios, ok = _node_ratios(graph, labels)
    y = np.asarray(labels)
    out = {'overall': float(ratios[ok].mean()) if ok.any() else 0.0}
    for name, cls in (('anomalous', 1), ('normal', 0)):
        mask = ok & (y == cls)
        out[name] = float(ratios[mask].mean()) if mask.any() else None
    out['isolated'] = int((~ok).sum())
    return out
