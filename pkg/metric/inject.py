"""
Anomaly injection: structural anomalies are node groups turned into cliques,
contextual anomalies take the attribute row of the most distant node among a
random candidate pool.
"""
import logging
from itertools import combinations

import numpy as np

from api.verifyModel import InjectionSpec
from graph import AttributedGraph
from utill.errors import InsufficientNodesError
from utill.gen import make_rng

logger = logging.getLogger(__name__)


def _base_labels(graph: AttributedGraph) -> np.ndarray:
    if graph.labels is None:
        return np.zeros(graph.num_nodes, dtype=np.int64)
    return np.array(graph.labels, dtype=np.int64, copy=True)


def _cliques(graph: AttributedGraph, m: int, count: int, rng: np.random.Generator) -> np.ndarray:
    if count * m > graph.num_nodes:
        raise InsufficientNodesError(f'{count} cliques of {m} need {count * m} nodes, graph has {graph.num_nodes}')
    return rng.permutation(graph.num_nodes)[:count * m].reshape(count, m)


def inject_structural(graph: AttributedGraph, m: int, count: int, seed: int) -> tuple[AttributedGraph, np.ndarray]:
    groups = _cliques(graph, m, count, make_rng(seed, 'inject', 'structural'))
    return _apply_cliques(graph, groups)


def _apply_cliques(graph: AttributedGraph, groups: np.ndarray) -> tuple[AttributedGraph, np.ndarray]:
    extra = np.array([pair for grp in groups for pair in combinations(sorted(grp.tolist()), 2)],
                     dtype=np.int64).reshape(-1, 2)
    labels = _base_labels(graph)
    labels[groups.ravel()] = 1
    out = graph.with_edges(extra).with_labels(labels)
    logger.info('structural injection: %d cliques of %d, %d new edges',
                len(groups), groups.shape[1] if groups.size else 0, out.num_edges - graph.num_edges)
    return out, labels


def inject_contextual(graph: AttributedGraph, count: int, k: int, seed: int,
                      exclude=None) -> tuple[AttributedGraph, np.ndarray]:
    g, labels, _ = _contextual(graph, count, k, seed, exclude)
    return g, labels


def _contextual(graph: AttributedGraph, count: int, k: int, seed: int, exclude=None):
    n = graph.num_nodes
    excluded = np.zeros(n, dtype=bool)
    if exclude is not None:
        excluded[np.asarray(exclude, dtype=np.int64)] = True
    eligible = np.flatnonzero(~excluded)
    if count + k > n or count > len(eligible) or k > n - 1:
        raise InsufficientNodesError(f'{count} contextual targets with pool {k} need more than {n} nodes')
    rng = make_rng(seed, 'inject', 'contextual')
    targets = np.sort(rng.choice(eligible, size=count, replace=False))
    original = graph.attributes
    attrs = np.array(original, copy=True)
    everyone = np.arange(n)
    for t in targets:
        pool = rng.choice(everyone[everyone != t], size=k, replace=False)
        dist = np.linalg.norm(original[pool] - original[t], axis=1)
        attrs[t] = original[pool[np.argmax(dist)]]
    labels = _base_labels(graph)
    labels[targets] = 1
    logger.info('contextual injection: %d targets, pool %d', count, k)
    return graph.with_attributes(attrs).with_labels(labels), labels, targets


def inject_mixed(graph: AttributedGraph, rate: float, m: int, k: int,
                 seed: int) -> tuple[AttributedGraph, np.ndarray, InjectionSpec]:
    """
    Structural and contextual anomalies 1:1 within a total budget of round(N * rate):
    floor(budget/2 / m) cliques of m, the rest of the budget contextual.
    """
    budget = int(round(graph.num_nodes * rate))
    num_cliques = (budget // 2) // m
    if num_cliques == 0:
        raise InsufficientNodesError(f'a budget of {budget} anomalies (N={graph.num_nodes}, rate {rate}) '
                                     f'leaves {budget // 2} structural slots, less than one clique of {m}')
    groups = _cliques(graph, m, num_cliques, make_rng(seed, 'inject', 'structural'))
    g, _ = _apply_cliques(graph, groups)
    num_contextual = budget - num_cliques * m
    g, labels, targets = _contextual(g, num_contextual, k, seed, exclude=groups.ravel())
    anomalies = sorted(groups.ravel().tolist() + targets.tolist())
    spec = InjectionSpec(kind='mixed', clique_size=m, num_cliques=num_cliques, num_contextual=num_contextual,
                         candidate_pool_size=k, seed=seed, anomalies=anomalies)
    return g, labels, spec
