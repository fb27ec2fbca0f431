import logging

import networkx as nx
import numpy as np

from graph import AttributedGraph
from utill.gen import derive_seed, make_rng

logger = logging.getLogger(__name__)


def synth_graph(block_sizes, intra_p: float, inter_p: float, attr_centers=None, attr_noise: float = 1.0,
                seed: int = 0, num_features: int = 16, center_scale: float = 3.0,
                scale_spread: float = 0.0) -> AttributedGraph:
    """
    Stochastic block model structure with one Gaussian attribute blob per block.
    Without `attr_centers` the blob centers are drawn from N(0, center_scale^2).
    A positive `scale_spread` multiplies each attribute row by a log-normal factor
    exp(scale_spread * N(0, 1)), the way document length scales word counts.
    """
    for p in (intra_p, inter_p):
        if not 0 <= p <= 1:
            raise ValueError(f'edge probability {p} outside [0, 1]')
    sizes = [int(s) for s in block_sizes]
    probs = np.full((len(sizes), len(sizes)), float(inter_p))
    np.fill_diagonal(probs, float(intra_p))
    rng = make_rng(seed, 'synth')
    g = nx.stochastic_block_model(sizes, probs.tolist(), seed=derive_seed(rng))
    block = np.repeat(np.arange(len(sizes)), sizes)
    if attr_centers is None:
        attr_centers = rng.normal(scale=center_scale, size=(len(sizes), num_features))
    centers = np.asarray(attr_centers, dtype=np.float64).reshape(len(sizes), -1)
    attrs = centers[block] + rng.normal(scale=attr_noise, size=(len(block), centers.shape[1]))
    if scale_spread > 0:
        attrs = attrs * np.exp(scale_spread * rng.normal(size=(len(block), 1)))
    edges = np.array(list(g.edges()), dtype=np.int64).reshape(-1, 2)
    graph = AttributedGraph.from_edges(len(block), edges, attrs, np.zeros(len(block), dtype=np.int64))
    logger.debug('synthetic %r from blocks %s', graph, sizes)
    return graph
