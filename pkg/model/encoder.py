"""
Heterophilic graph encoder.

Row-vector convention throughout: embeddings are N x d, weights are stored
d_in x d_out and applied as h @ W. Each layer runs two branches, one over the
purified neighborhoods and one over the augmented neighborhoods, and fuses
them with a linear map.
"""
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from graph import AttributedGraph
from refine import RefinedTopology, WeightedAdjacency
from .autodiff import (ExpressionGraph, Node, add_row, concat, edge_aggregate, gather, leaky_relu,
                       matmul, relu, row_softmax, scale, segment_softmax, spmm)

BRANCHES = ('pur', 'aug')
ACTIVATION_SLOPE = 0.01


@dataclass(frozen=True, eq=False)
class BranchStructure:
    """constant structure one branch aggregates over"""
    indptr: np.ndarray
    indices: np.ndarray
    rows: np.ndarray
    neighbor_matrix: sp.csr_matrix
    set_sizes: np.ndarray

    @classmethod
    def from_adjacency(cls, adj: WeightedAdjacency) -> 'BranchStructure':
        """
        neighbor_matrix[i, j] = (1 + a_ij) / sqrt(|N~_i| |N~_j|) for stored j != i,
        |N~| counting stored entries (self included).
        """
        sizes = adj.set_sizes().astype(np.float64)
        rows = adj.rows()
        off = rows != adj.indices
        w = (1.0 + adj.weights[off]) / np.sqrt(sizes[rows[off]] * sizes[adj.indices[off]])
        m = sp.csr_matrix((w, (rows[off], adj.indices[off])), shape=(adj.num_nodes, adj.num_nodes))
        return cls(adj.indptr, adj.indices, rows, m, sizes)

    @classmethod
    def from_graph(cls, graph: AttributedGraph) -> 'BranchStructure':
        """original adjacency plus self-loops, unit weights"""
        n = graph.num_nodes
        src = np.concatenate([np.repeat(np.arange(n), graph.degrees), np.arange(n)])
        dst = np.concatenate([graph.indices, np.arange(n)])
        return cls.from_adjacency(WeightedAdjacency.from_triplets(n, src, dst, np.ones(len(src))))


@dataclass(frozen=True, eq=False)
class EncoderStructure:
    pur: BranchStructure
    aug: BranchStructure
    original: BranchStructure
    variant: str = 'full'

    @classmethod
    def build(cls, graph: AttributedGraph, topology: RefinedTopology, variant: str = 'full') -> 'EncoderStructure':
        pur = topology.a_pur_raw if variant == 'neg_weights' else topology.a_pur
        return cls(BranchStructure.from_adjacency(pur), BranchStructure.from_adjacency(topology.a_aug),
                   BranchStructure.from_graph(graph), variant)

    def active(self, branch: str) -> bool:
        return not ((branch == 'aug' and self.variant == 'pur_only')
                    or (branch == 'pur' and self.variant == 'aug_only'))


def glorot(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=(fan_in, fan_out))


def init_encoder_params(d_in: int, hidden_dim: int, num_layers: int, rng: np.random.Generator) -> dict:
    params = {}
    d = d_in
    for l in range(num_layers):
        for b in BRANCHES:
            params[f'layer{l}.{b}.gamma'] = np.ones((1, 1))
            params[f'layer{l}.{b}.weight'] = glorot(rng, d, hidden_dim)
            params[f'layer{l}.{b}.attn'] = rng.uniform(-0.1, 0.1, size=(2 * hidden_dim, 1))
        params[f'layer{l}.fuse.weight'] = glorot(rng, 2 * hidden_dim, hidden_dim)
        params[f'layer{l}.fuse.bias'] = np.zeros((1, hidden_dim))
        d = hidden_dim
    return params


def init_assign_params(hidden_dim: int, num_clusters: int, rng: np.random.Generator) -> dict:
    return {'assign.weight': glorot(rng, hidden_dim, num_clusters),
            'assign.attn': rng.uniform(-0.1, 0.1, size=(2 * num_clusters, 1))}


def structural_aggregate(h: Node, branch: BranchStructure, gamma: Node) -> Node:
    return scale(h, gamma) + spmm(branch.neighbor_matrix, h)


def attention_aggregate(h: Node, branch: BranchStructure, weight: Node, attn: Node) -> Node:
    wh = matmul(h, weight)
    pair = concat(gather(wh, branch.rows), gather(wh, branch.indices))
    alpha = segment_softmax(relu(matmul(pair, attn)), branch.indptr)
    return edge_aggregate(alpha, wh, branch.indptr, branch.indices)


def hge_layer(h: Node, structure: EncoderStructure, params: dict[str, Node], layer: int) -> Node:
    g = h.graph
    hidden = params[f'layer{layer}.fuse.bias'].shape[1]
    outs = []
    for b in BRANCHES:
        if not structure.active(b):
            outs.append(g.const(np.zeros((h.shape[0], hidden))))
            continue
        branch = getattr(structure, b)
        p = f'layer{layer}.{b}'
        h5 = structural_aggregate(h, branch, params[f'{p}.gamma'])
        outs.append(attention_aggregate(h5, branch, params[f'{p}.weight'], params[f'{p}.attn']))
    fused = matmul(concat(*outs), params[f'layer{layer}.fuse.weight'])
    return add_row(fused, params[f'layer{layer}.fuse.bias'])


def encode(x: Node, structure: EncoderStructure, params: dict[str, Node], num_layers: int) -> Node:
    h = x
    for l in range(num_layers):
        h = hge_layer(h, structure, params, l)
        if l < num_layers - 1:
            h = leaky_relu(h, ACTIVATION_SLOPE)
    return h


def assign(z: Node, structure: EncoderStructure, params: dict[str, Node]) -> Node:
    """soft community assignment: one attention layer over the original graph, then row softmax"""
    logits = attention_aggregate(z, structure.original, params['assign.weight'], params['assign.attn'])
    return row_softmax(logits)


def num_layers_of(params: dict) -> int:
    return len({k.split('.')[0] for k in params if k.startswith('layer')})


def encode_values(attributes: np.ndarray, structure: EncoderStructure, params: dict) -> np.ndarray:
    """one-off forward pass on plain arrays"""
    g = ExpressionGraph()
    x = g.input('x', attributes)
    nodes = {k: g.param(k, v) for k, v in params.items() if k.startswith('layer')}
    return encode(x, structure, nodes, num_layers_of(nodes)).value
