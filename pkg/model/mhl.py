"""
Multi-hypersphere objective.

One global center c0 and K community centers (soft-membership weighted means
of the embeddings) act as hypersphere centers; a contrastive term between the
communities and their sharpened copies keeps the encoder from collapsing.
"""
from dataclasses import dataclass

import numpy as np

from utill.errors import ConfigError
from .autodiff import (ExpressionGraph, Node, col_scale, col_sum, cosine, diag, exp, gather, log, mean,
                       mul, reciprocal, row_scale, row_softmax, row_sum, scale, select_rows, sqnorm_rows,
                       sub_row, transpose)
from .encoder import EncoderStructure, assign, encode, num_layers_of

CENTER_MODES = ('init', 'update', 'train')
OUTPUTS = ('z', 'p', 'p_plus', 'c', 'c_plus', 'per_node_glo', 'per_node_loc',
           'glo', 'loc', 'clu', 'total', 'score')


@dataclass
class GlobalCenter:
    c0: np.ndarray
    mode: str

    def __post_init__(self):
        if self.mode not in CENTER_MODES:
            raise ConfigError(f'unknown center mode {self.mode!r}')
        self.c0 = np.asarray(self.c0, dtype=np.float64).reshape(1, -1)


@dataclass
class LossBreakdown:
    glo: float
    loc: float
    clu: float
    total: float
    per_node_glo: np.ndarray
    per_node_loc: np.ndarray

    @classmethod
    def from_values(cls, values: dict) -> 'LossBreakdown':
        return cls(float(values['glo'][0, 0]), float(values['loc'][0, 0]), float(values['clu'][0, 0]),
                   float(values['total'][0, 0]), values['per_node_glo'][:, 0].copy(),
                   values['per_node_loc'][:, 0].copy())

    def finite(self) -> bool:
        return bool(np.isfinite([self.glo, self.loc, self.clu, self.total]).all())


# ---graph builders---

def augment_assignments_node(p: Node) -> Node:
    f = col_sum(p)
    return row_softmax(col_scale(mul(p, p), reciprocal(f)))


def community_reps_node(p: Node, z: Node) -> Node:
    f = transpose(col_sum(p))
    return row_scale(transpose(p) @ z, reciprocal(f))


def contrastive_node(a: Node, b: Node) -> Node:
    """mean over rows k of -log softmax_k'(cos(a_k, b_k'))[k]"""
    s = cosine(a, b)
    return mean(log(row_sum(exp(s))) - diag(s))


def per_node_global(z: Node, center: Node) -> Node:
    return sqnorm_rows(sub_row(z, center))


def per_node_local(z: Node, p: Node, c: Node) -> Node:
    return sqnorm_rows(z - select_rows(c, p))


def masked_mean(per_node: Node, ids: np.ndarray) -> Node:
    return mean(gather(per_node, ids))


# ---plain-array entry points---

def _run(build, *arrays) -> np.ndarray:
    g = ExpressionGraph()
    nodes = [g.input(f'a{k}', a) for k, a in enumerate(arrays)]
    return build(*nodes).value


def augment_assignments(p: np.ndarray) -> np.ndarray:
    return _run(augment_assignments_node, p)


def community_reps(p: np.ndarray, z: np.ndarray) -> np.ndarray:
    return _run(community_reps_node, p, z)


def loss_global(z: np.ndarray, center: np.ndarray, train_ids) -> tuple[float, np.ndarray]:
    per = _run(per_node_global, z, np.asarray(center, dtype=np.float64).reshape(1, -1))
    return float(per[np.asarray(train_ids), 0].mean()), per[:, 0]


def loss_local(z: np.ndarray, p: np.ndarray, c: np.ndarray, train_ids) -> tuple[float, np.ndarray]:
    per = _run(per_node_local, z, p, c)
    return float(per[np.asarray(train_ids), 0].mean()), per[:, 0]


def loss_cluster_regularized(c: np.ndarray, c_plus: np.ndarray) -> float:
    if c.shape[0] < 2:
        raise ConfigError('the clustering loss needs at least 2 communities')
    return float(_run(contrastive_node, c, c_plus)[0, 0])


def loss_cluster_plain(p: np.ndarray, p_plus: np.ndarray | None = None) -> float:
    """contrast the assignment columns of P against those of its sharpened copy"""
    if p_plus is None:
        p_plus = augment_assignments(p)
    return float(_run(lambda a, b: contrastive_node(transpose(a), transpose(b)), p, p_plus)[0, 0])


def total_loss(glo: float, loc: float, clu: float, lambda_loc: float, lambda_clu: float) -> float:
    return glo + lambda_loc * loc + lambda_clu * clu


def anomaly_scores(z: np.ndarray, center: np.ndarray, communities: np.ndarray, p: np.ndarray,
                   lambda_loc: float, glo_weight: float = 1.0) -> np.ndarray:
    _, glo = loss_global(z, center, np.arange(len(z)))
    _, loc = loss_local(z, p, communities, np.arange(len(z)))
    return glo_weight * glo + lambda_loc * loc


def derive_center(mode: str, z: np.ndarray) -> GlobalCenter:
    """mean embedding; under `init` it is frozen, under `update` recomputed, under `train` learned"""
    if mode not in CENTER_MODES:
        raise ConfigError(f'unknown center mode {mode!r}')
    return GlobalCenter(np.asarray(z, dtype=np.float64).mean(axis=0, keepdims=True), mode)


# ---the training objective---

@dataclass(eq=False)
class Objective:
    graph: ExpressionGraph
    center_mode: str

    def evaluate(self, outputs=OUTPUTS) -> dict:
        return self.graph.evaluate(outputs=outputs)

    def breakdown(self) -> LossBreakdown:
        return LossBreakdown.from_values(self.evaluate(('per_node_glo', 'per_node_loc', 'glo', 'loc', 'clu', 'total')))

    def scores(self) -> np.ndarray:
        return self.evaluate(('score',))['score'][:, 0].copy()

    def embeddings(self) -> np.ndarray:
        return self.evaluate(('z',))['z'].copy()

    @property
    def trainable(self) -> list[str]:
        return list(self.graph.params)

    def parameters(self) -> dict[str, np.ndarray]:
        return {k: v.value.copy() for k, v in self.graph.params.items()}

    def center(self) -> np.ndarray:
        return self.graph.leaves['center'].value.copy()

    def load(self, params: dict[str, np.ndarray], center: np.ndarray | None = None):
        bound = {k: v for k, v in params.items() if k in self.graph.leaves}
        if center is not None:
            bound['center'] = np.asarray(center).reshape(1, -1)
        self.graph.bind(bound)


def build_objective(structure: EncoderStructure, attributes: np.ndarray, train_ids, params: dict,
                    center: GlobalCenter, weights: tuple[float, float, float], regularized: bool = True,
                    num_layers: int | None = None) -> Objective:
    """
    Record encoder, assignment, centers, losses and scores on one expression graph.
    `weights` are the (glo, loc, clu) coefficients; a zero glo or loc weight also
    drops that term from the score.
    """
    w_glo, w_loc, w_clu = weights
    train_ids = np.asarray(train_ids, dtype=np.int64)
    g = ExpressionGraph()
    x = g.input('x', attributes)
    nodes = {k: g.param(k, v) for k, v in params.items()}
    c0 = g.param('center', center.c0) if center.mode == 'train' else g.input('center', center.c0)
    if num_layers is None:
        num_layers = num_layers_of(params)

    z = g.output('z', encode(x, structure, nodes, num_layers))
    p = g.output('p', assign(z, structure, nodes))
    p_plus = g.output('p_plus', augment_assignments_node(p))
    c = g.output('c', community_reps_node(p, z))
    c_plus = g.output('c_plus', community_reps_node(p_plus, z))

    per_glo = g.output('per_node_glo', per_node_global(z, c0))
    per_loc = g.output('per_node_loc', per_node_local(z, p, c))
    glo = g.output('glo', masked_mean(per_glo, train_ids))
    loc = g.output('loc', masked_mean(per_loc, train_ids))
    if regularized:
        clu = contrastive_node(c, c_plus)
    else:
        clu = contrastive_node(transpose(p), transpose(p_plus))
    g.output('clu', clu)
    g.output('total', scale(glo, w_glo) + scale(loc, w_loc) + scale(clu, w_clu))
    g.output('score', scale(per_glo, w_glo) + scale(per_loc, w_loc))
    return Objective(g, center.mode)
