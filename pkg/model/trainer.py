import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from api.verifyModel import TrainConfig
from graph import AttributedGraph, NodeSplits
from refine import RefinedTopology
from utill.errors import ShapeError, SingleClassError, TrainingDivergedError
from utill.gen import make_rng
from metric.metrics import auroc
from .encoder import EncoderStructure, init_assign_params, init_encoder_params
from .mhl import GlobalCenter, LossBreakdown, Objective, build_objective, derive_center

logger = logging.getLogger(__name__)

HISTORY_COLUMNS = ['epoch', 'glo', 'loc', 'clu', 'total', 'val_metric']


@dataclass
class AdamState:
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)
    t: int = 0


def adam_step(params: dict, grads: dict, state: AdamState, lr: float, weight_decay: float = 0.0,
              betas=(0.9, 0.999), eps: float = 1e-8, no_decay=()) -> tuple[dict, AdamState]:
    """
    bias-corrected Adam; weight decay enters as weight_decay * theta added to the
    gradient of every param not named in `no_decay`
    """
    b1, b2 = betas
    t = state.t + 1
    new_params, m_out, v_out = {}, {}, {}
    for name, theta in params.items():
        g = grads.get(name)
        if g is None:
            new_params[name] = theta
            continue
        if g.shape != theta.shape:
            raise ShapeError(f'adam_step {name}', theta.shape, g.shape)
        if name not in no_decay:
            g = g + weight_decay * theta
        m = b1 * state.m.get(name, np.zeros_like(theta)) + (1 - b1) * g
        v = b2 * state.v.get(name, np.zeros_like(theta)) + (1 - b2) * g * g
        m_hat = m / (1 - b1 ** t)
        v_hat = v / (1 - b2 ** t)
        new_params[name] = theta - lr * m_hat / (np.sqrt(v_hat) + eps)
        m_out[name], v_out[name] = m, v
    return new_params, AdamState(m_out, v_out, t)


@dataclass
class EpochRecord:
    epoch: int
    losses: LossBreakdown
    val_metric: float


@dataclass
class TrainHistory:
    stopping_mode: str
    records: list[EpochRecord] = field(default_factory=list)
    best_epoch: int = -1

    def __len__(self):
        return len(self.records)

    def to_frame(self) -> pd.DataFrame:
        rows = [(r.epoch, r.losses.glo, r.losses.loc, r.losses.clu, r.losses.total, r.val_metric)
                for r in self.records]
        return pd.DataFrame(rows, columns=HISTORY_COLUMNS)


def history_to_csv(history: TrainHistory, path):
    history.to_frame().to_csv(path, index=False, float_format='%.17g')


def init_parameters(config: TrainConfig, d_in: int, rng: np.random.Generator) -> dict:
    params = init_encoder_params(d_in, config.hidden_dim, config.num_layers, rng)
    params.update(init_assign_params(config.hidden_dim, config.num_clusters, rng))
    return params


def make_objective(graph: AttributedGraph, topology: RefinedTopology, train_ids, config: TrainConfig,
                   params: dict, center: GlobalCenter) -> Objective:
    structure = EncoderStructure.build(graph, topology, config.variant)
    return build_objective(structure, graph.attributes, train_ids, params, center, config.weights,
                           regularized=config.variant != 'no_reg', num_layers=config.num_layers)


def _improved(mode: str, metric: float, best: float | None) -> bool:
    if best is None:
        return True
    return metric > best if mode == 'val_auroc' else metric < best


def train(graph: AttributedGraph, topology: RefinedTopology, splits: NodeSplits,
          config: TrainConfig) -> tuple[dict, GlobalCenter, TrainHistory]:
    """
    Full-batch training, one Adam step per epoch. Every epoch records the
    losses of the forward pass taken before its step; the returned parameters
    (and center) are the ones that produced the best recorded epoch.
    """
    if config.stopping_mode == 'val_auroc':
        if graph.labels is None:
            raise SingleClassError('stopping_mode val_auroc needs labels')
        val_labels = graph.labels[splits.val_ids]
        if len(val_labels) == 0 or val_labels.min() == val_labels.max():
            raise SingleClassError('validation split must contain both anomalous and normal nodes '
                                   'for stopping_mode val_auroc')

    rng = make_rng(config.seed, 'init')
    params = init_parameters(config, graph.num_features, rng)
    placeholder = GlobalCenter(np.zeros((1, config.hidden_dim)), config.center_mode)
    objective = make_objective(graph, topology, splits.train_ids, config, params, placeholder)
    center = derive_center(config.center_mode, objective.embeddings())
    objective.load({}, center.c0)
    logger.info('training %s: N=%d d_in=%d d=%d K=%d center=%s stopping=%s',
                config.variant, graph.num_nodes, graph.num_features, config.hidden_dim,
                config.num_clusters, config.center_mode, config.stopping_mode)

    history = TrainHistory(config.stopping_mode)
    state = AdamState()
    best_metric, best_params, best_center = None, None, None
    for epoch in range(config.max_epochs):
        if config.center_mode == 'update' and epoch > 0:
            objective.load({}, objective.embeddings().mean(axis=0, keepdims=True))
        values = objective.evaluate()
        losses = LossBreakdown.from_values(values)
        if not losses.finite():
            raise TrainingDivergedError(epoch)
        if config.stopping_mode == 'val_auroc':
            metric = auroc(values['score'][splits.val_ids, 0], val_labels)
        else:
            metric = losses.total
        history.records.append(EpochRecord(epoch, losses, metric))
        logger.debug('epoch %d glo=%.6g loc=%.6g clu=%.6g total=%.6g metric=%.6g',
                     epoch, losses.glo, losses.loc, losses.clu, losses.total, metric)
        if _improved(config.stopping_mode, metric, best_metric):
            best_metric, history.best_epoch = metric, epoch
            best_params, best_center = objective.parameters(), objective.center()
        elif epoch - history.best_epoch >= config.patience:
            logger.info('early stop at epoch %d, no improvement for %d epochs', epoch, config.patience)
            break

        grads = objective.graph.gradients('total')
        current = objective.parameters()
        updated, state = adam_step(current, grads, state, config.learning_rate, config.weight_decay,
                                   no_decay=('center',))
        objective.load(updated)

    best_params.pop('center', None)
    logger.info('best epoch %d of %d, metric %.6g', history.best_epoch, len(history), best_metric)
    return best_params, GlobalCenter(best_center, config.center_mode), history


def score_nodes(graph: AttributedGraph, topology: RefinedTopology, config: TrainConfig,
                params: dict, center: GlobalCenter) -> np.ndarray:
    objective = make_objective(graph, topology, np.arange(graph.num_nodes), config, params, center)
    return objective.scores()


def evaluate_losses(graph: AttributedGraph, topology: RefinedTopology, train_ids, config: TrainConfig,
                    params: dict, center: GlobalCenter) -> LossBreakdown:
    return make_objective(graph, topology, train_ids, config, params, center).breakdown()
