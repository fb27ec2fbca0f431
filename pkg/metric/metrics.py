import numpy as np
from scipy.stats import rankdata

from api.verifyModel import MetricReport
from utill.errors import SingleClassError


def _prepare(scores, labels) -> tuple[np.ndarray, np.ndarray]:
    s = np.asarray(scores, dtype=np.float64).ravel()
    y = np.asarray(labels).ravel()
    if s.shape != y.shape:
        raise ValueError(f'{len(s)} scores for {len(y)} labels')
    if not np.isin(y, (0, 1)).all():
        raise ValueError('labels must be 0/1')
    return s, y.astype(np.int64)


def auroc(scores, labels) -> float:
    """Mann-Whitney form: P(random positive outscores random negative), ties count 1/2"""
    s, y = _prepare(scores, labels)
    n_pos = int(y.sum())
    n_neg = len(y) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClassError(f'auroc needs both classes, got {n_pos} positive / {n_neg} negative')
    ranks = rankdata(s)  # average ranks for ties
    return float((ranks[y == 1].sum() - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg))


def aupr(scores, labels) -> float:
    """average precision (step estimator); equal scores ordered by node id"""
    s, y = _prepare(scores, labels)
    n_pos = int(y.sum())
    if n_pos == 0:
        raise SingleClassError('aupr needs at least one positive')
    order = np.lexsort((np.arange(len(s)), -s))
    hit = y[order]
    precision = np.cumsum(hit) / np.arange(1, len(hit) + 1)
    return float(precision[hit == 1].sum() / n_pos)


def evaluate_scores(scores, labels, ids=None) -> MetricReport:
    s, y = _prepare(scores, labels)
    if ids is not None:
        ids = np.asarray(ids, dtype=np.int64)
        s, y = s[ids], y[ids]
    n_pos = int(y.sum())
    return MetricReport(auroc=auroc(s, y), aupr=aupr(s, y), num_pos=n_pos, num_neg=len(y) - n_pos)
