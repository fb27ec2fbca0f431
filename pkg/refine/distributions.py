"""Per-edge curvature and per-pair GDV similarity dumps, tagged by anomaly class."""
import logging

import numpy as np
import pandas as pd

from utill.gen import make_rng
from .augment import snap, unit_rows
from .graphlet import GdvMatrix

logger = logging.getLogger(__name__)


def pair_tag(labels, u: int, v: int) -> str:
    a = int(labels[u] == 1) + int(labels[v] == 1)
    return ('nn', 'an', 'aa')[a]


def _tags(labels, src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    labels = np.asarray(labels)
    a = (labels[src] == 1).astype(int) + (labels[dst] == 1).astype(int)
    return np.array(['nn', 'an', 'aa'])[a]


def kappa_distribution(edges: np.ndarray, kappa: np.ndarray, labels=None) -> pd.DataFrame:
    df = pd.DataFrame({'src': edges[:, 0], 'dst': edges[:, 1], 'kappa': kappa})
    if labels is not None:
        df['tag'] = _tags(labels, edges[:, 0], edges[:, 1])
    return df


def _pairs_within(ids: np.ndarray):
    iu, ju = np.triu_indices(len(ids), k=1)
    return ids[iu], ids[ju]


def gdv_similarity_distribution(gdv: GdvMatrix, labels, max_nn_pairs: int = 100000,
                                seed: int = 0) -> pd.DataFrame:
    """
    Cosine similarity of GDV rows for every anomalous-anomalous and
    anomalous-normal pair, plus up to `max_nn_pairs` normal-normal pairs drawn
    uniformly without replacement.
    """
    labels = np.asarray(labels)
    unit, _ = unit_rows(gdv.counts)
    anom = np.flatnonzero(labels == 1)
    norm = np.flatnonzero(labels != 1)

    aa_u, aa_v = _pairs_within(anom)
    an_u, an_v = np.repeat(anom, len(norm)), np.tile(norm, len(anom))
    an_u, an_v = np.minimum(an_u, an_v), np.maximum(an_u, an_v)

    total_nn = len(norm) * (len(norm) - 1) // 2
    if total_nn <= max_nn_pairs:
        nn_u, nn_v = _pairs_within(norm)
    else:
        rng = make_rng(seed, 'distributions')
        flat = rng.choice(total_nn, size=max_nn_pairs, replace=False)
        flat.sort()
        a, b = _unrank_pairs(flat, len(norm))
        nn_u, nn_v = norm[a], norm[b]
        logger.info('subsampled %d of %d normal-normal pairs', max_nn_pairs, total_nn)

    u = np.concatenate([aa_u, an_u, nn_u]).astype(np.int64)
    v = np.concatenate([aa_v, an_v, nn_v]).astype(np.int64)
    sims = snap(np.einsum('ij,ij->i', unit[u], unit[v])) if len(u) else np.zeros(0)
    tag = np.array(['aa'] * len(aa_u) + ['an'] * len(an_u) + ['nn'] * len(nn_u))
    return pd.DataFrame({'u': u, 'v': v, 'sim': sims, 'tag': tag})


def _unrank_pairs(flat: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """inverse of the row-major index of (a, b), a < b, in the upper triangle of n x n"""
    # pairs before row a: a*n - a*(a+1)/2
    flat = flat.astype(np.float64)
    a = np.floor(n - 0.5 - np.sqrt((n - 0.5) ** 2 - 2 * flat)).astype(np.int64)
    start = a * n - a * (a + 1) // 2
    # float round-off can land one row off
    over = start > flat
    a[over] -= 1
    start = a * n - a * (a + 1) // 2
    nxt = (a + 1) * n - (a + 1) * (a + 2) // 2
    under = nxt <= flat
    a[under] += 1
    start = a * n - a * (a + 1) // 2
    b = (flat.astype(np.int64) - start) + a + 1
    return a, b


def summarize(df: pd.DataFrame, column: str) -> dict:
    if 'tag' not in df:
        return {}
    g = df.groupby('tag')[column]
    return {tag: {'count': int(s.count()), 'mean': float(s.mean())} for tag, s in g}
