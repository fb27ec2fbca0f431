import math

import numpy as np
import pytest

from api.verifyModel import TrainConfig
from graph import NodeSplits
from model import GlobalCenter, derive_center, finite_difference_check
from model.mhl import (anomaly_scores, augment_assignments, community_reps, loss_cluster_plain,
                       loss_cluster_regularized, loss_global, loss_local, total_loss)
from model.trainer import init_parameters, make_objective
from refine import build_topology
from utill.errors import ConfigError, ZeroNormError
from utill.gen import make_rng
from conftest import make_graph


def _random_p(rng, n, k):
    e = np.exp(rng.normal(size=(n, k)))
    return e / e.sum(axis=1, keepdims=True)


def test_augment_uniform_stays_uniform():
    p = np.full((5, 4), 0.25)
    np.testing.assert_allclose(augment_assignments(p), 0.25)


def test_augment_single_node():
    np.testing.assert_allclose(augment_assignments(np.array([[0.8, 0.2]])), [[0.6457, 0.3543]], atol=1e-4)


def test_augment_rows_sum_to_one():
    p_plus = augment_assignments(_random_p(make_rng(0, 'test', 'p'), 7, 3))
    np.testing.assert_allclose(p_plus.sum(axis=1), 1.0)


def test_community_reps_single_cluster_is_mean():
    z = make_rng(1, 'test', 'z').normal(size=(5, 3))
    np.testing.assert_allclose(community_reps(np.ones((5, 1)), z), z.mean(axis=0, keepdims=True))


def test_community_reps_identical_rows():
    z = np.tile([[1.0, -2.0]], (4, 1))
    p = _random_p(make_rng(2, 'test', 'p'), 4, 3)
    np.testing.assert_allclose(community_reps(p, z), np.tile([[1.0, -2.0]], (3, 1)))


def test_community_reps_oracle():
    rng = make_rng(3, 'test', 'reps')
    p, z = _random_p(rng, 3, 2), rng.normal(size=(3, 4))
    c = community_reps(p, z)
    for k in range(2):
        want = sum(p[i, k] * z[i] for i in range(3)) / sum(p[i, k] for i in range(3))
        np.testing.assert_allclose(c[k], want)


def test_empty_community_is_rejected():
    # nobody is assigned to the second community
    p = np.array([[1.0, 0.0], [1.0, 0.0], [1.0, 0.0]])
    z = make_rng(4, 'test', 'z').normal(size=(3, 2))
    with pytest.raises(ZeroNormError, match='zero'):
        community_reps(p, z)
    with pytest.raises(ZeroNormError):
        augment_assignments(p)


def test_global_loss_examples():
    mean, per = loss_global(np.array([[3.0, 4.0]]), np.zeros(2), [0])
    assert mean == 25.0 and per.tolist() == [25.0]
    z = np.tile([[1.0, 2.0]], (3, 1))
    assert loss_global(z, np.array([1.0, 2.0]), [0, 1, 2])[0] == 0.0


def test_global_loss_averages_train_ids_only():
    z = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 3.0]])
    mean, per = loss_global(z, np.zeros(2), [1, 2])
    assert mean == pytest.approx(5.0)
    assert per.tolist() == [0.0, 1.0, 9.0]


def test_local_loss_at_center_is_zero():
    c = np.array([[1.0, 1.0], [-1.0, 2.0]])
    p = np.array([[0.9, 0.1], [0.2, 0.8]])
    z = c.copy()
    assert loss_local(z, p, c, [0, 1])[0] == 0.0


def test_local_loss_ties_pick_lowest_index():
    c = np.array([[0.0, 0.0], [5.0, 5.0]])
    _, per = loss_local(np.array([[1.0, 0.0]]), np.array([[0.5, 0.5]]), c, [0])
    assert per.tolist() == [1.0]


def test_local_loss_single_cluster_equals_global_at_mean():
    z = make_rng(4, 'test', 'z').normal(size=(6, 3))
    p = np.ones((6, 1))
    c = community_reps(p, z)
    ids = [0, 2, 4]
    assert loss_local(z, p, c, ids)[0] == pytest.approx(loss_global(z, z.mean(axis=0), ids)[0])


def test_local_loss_oracle():
    rng = make_rng(5, 'test', 'local')
    z, p = rng.normal(size=(5, 3)), _random_p(rng, 5, 3)
    c = community_reps(p, z)
    _, per = loss_local(z, p, c, range(5))
    want = [np.sum((z[i] - c[np.argmax(p[i])]) ** 2) for i in range(5)]
    np.testing.assert_allclose(per, want)


@pytest.mark.parametrize('k', [2, 4, 8])
def test_collapsed_embeddings_give_log_k(k):
    z = np.tile([[0.3, -1.2, 2.0]], (10, 1))
    p = _random_p(make_rng(k, 'test', 'collapse'), 10, k)
    c = community_reps(p, z)
    c_plus = community_reps(augment_assignments(p), z)
    assert loss_cluster_regularized(c, c_plus) == pytest.approx(math.log(k), abs=1e-9)


def test_cluster_loss_k4_value():
    c = np.ones((4, 2))
    assert loss_cluster_regularized(c, c) == pytest.approx(1.3863, abs=1e-4)


def test_cluster_loss_orthogonal_pair():
    c = np.array([[1.0, 0.0], [0.0, 1.0]])
    assert loss_cluster_regularized(c, c) == pytest.approx(-math.log(math.e / (math.e + 1)), abs=1e-12)
    assert loss_cluster_regularized(c, c) == pytest.approx(0.3133, abs=1e-4)


def test_cluster_loss_non_negative():
    rng = make_rng(6, 'test', 'clu')
    for _ in range(20):
        assert loss_cluster_regularized(rng.normal(size=(4, 3)), rng.normal(size=(4, 3))) >= 0


def test_cluster_loss_guards():
    with pytest.raises(ConfigError):
        loss_cluster_regularized(np.ones((1, 2)), np.ones((1, 2)))
    with pytest.raises(ZeroNormError):
        loss_cluster_regularized(np.array([[0.0, 0.0], [1.0, 0.0]]), np.ones((2, 2)))


def test_plain_cluster_loss():
    p = np.eye(2)
    assert loss_cluster_plain(p, p) == pytest.approx(0.3133, abs=1e-4)
    assert loss_cluster_plain(np.full((5, 2), 0.5)) == pytest.approx(math.log(2), abs=1e-12)
    assert loss_cluster_plain(_random_p(make_rng(7, 'test', 'plain'), 6, 3)) >= 0


def test_total_loss():
    assert total_loss(1.0, 2.0, 3.0, 1.0, 0.1) == pytest.approx(3.3)
    assert total_loss(1.5, 2.0, 3.0, 0.0, 0.0) == 1.5
    assert total_loss(1.0, 2.0, 3.0, 2.0, 0.1) - total_loss(1.0, 2.0, 3.0, 1.0, 0.1) == pytest.approx(2.0)


def test_scores():
    rng = make_rng(8, 'test', 'scores')
    z, p = rng.normal(size=(5, 3)), _random_p(rng, 5, 2)
    c, c0 = community_reps(p, z), rng.normal(size=3)
    _, glo = loss_global(z, c0, range(5))
    np.testing.assert_allclose(anomaly_scores(z, c0, c, p, 0.0), glo)
    want = [np.sum((z[i] - c0) ** 2) + 0.5 * np.sum((z[i] - c[np.argmax(p[i])]) ** 2) for i in range(5)]
    np.testing.assert_allclose(anomaly_scores(z, c0, c, p, 0.5), want)
    # shifting embeddings and every center together leaves the ranking alone
    u = np.array([4.0, -1.0, 2.5])
    shifted = anomaly_scores(z + u, c0 + u, c + u, p, 0.5)
    assert np.argsort(shifted).tolist() == np.argsort(want).tolist()


def test_score_zero_at_centers():
    c = np.array([[1.0, 2.0]])
    assert anomaly_scores(c, c[0], c, np.ones((1, 1)), 1.0).tolist() == [0.0]


def test_derive_center():
    z = np.tile([[2.0, -1.0]], (4, 1))
    center = derive_center('init', z)
    assert center.c0.tolist() == [[2.0, -1.0]]
    u = np.array([[1.0, 1.0]])
    assert derive_center('update', z + u).c0.tolist() == (center.c0 + u).tolist()
    with pytest.raises(ConfigError):
        derive_center('median', z)
    with pytest.raises(ConfigError):
        GlobalCenter(np.zeros(2), 'median')


# ---full objective on a 6-node toy---

@pytest.fixture(scope='module')
def toy_topology():
    edges = [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (3, 5)]
    graph = make_graph(6, edges, d=4, seed=3, labels=np.array([0, 1, 0, 0, 1, 0]))
    return graph, build_topology(graph)


def _objective(toy_topology, **overrides):
    graph, topology = toy_topology
    config = TrainConfig(hidden_dim=4, num_clusters=2, **overrides)
    params = init_parameters(config, graph.num_features, make_rng(config.seed, 'init'))
    center = GlobalCenter(make_rng(1, 'test', 'center').normal(size=(1, 4)), config.center_mode)
    return make_objective(graph, topology, np.array([0, 2, 3, 5]), config, params, center)


@pytest.mark.parametrize('overrides', [
    {}, {'variant': 'loc_only'}, {'variant': 'glo_only'}, {'variant': 'no_reg'}, {'variant': 'pur_only'},
    {'variant': 'aug_only'}, {'variant': 'neg_weights'}, {'center_mode': 'train'},
], ids=lambda o: '-'.join(map(str, o.values())) or 'full')
def test_full_loss_gradients(toy_topology, overrides):
    objective = _objective(toy_topology, **overrides)
    report = finite_difference_check(objective.graph, 'total', tolerance=1e-4)
    assert report.passed, report
    assert ('center' in report.params) == (overrides.get('center_mode') == 'train')


def test_trained_center_gradient(toy_topology):
    objective = _objective(toy_topology, center_mode='train')
    report = finite_difference_check(objective.graph, 'glo', wrt=['center'], tolerance=1e-6)
    assert report.passed, report
    values = objective.evaluate(('z', 'glo'))
    z = values['z'][[0, 2, 3, 5]]
    analytic = objective.graph.gradients('glo', wrt=['center'])['center']
    np.testing.assert_allclose(analytic, (-2 * (z - objective.center())).mean(axis=0, keepdims=True))


def test_variant_weights_shape_the_score(toy_topology):
    full = _objective(toy_topology).evaluate()
    loc_only = _objective(toy_topology, variant='loc_only').evaluate()
    glo_only = _objective(toy_topology, variant='glo_only').evaluate()
    np.testing.assert_allclose(loc_only['score'], loc_only['per_node_loc'])
    np.testing.assert_allclose(glo_only['score'], glo_only['per_node_glo'])
    np.testing.assert_allclose(full['total'], full['glo'] + full['loc'] + full['clu'])


def test_objective_parameters_round_trip(toy_topology):
    objective = _objective(toy_topology)
    before = objective.scores()
    params = objective.parameters()
    objective.load({k: 0.5 * v for k, v in params.items()})
    assert not np.allclose(objective.scores(), before)
    objective.load(params)
    np.testing.assert_array_equal(objective.scores(), before)
    assert 'center' not in objective.trainable
