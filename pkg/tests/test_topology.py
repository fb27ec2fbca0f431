import json
import logging

import numpy as np
import pytest

from metric import inject_structural, synth_graph
from refine import (build_topology, check_params, gdv_similarity_distribution, kappa_distribution,
                    load_topology, pair_tag, save_topology)
from refine.distributions import _unrank_pairs, summarize
from utill.errors import MissingArtifactError


@pytest.fixture
def topology(toy6):
    return build_topology(toy6, tau=0.5, max_graphlet_size=4, delta=1.0)


def test_build_topology_contracts(toy6, topology):
    assert topology.num_nodes == 6
    assert len(topology.raw_curvatures) == toy6.num_edges
    np.testing.assert_array_equal(topology.edges, toy6.edge_array())
    for adj in (topology.a_pur, topology.a_aug):
        np.testing.assert_allclose(adj.row_sums(), 1.0, atol=1e-9)
    assert (topology.a_pur.weights > 0).all()
    # pattern shared between the normalized and raw purified weights
    np.testing.assert_array_equal(topology.a_pur.indices, topology.a_pur_raw.indices)
    assert topology.curvature_of(3, 2) == topology.curvature_of(2, 3)
    with pytest.raises(KeyError):
        topology.curvature_of(0, 5)


def test_save_load_round_trip(tmp_path, topology):
    paths = save_topology(topology, tmp_path / 'topology')
    assert all(p.endswith(('.csv', '.json')) for p in paths)
    back = load_topology(tmp_path / 'topology')
    for name in ('a_pur', 'a_aug', 'a_pur_raw'):
        a, b = getattr(topology, name), getattr(back, name)
        np.testing.assert_array_equal(a.indptr, b.indptr)
        np.testing.assert_array_equal(a.indices, b.indices)
        np.testing.assert_array_equal(a.weights, b.weights)
    np.testing.assert_array_equal(back.raw_curvatures, topology.raw_curvatures)
    np.testing.assert_array_equal(back.gdv.counts, topology.gdv.counts)
    assert back.params['tau'] == 0.5


def test_load_missing_names_preprocess(tmp_path):
    with pytest.raises(MissingArtifactError) as err:
        load_topology(tmp_path / 'nowhere')
    assert err.value.stage == 'preprocess'
    assert err.value.exit_code == 3


def test_rerun_writes_identical_files(tmp_path, toy6):
    for name in ('a', 'b'):
        save_topology(build_topology(toy6), tmp_path / name)
    for f in ('a_pur.csv', 'a_aug.csv', 'curvature.csv', 'gdv.csv'):
        assert (tmp_path / 'a' / f).read_bytes() == (tmp_path / 'b' / f).read_bytes()


def test_check_params_warns(caplog, topology):
    with caplog.at_level(logging.WARNING):
        check_params(topology, 0.3, 4, 1.0)
    assert 'tau' in caplog.text


def test_permuted_topology_relabels(topology):
    perm = np.array([5, 3, 1, 0, 2, 4])
    moved = topology.permuted(perm)
    assert moved.curvature_of(perm[2], perm[3]) == topology.curvature_of(2, 3)
    np.testing.assert_array_equal(moved.gdv.counts[perm], topology.gdv.counts)
    idx, w = topology.a_pur.row(0)
    idx2, w2 = moved.a_pur.row(perm[0])
    assert dict(zip(perm[idx].tolist(), w.tolist())) == dict(zip(idx2.tolist(), w2.tolist()))


def test_pair_tags():
    labels = [1, 0, 1]
    assert pair_tag(labels, 0, 2) == 'aa'
    assert pair_tag(labels, 0, 1) == 'an'
    assert pair_tag(labels, 1, 1) == 'nn'


def test_kappa_distribution(toy6, topology):
    df = kappa_distribution(topology.edges, topology.raw_curvatures, toy6.labels)
    assert list(df.columns) == ['src', 'dst', 'kappa', 'tag']
    assert len(df) == toy6.num_edges
    # anomalies 1 and 4 are never adjacent
    assert set(df['tag']) == {'an', 'nn'}
    assert 'tag' not in kappa_distribution(topology.edges, topology.raw_curvatures)


def test_gdv_similarity_pair_counts(topology):
    labels = np.array([1, 1, 0, 0, 0, 0])
    df = gdv_similarity_distribution(topology.gdv, labels)
    counts = df['tag'].value_counts().to_dict()
    assert counts == {'aa': 1, 'an': 8, 'nn': 6}
    assert (df['u'] < df['v']).all()
    assert df['sim'].between(0, 1).all()


def test_gdv_similarity_subsamples_normal_pairs(topology):
    labels = np.array([1, 0, 0, 0, 0, 0])
    df = gdv_similarity_distribution(topology.gdv, labels, max_nn_pairs=4, seed=2)
    nn = df[df['tag'] == 'nn']
    assert len(nn) == 4
    assert len(set(zip(nn['u'], nn['v']))) == 4
    assert (labels[nn['u']] == 0).all() and (labels[nn['v']] == 0).all()
    assert (nn['u'] < nn['v']).all()


def test_unrank_pairs_inverts_row_major_order():
    n = 9
    a, b = _unrank_pairs(np.arange(n * (n - 1) // 2), n)
    iu, ju = np.triu_indices(n, k=1)
    np.testing.assert_array_equal(a, iu)
    np.testing.assert_array_equal(b, ju)


def test_summarize(toy6, topology):
    summary = summarize(kappa_distribution(topology.edges, topology.raw_curvatures, toy6.labels), 'kappa')
    assert summary['an']['count'] == 4
    assert json.dumps(summary)


@pytest.mark.slow
def test_refinement_separates_clique_anomalies():
    kappa_gaps, sim_gaps = [], []
    for seed in range(5):
        base = synth_graph([150, 150], 0.05, 0.005, seed=seed)
        # at most 5% of the nodes in cliques of 10
        count = round(0.05 * base.num_nodes) // 10
        graph, labels = inject_structural(base, m=10, count=count, seed=seed)
        topo = build_topology(graph, tau=0.5, max_graphlet_size=4, delta=1.0)
        kappa = summarize(kappa_distribution(topo.edges, topo.raw_curvatures, labels), 'kappa')
        sims = summarize(gdv_similarity_distribution(topo.gdv, labels, max_nn_pairs=1000, seed=seed), 'sim')
        kappa_gaps.append(kappa['aa']['mean'] - kappa['an']['mean'])
        sim_gaps.append(sims['aa']['mean'] - sims['an']['mean'])
    assert np.median(kappa_gaps) > 0
    assert np.median(sim_gaps) > 0
