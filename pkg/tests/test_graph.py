import numpy as np
import pytest

from graph import (AttributedGraph, heterophily_by_class, heterophily_ratio, load_graph, load_splits,
                   save_graph, save_splits, split_nodes)
from utill.errors import ConfigError, GraphFormatError, MissingArtifactError
from conftest import make_graph, random_graph


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_load_graph_symmetrizes_and_dedupes(tmp_path):
    attrs = write(tmp_path, 'a.txt', '1,0\n0,1\n1,1\n')
    edges = write(tmp_path, 'e.txt', '# comment\n0 1\n1 0\n1 1\n\n1 2\n')
    g = load_graph(edges, attrs)
    assert g.num_nodes == 3
    assert g.num_edges == 2
    assert g.neighbors(1).tolist() == [0, 2]
    assert not g.has_edge(1, 1)


def test_load_graph_reports_line_numbers(tmp_path):
    attrs = write(tmp_path, 'a.txt', '1,0\n0,1\n')
    edges = write(tmp_path, 'e.txt', '0 1\n0 5\n')
    with pytest.raises(GraphFormatError) as err:
        load_graph(edges, attrs)
    assert err.value.line == 2
    assert err.value.exit_code != 0


@pytest.mark.parametrize('text', ['0 1 2\n', 'a b\n', '-1 0\n'])
def test_bad_edge_lines(tmp_path, text):
    attrs = write(tmp_path, 'a.txt', '1\n2\n')
    with pytest.raises(GraphFormatError):
        load_graph(write(tmp_path, 'e.txt', text), attrs)


def test_ragged_attributes(tmp_path):
    attrs = write(tmp_path, 'a.txt', '1,2\n3\n')
    with pytest.raises(GraphFormatError) as err:
        load_graph(write(tmp_path, 'e.txt', ''), attrs)
    assert err.value.line == 2


def test_missing_file_is_a_format_error(tmp_path):
    with pytest.raises(GraphFormatError):
        load_graph(str(tmp_path / 'nope.txt'), str(tmp_path / 'nope2.txt'))


def test_save_load_fixed_point(tmp_path, toy6):
    paths = [str(tmp_path / n) for n in ('e', 'a', 'l')]
    save_graph(toy6, *paths)
    again = load_graph(*paths)
    assert again.same_as(toy6)


def test_graph_is_immutable(triangle):
    with pytest.raises(ValueError):
        triangle.attributes[0, 0] = 5.0


def test_split_sizes_and_determinism():
    g = make_graph(10, [(0, 1)])
    s = split_nodes(g, [6, 1, 3], seed=7)
    assert (len(s.train_ids), len(s.val_ids), len(s.test_ids)) == (6, 1, 3)
    assert sorted(np.concatenate([s.train_ids, s.val_ids, s.test_ids]).tolist()) == list(range(10))
    again = split_nodes(g, [0.6, 0.1, 0.3], seed=7)
    assert again.train_ids.tolist() == s.train_ids.tolist()


def test_split_rejects_bad_ratios():
    with pytest.raises(ConfigError):
        split_nodes(make_graph(4, []), [1, -1, 1], seed=0)


def test_splits_round_trip(tmp_path):
    s = split_nodes(make_graph(12, []), [6, 1, 3], seed=1)
    save_splits(s, tmp_path / 's.json')
    back = load_splits(tmp_path / 's.json')
    assert back.part('test').tolist() == s.test_ids.tolist()
    with pytest.raises(MissingArtifactError):
        load_splits(tmp_path / 'missing.json')


def test_heterophily_examples(path3, triangle):
    # b differs from both ends, each end differs from its only neighbor
    assert heterophily_ratio(path3, [0, 1, 0]) == pytest.approx(1.0)
    assert heterophily_ratio(triangle, [0, 0, 0]) == 0.0
    # 0: 1/2, 1: 2/2, 2: 1/2
    assert heterophily_ratio(triangle, [0, 1, 0]) == pytest.approx(2 / 3)


def test_heterophily_star_and_path():
    star = make_graph(4, [(0, 1), (0, 2), (0, 3)])
    assert heterophily_ratio(star, [0, 1, 1, 1]) == pytest.approx(1.0)
    # 0: 0/1, 1: 1/2, 2: 1/1
    path = make_graph(3, [(0, 1), (1, 2)])
    assert heterophily_ratio(path, [0, 0, 1]) == pytest.approx(0.5)


@pytest.mark.parametrize('seed', range(4))
def test_heterophily_ignores_label_names(seed):
    rng = np.random.default_rng(seed)
    g = random_graph(12, 0.3, rng)
    labels = rng.integers(0, 2, size=12)
    renamed = np.where(labels == 0, 7, 3)
    assert heterophily_ratio(g, renamed) == heterophily_ratio(g, labels)


@pytest.mark.parametrize('n,seed', [(1, 0), (2, 5), (3, 1), (7, 2), (10, 3), (33, 4), (101, 9), (250, 11)])
def test_split_is_a_partition(n, seed):
    ratios = np.random.default_rng(seed).uniform(0.1, 1.0, size=3)
    s = split_nodes(make_graph(n, []), ratios, seed=seed)
    parts = np.concatenate([s.train_ids, s.val_ids, s.test_ids])
    assert sorted(parts.tolist()) == list(range(n))


def test_split_all_train():
    s = split_nodes(make_graph(9, []), [1, 0, 0], seed=3)
    assert s.train_ids.tolist() == list(range(9))
    assert len(s.val_ids) == len(s.test_ids) == 0


def test_stratified_split_keeps_class_shares():
    labels = np.array([1] * 10 + [0] * 40)
    g = make_graph(50, [], labels=labels)
    s = split_nodes(g, [6, 2, 2], seed=4, stratify=True)
    assert [int(labels[p].sum()) for p in (s.train_ids, s.val_ids, s.test_ids)] == [6, 2, 2]
    assert (len(s.train_ids), len(s.val_ids), len(s.test_ids)) == (30, 10, 10)
    parts = np.concatenate([s.train_ids, s.val_ids, s.test_ids])
    assert sorted(parts.tolist()) == list(range(50))
    again = split_nodes(g, [6, 2, 2], seed=4, stratify=True)
    assert again.val_ids.tolist() == s.val_ids.tolist()


def test_stratified_split_needs_labels():
    with pytest.raises(ConfigError):
        split_nodes(make_graph(6, []), [6, 2, 2], seed=0, stratify=True)


def test_heterophily_skips_isolated_nodes():
    g = make_graph(4, [(0, 1)])
    assert heterophily_ratio(g, [0, 1, 1, 1]) == pytest.approx(1.0)


def test_heterophily_by_class(toy6):
    stats = heterophily_by_class(toy6, toy6.labels)
    # anomalies 1 and 4 sit in triangles of normal nodes
    assert stats['anomalous'] == pytest.approx(1.0)
    assert stats['anomalous'] > stats['normal']
    assert stats['isolated'] == 0


def test_from_edges_drops_self_loops_and_duplicates():
    g = AttributedGraph.from_edges(3, [(0, 0), (0, 1), (1, 0), (2, 1)], np.zeros((3, 1)))
    assert g.edge_array().tolist() == [[0, 1], [1, 2]]
    assert g.degrees.tolist() == [1, 2, 1]
