import json
import logging
import os

import numpy as np

from utill.errors import GraphFormatError, MissingArtifactError
from .graphModels import AttributedGraph, NodeSplits

logger = logging.getLogger(__name__)


def _lines(path):
    if not os.path.exists(path):
        raise GraphFormatError(path, None, 'file not found')
    with open(path, 'r', encoding='utf8') as f:
        for no, raw in enumerate(f, start=1):
            line = raw.strip()
            if line == '' or line.startswith('#'):
                continue
            yield no, line


def read_attributes(path) -> np.ndarray:
    rows = []
    width = None
    for no, line in _lines(path):
        cells = [c.strip() for c in line.split(',')]
        try:
            row = [float(c) for c in cells]
        except ValueError:
            raise GraphFormatError(path, no, f'non-numeric attribute value in {line!r}')
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise GraphFormatError(path, no, f'expected {width} columns, got {len(row)}')
        rows.append(row)
    if not rows:
        raise GraphFormatError(path, None, 'no attribute rows')
    return np.asarray(rows, dtype=np.float64)


def read_edges(path, num_nodes: int) -> np.ndarray:
    edges = []
    for no, line in _lines(path):
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(path, no, f'expected two node ids, got {line!r}')
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(path, no, f'node ids must be integers, got {line!r}')
        if i < 0 or j < 0:
            raise GraphFormatError(path, no, f'negative node id in {line!r}')
        if i >= num_nodes or j >= num_nodes:
            raise GraphFormatError(path, no, f'node id {max(i, j)} >= N={num_nodes} (attribute rows)')
        edges.append((i, j))
    return np.asarray(edges, dtype=np.int64).reshape(-1, 2)


def read_labels(path, num_nodes: int | None = None) -> np.ndarray:
    labels = []
    for no, line in _lines(path):
        if line not in ('0', '1'):
            raise GraphFormatError(path, no, f'label must be 0 or 1, got {line!r}')
        labels.append(int(line))
    if num_nodes is not None and len(labels) != num_nodes:
        raise GraphFormatError(path, None, f'{len(labels)} labels for {num_nodes} nodes')
    return np.asarray(labels, dtype=np.int64)


def load_graph(edge_path, attr_path, label_path=None) -> AttributedGraph:
    attributes = read_attributes(attr_path)
    n = attributes.shape[0]
    edges = read_edges(edge_path, n)
    labels = read_labels(label_path, n) if label_path else None
    graph = AttributedGraph.from_edges(n, edges, attributes, labels)
    dropped = len(edges) - graph.num_edges
    logger.info('loaded %r from %s (%d edge lines, %d duplicate/self-loop lines dropped)',
                graph, edge_path, len(edges), dropped)
    return graph


def save_graph(graph: AttributedGraph, edge_path, attr_path, label_path=None):
    with open(edge_path, 'w', encoding='utf8') as f:
        for i, j in graph.edge_array():
            f.write(f'{i} {j}\n')
    with open(attr_path, 'w', encoding='utf8') as f:
        for row in graph.attributes:
            f.write(','.join('%.17g' % v for v in row) + '\n')
    if label_path is not None:
        if graph.labels is None:
            raise ValueError('graph has no labels to write')
        with open(label_path, 'w', encoding='utf8') as f:
            for v in graph.labels:
                f.write(f'{int(v)}\n')


def save_splits(splits: NodeSplits, path):
    with open(path, 'w', encoding='utf8') as f:
        json.dump(splits.to_dict(), f)


def load_splits(path) -> NodeSplits:
    if not os.path.exists(path):
        raise MissingArtifactError(path, 'train')
    with open(path, 'r', encoding='utf8') as f:
        return NodeSplits.from_dict(json.load(f))
