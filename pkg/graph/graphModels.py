from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator

import networkx as nx
import numpy as np


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class AttributedGraph:
    """
    Undirected attributed graph with dense node ids 0..N-1.

    Adjacency is kept in CSR form (`indptr`, `indices`): the neighbors of node i
    are `indices[indptr[i]:indptr[i+1]]`, sorted, deduplicated, never i itself.
    All arrays are read-only; "modifying" a graph returns a new one.
    """
    num_nodes: int
    indptr: np.ndarray
    indices: np.ndarray
    attributes: np.ndarray
    labels: np.ndarray | None = None
    _edge_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        n = self.num_nodes
        if self.indptr.shape != (n + 1,):
            raise ValueError(f'indptr must have {n + 1} entries, got {self.indptr.shape}')
        if self.attributes.ndim != 2 or self.attributes.shape[0] != n:
            raise ValueError(f'attributes must be {n} x d_in, got {self.attributes.shape}')
        if self.labels is not None and self.labels.shape != (n,):
            raise ValueError(f'labels must have length {n}, got {self.labels.shape}')
        for a in (self.indptr, self.indices, self.attributes, self.labels):
            if a is not None:
                _frozen(a)

    @classmethod
    def from_edges(cls, num_nodes: int, edges: Iterable[tuple[int, int]] | np.ndarray,
                   attributes: np.ndarray, labels: np.ndarray | None = None) -> 'AttributedGraph':
        """canonicalize: undirected, no self-loops, no duplicates"""
        e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        e = e.reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= num_nodes):
            raise ValueError(f'edge endpoint outside 0..{num_nodes - 1}')
        e = e[e[:, 0] != e[:, 1]]
        both = np.concatenate([e, e[:, ::-1]]) if e.size else e
        if both.size:
            both = np.unique(both, axis=0)  # sorted by (src, dst)
        src = both[:, 0] if both.size else np.zeros(0, dtype=np.int64)
        dst = both[:, 1] if both.size else np.zeros(0, dtype=np.int64)
        indptr = np.zeros(num_nodes + 1, dtype=np.int64)
        np.add.at(indptr, src + 1, 1)
        indptr = np.cumsum(indptr)
        attrs = np.array(attributes, dtype=np.float64, copy=True)
        if attrs.ndim == 1:
            attrs = attrs.reshape(num_nodes, -1)
        lab = None if labels is None else np.array(labels, dtype=np.int64, copy=True)
        return cls(num_nodes, indptr, dst.astype(np.int64), attrs, lab)

    @property
    def num_features(self) -> int:
        return self.attributes.shape[1]

    @property
    def num_edges(self) -> int:
        return len(self.indices) // 2

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def degree(self, i: int) -> int:
        return int(self.indptr[i + 1] - self.indptr[i])

    @cached_property
    def degrees(self) -> np.ndarray:
        return _frozen(np.diff(self.indptr))

    def has_edge(self, i: int, j: int) -> bool:
        nb = self.neighbors(i)
        pos = np.searchsorted(nb, j)
        return bool(pos < len(nb) and nb[pos] == j)

    def edges(self) -> Iterator[tuple[int, int]]:
        """each undirected edge once, as (i, j) with i < j, in sorted order"""
        for i in range(self.num_nodes):
            for j in self.neighbors(i):
                if j > i:
                    yield i, int(j)

    def edge_array(self) -> np.ndarray:
        if 'edges' not in self._edge_cache:
            src = np.repeat(np.arange(self.num_nodes), self.degrees)
            mask = self.indices > src
            self._edge_cache['edges'] = _frozen(np.stack([src[mask], self.indices[mask]], axis=1))
        return self._edge_cache['edges']

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.num_nodes))
        g.add_edges_from(self.edge_array().tolist())
        return g

    def with_edges(self, extra: np.ndarray) -> 'AttributedGraph':
        edges = np.concatenate([self.edge_array(), np.asarray(extra, dtype=np.int64).reshape(-1, 2)])
        return AttributedGraph.from_edges(self.num_nodes, edges, self.attributes, self.labels)

    def with_attributes(self, attributes: np.ndarray) -> 'AttributedGraph':
        return AttributedGraph(self.num_nodes, self.indptr, self.indices,
                               np.array(attributes, dtype=np.float64, copy=True), self.labels)

    def with_labels(self, labels: np.ndarray | None) -> 'AttributedGraph':
        lab = None if labels is None else np.array(labels, dtype=np.int64, copy=True)
        return AttributedGraph(self.num_nodes, self.indptr, self.indices, self.attributes, lab)

    def same_as(self, other: 'AttributedGraph') -> bool:
        if self.num_nodes != other.num_nodes:
            return False
        if (self.labels is None) != (other.labels is None):
            return False
        return (np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices)
                and np.array_equal(self.attributes, other.attributes)
                and (self.labels is None or np.array_equal(self.labels, other.labels)))

    def __repr__(self):
        return f'<AttributedGraph> N={self.num_nodes},|E|={self.num_edges},d_in={self.num_features}'


@dataclass(frozen=True)
class NodeSplits:
    train_ids: np.ndarray
    val_ids: np.ndarray
    test_ids: np.ndarray

    def to_dict(self):
        return {
            'train': self.train_ids.tolist(),
            'val': self.val_ids.tolist(),
            'test': self.test_ids.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> 'NodeSplits':
        return cls(*(np.asarray(d[k], dtype=np.int64) for k in ('train', 'val', 'test')))

    def part(self, name: str) -> np.ndarray:
        return {'train': self.train_ids, 'val': self.val_ids, 'test': self.test_ids}[name]
