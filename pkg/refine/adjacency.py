from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp


@dataclass(frozen=True, eq=False)
class WeightedAdjacency:
    """
    Row-compressed weighted adjacency with an explicit sparsity pattern.

    Unlike a scipy matrix, entries with weight 0 are kept: the pattern is the
    neighbor set (it decides degrees and attention neighborhoods), the weights
    are only values on it.
    """
    num_nodes: int
    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray

    @classmethod
    def from_triplets(cls, num_nodes: int, src, dst, weight) -> 'WeightedAdjacency':
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        weight = np.asarray(weight, dtype=np.float64)
        order = np.lexsort((dst, src))
        src, dst, weight = src[order], dst[order], weight[order]
        indptr = np.concatenate([[0], np.cumsum(np.bincount(src, minlength=num_nodes))]).astype(np.int64)
        return cls(num_nodes, indptr, dst, weight)

    @property
    def nnz(self) -> int:
        return len(self.indices)

    def row(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        s, e = self.indptr[i], self.indptr[i + 1]
        return self.indices[s:e], self.weights[s:e]

    def rows(self) -> np.ndarray:
        """source node of every stored entry"""
        return np.repeat(np.arange(self.num_nodes), np.diff(self.indptr))

    def row_sums(self) -> np.ndarray:
        return np.bincount(self.rows(), weights=self.weights, minlength=self.num_nodes)

    def set_sizes(self) -> np.ndarray:
        return np.diff(self.indptr)

    def contains_self(self) -> np.ndarray:
        hit = np.zeros(self.num_nodes, dtype=bool)
        rows = self.rows()
        hit[rows[rows == self.indices]] = True
        return hit

    def to_csr(self) -> sp.csr_matrix:
        return sp.csr_matrix((self.weights, self.indices, self.indptr),
                             shape=(self.num_nodes, self.num_nodes))

    def triplets(self):
        return self.rows(), self.indices, self.weights

    def permuted(self, perm: np.ndarray) -> 'WeightedAdjacency':
        """relabel node old -> perm[old]"""
        src, dst, w = self.triplets()
        return WeightedAdjacency.from_triplets(self.num_nodes, perm[src], perm[dst], w)
