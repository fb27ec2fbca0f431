"""
A small define-by-run reverse-mode engine.

Every value is a 2-D float64 array (scalars are 1x1, per-node vectors Nx1).
Building an expression evaluates it immediately and records it on the tape of
an `ExpressionGraph`; `evaluate` replays the tape with new leaf values and
`gradients` walks it backwards. There is no broadcasting: each primitive
checks its shapes and raises ShapeError naming itself.
"""
from typing import Iterable

import numpy as np
import scipy.sparse as sp

from utill.errors import ShapeError, ZeroNormError


def as_tensor(value) -> np.ndarray:
    a = np.array(value, dtype=np.float64)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    elif a.ndim == 1:
        a = a.reshape(-1, 1)
    elif a.ndim != 2:
        raise ShapeError('tensor', a.shape)
    return a


class Op:
    name = 'op'
    # kinked ops can be pinned to the branch taken at the current point
    pinned = None

    def forward(self, *xs: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def backward(self, grad: np.ndarray, out: np.ndarray, *xs: np.ndarray) -> tuple:
        raise NotImplementedError

    def check(self, ok: bool, *xs):
        if not ok:
            raise ShapeError(self.name, *(getattr(x, 'shape', x) for x in xs))


class Node:
    __slots__ = ('graph', 'id', 'op', 'parents', 'value', 'name', 'kind', 'requires_grad')

    def __init__(self, graph, id, op, parents, value, name, kind, requires_grad):
        self.graph = graph
        self.id = id
        self.op = op
        self.parents = parents
        self.value = value
        self.name = name
        self.kind = kind
        self.requires_grad = requires_grad

    @property
    def shape(self) -> tuple:
        return self.value.shape

    def __repr__(self):
        what = self.op.name if self.op else self.kind
        return f'<Node {self.id} {what} {self.shape}>'

    def __add__(self, other): return add(self, other)
    def __sub__(self, other): return sub(self, other)
    def __mul__(self, other): return mul(self, other)
    def __truediv__(self, other): return div(self, other)
    def __matmul__(self, other): return matmul(self, other)
    def __neg__(self): return scale(self, -1.0)

    @property
    def T(self): return transpose(self)


class ExpressionGraph:
    def __init__(self):
        self.nodes: list[Node] = []
        self.leaves: dict[str, Node] = {}
        self.outputs: dict[str, Node] = {}

    def __repr__(self):
        return f'<ExpressionGraph> {len(self.nodes)} nodes, {len(self.leaves)} leaves'

    def _leaf(self, name, value, kind, requires_grad) -> Node:
        if name is not None and name in self.leaves:
            raise ValueError(f'leaf {name!r} already defined')
        node = Node(self, len(self.nodes), None, (), as_tensor(value), name, kind, requires_grad)
        self.nodes.append(node)
        if name is not None:
            self.leaves[name] = node
        return node

    def param(self, name: str, value) -> Node:
        return self._leaf(name, value, 'param', True)

    def input(self, name: str, value) -> Node:
        return self._leaf(name, value, 'input', False)

    def const(self, value) -> Node:
        return self._leaf(None, value, 'const', False)

    def apply(self, op: Op, *parents: Node) -> Node:
        for p in parents:
            if p.graph is not self:
                raise ValueError(f'{op.name}: operand belongs to another graph')
        value = op.forward(*(p.value for p in parents))
        node = Node(self, len(self.nodes), op, parents, value, None, 'op',
                    any(p.requires_grad for p in parents))
        self.nodes.append(node)
        return node

    def output(self, name: str, node: Node) -> Node:
        self.outputs[name] = node
        return node

    @property
    def params(self) -> dict[str, Node]:
        return {k: v for k, v in self.leaves.items() if v.kind == 'param'}

    def bind(self, inputs: dict | None):
        for name, value in (inputs or {}).items():
            leaf = self.leaves.get(name)
            if leaf is None:
                raise KeyError(f'no leaf named {name!r}')
            value = as_tensor(value)
            if value.shape != leaf.value.shape:
                raise ShapeError(f'bind {name}', leaf.value.shape, value.shape)
            leaf.value = value

    def _resolve(self, which) -> Node:
        return self.outputs[which] if isinstance(which, str) else which

    def evaluate(self, inputs: dict | None = None, outputs: Iterable | None = None) -> dict:
        """rebind leaves, replay the tape (up to the last requested output), return named values"""
        self.bind(inputs)
        names = list(self.outputs) if outputs is None else list(outputs)
        targets = [self._resolve(n) for n in names]
        last = max((t.id for t in targets), default=len(self.nodes) - 1)
        for node in self.nodes[:last + 1]:
            if node.op is not None:
                node.value = node.op.forward(*(p.value for p in node.parents))
        return {(n if isinstance(n, str) else t.id): t.value for n, t in zip(names, targets)}

    def gradients(self, output, inputs: dict | None = None, wrt: Iterable[str] | None = None) -> dict:
        """reverse-mode gradient of a 1x1 output with respect to named param leaves"""
        if inputs:
            self.evaluate(inputs)
        out = self._resolve(output)
        if out.shape != (1, 1):
            raise ShapeError('gradients (output must be 1x1)', out.shape)
        grads: dict[int, np.ndarray] = {out.id: np.ones((1, 1))}
        for node in reversed(self.nodes[:out.id + 1]):
            g = grads.get(node.id)
            if g is None or node.op is None:
                continue
            parts = node.op.backward(g, node.value, *(p.value for p in node.parents))
            for p, gp in zip(node.parents, parts):
                if gp is None or not p.requires_grad:
                    continue
                grads[p.id] = gp if p.id not in grads else grads[p.id] + gp
        names = list(self.params) if wrt is None else list(wrt)
        return {n: grads.get(self.leaves[n].id, np.zeros_like(self.leaves[n].value)) for n in names}

    def kinked(self) -> list[Node]:
        return [n for n in self.nodes if n.op is not None and hasattr(n.op, 'pin')]


# ---primitives---

class MatMul(Op):
    name = 'matmul'

    def forward(self, a, b):
        self.check(a.shape[1] == b.shape[0], a, b)
        return a @ b

    def backward(self, g, out, a, b):
        return g @ b.T, a.T @ g


class SpMM(Op):
    """constant sparse matrix times a dense node"""
    name = 'spmm'

    def __init__(self, matrix: sp.spmatrix):
        self.matrix = sp.csr_matrix(matrix)

    def forward(self, x):
        self.check(self.matrix.shape[1] == x.shape[0], self.matrix.shape, x)
        return np.asarray(self.matrix @ x)

    def backward(self, g, out, x):
        return (np.asarray(self.matrix.T @ g),)


class EdgeAggregate(Op):
    """
    out[i] = sum over stored entries e of row i of w[e] * x[col[e]], with the
    sparsity pattern fixed (indptr, indices) and the weights a node (E x 1).
    """
    name = 'edge_aggregate'

    def __init__(self, indptr: np.ndarray, indices: np.ndarray, num_cols: int):
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        self.rows = np.repeat(np.arange(len(self.indptr) - 1), np.diff(self.indptr))
        self.num_cols = num_cols

    def _matrix(self, w):
        return sp.csr_matrix((w[:, 0], self.indices, self.indptr),
                             shape=(len(self.indptr) - 1, self.num_cols))

    def forward(self, w, x):
        self.check(w.shape == (len(self.indices), 1) and x.shape[0] == self.num_cols, w, x)
        return np.asarray(self._matrix(w) @ x)

    def backward(self, g, out, w, x):
        gw = np.einsum('ij,ij->i', g[self.rows], x[self.indices]).reshape(-1, 1)
        return gw, np.asarray(self._matrix(w).T @ g)


class GatherRows(Op):
    name = 'gather'

    def __init__(self, index: np.ndarray):
        self.index = np.asarray(index, dtype=np.int64)

    def forward(self, x):
        self.check(len(self.index) == 0 or self.index.max() < x.shape[0], x)
        return x[self.index]

    def backward(self, g, out, x):
        gx = np.zeros_like(x)
        np.add.at(gx, self.index, g)
        return (gx,)


class SelectRows(Op):
    """row argmax(selector[i]) of x for every i; ties go to the lowest index"""
    name = 'select_rows'

    def forward(self, x, selector):
        self.check(selector.shape[1] == x.shape[0], x, selector)
        idx = self.pinned if self.pinned is not None else np.argmax(selector, axis=1)
        return x[idx]

    def pin(self, x, selector):
        self.pinned = np.argmax(selector, axis=1)

    def margin(self, x, selector) -> float:
        if selector.shape[1] < 2:
            return np.inf
        top = np.sort(selector, axis=1)
        return float((top[:, -1] - top[:, -2]).min())

    def backward(self, g, out, x, selector):
        idx = self.pinned if self.pinned is not None else np.argmax(selector, axis=1)
        gx = np.zeros_like(x)
        np.add.at(gx, idx, g)
        return gx, None


class RowSoftmax(Op):
    name = 'row_softmax'

    def forward(self, x):
        e = np.exp(x - x.max(axis=1, keepdims=True))
        return e / e.sum(axis=1, keepdims=True)

    def backward(self, g, out, x):
        return (out * (g - (g * out).sum(axis=1, keepdims=True)),)


class SegmentSoftmax(Op):
    """softmax of an E x 1 column within each nonempty segment indptr[k]:indptr[k+1]"""
    name = 'segment_softmax'

    def __init__(self, indptr: np.ndarray):
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.starts = self.indptr[:-1]
        self.sizes = np.diff(self.indptr)

    def _segsum(self, v):
        return np.repeat(np.add.reduceat(v, self.starts), self.sizes)

    def forward(self, x):
        self.check(x.shape == (self.indptr[-1], 1) and self.sizes.min(initial=1) > 0, x)
        v = x[:, 0]
        e = np.exp(v - np.repeat(np.maximum.reduceat(v, self.starts), self.sizes))
        return (e / self._segsum(e)).reshape(-1, 1)

    def backward(self, g, out, x):
        y, gv = out[:, 0], g[:, 0]
        return ((y * (gv - self._segsum(gv * y))).reshape(-1, 1),)


class LeakyReLU(Op):
    name = 'leaky_relu'

    def __init__(self, slope: float = 0.01):
        self.slope = slope

    def _mask(self, x):
        return self.pinned if self.pinned is not None else x > 0

    def forward(self, x):
        return np.where(self._mask(x), x, self.slope * x)

    def pin(self, x):
        self.pinned = x > 0

    def margin(self, x) -> float:
        return float(np.abs(x).min()) if x.size else np.inf

    def backward(self, g, out, x):
        return (np.where(self._mask(x), g, self.slope * g),)


class ReLU(LeakyReLU):
    name = 'relu'

    def __init__(self):
        super().__init__(0.0)


class Concat(Op):
    name = 'concat'

    def forward(self, *xs):
        self.check(len({x.shape[0] for x in xs}) == 1, *xs)
        return np.concatenate(xs, axis=1)

    def backward(self, g, out, *xs):
        cuts = np.cumsum([x.shape[1] for x in xs])[:-1]
        return tuple(np.split(g, cuts, axis=1))


class Elementwise(Op):
    def forward(self, a, b):
        self.check(a.shape == b.shape, a, b)
        return self.fn(a, b)


class Add(Elementwise):
    name = 'add'
    fn = staticmethod(np.add)

    def backward(self, g, out, a, b):
        return g, g


class Sub(Elementwise):
    name = 'sub'
    fn = staticmethod(np.subtract)

    def backward(self, g, out, a, b):
        return g, -g


class Mul(Elementwise):
    name = 'mul'
    fn = staticmethod(np.multiply)

    def backward(self, g, out, a, b):
        return g * b, g * a


class Div(Elementwise):
    name = 'div'
    fn = staticmethod(np.divide)

    def backward(self, g, out, a, b):
        return g / b, -g * a / (b * b)


class AddRow(Op):
    """N x d plus a 1 x d row broadcast over all rows"""
    name = 'add_row'
    sign = 1.0

    def forward(self, x, r):
        self.check(r.shape == (1, x.shape[1]), x, r)
        return x + self.sign * r

    def backward(self, g, out, x, r):
        return g, self.sign * g.sum(axis=0, keepdims=True)


class SubRow(AddRow):
    name = 'sub_row'
    sign = -1.0


class Scale(Op):
    """x times a 1x1 node"""
    name = 'scale'

    def forward(self, x, s):
        self.check(s.shape == (1, 1), x, s)
        return x * s[0, 0]

    def backward(self, g, out, x, s):
        return g * s[0, 0], np.array([[np.sum(g * x)]])


class ConstScale(Op):
    name = 'const_scale'

    def __init__(self, c: float):
        self.c = float(c)

    def forward(self, x):
        return x * self.c

    def backward(self, g, out, x):
        return (g * self.c,)


class RowScale(Op):
    """row i of x times v[i] (v is N x 1)"""
    name = 'row_scale'

    def forward(self, x, v):
        self.check(v.shape == (x.shape[0], 1), x, v)
        return x * v

    def backward(self, g, out, x, v):
        return g * v, (g * x).sum(axis=1, keepdims=True)


class ColScale(Op):
    """column j of x times v[j] (v is 1 x d)"""
    name = 'col_scale'

    def forward(self, x, v):
        self.check(v.shape == (1, x.shape[1]), x, v)
        return x * v

    def backward(self, g, out, x, v):
        return g * v, (g * x).sum(axis=0, keepdims=True)


class Reciprocal(Op):
    name = 'reciprocal'

    def forward(self, x):
        if np.any(x == 0):
            at = tuple(int(i) for i in np.argwhere(x == 0)[0])
            raise ZeroNormError(f'reciprocal: entry {at} is zero')
        return 1.0 / x

    def backward(self, g, out, x):
        return (-g * out * out,)


class Transpose(Op):
    name = 'transpose'

    def forward(self, x):
        return x.T.copy()

    def backward(self, g, out, x):
        return (g.T.copy(),)


class Diag(Op):
    """diagonal of a square matrix as an N x 1 column"""
    name = 'diag'

    def forward(self, x):
        self.check(x.shape[0] == x.shape[1], x)
        return np.diag(x).reshape(-1, 1).copy()

    def backward(self, g, out, x):
        return (np.diagflat(g[:, 0]),)


class Sum(Op):
    name = 'sum'

    def forward(self, x):
        return np.array([[x.sum()]])

    def backward(self, g, out, x):
        return (np.full_like(x, g[0, 0]),)


class Mean(Op):
    name = 'mean'

    def forward(self, x):
        self.check(x.size > 0, x)
        return np.array([[x.mean()]])

    def backward(self, g, out, x):
        return (np.full_like(x, g[0, 0] / x.size),)


class ColSum(Op):
    """sum down each column: N x d -> 1 x d"""
    name = 'col_sum'

    def forward(self, x):
        return x.sum(axis=0, keepdims=True)

    def backward(self, g, out, x):
        return (np.repeat(g, x.shape[0], axis=0),)


class RowSum(Op):
    """sum across each row: N x d -> N x 1"""
    name = 'row_sum'

    def forward(self, x):
        return x.sum(axis=1, keepdims=True)

    def backward(self, g, out, x):
        return (np.repeat(g, x.shape[1], axis=1),)


class SqNormRows(Op):
    name = 'sqnorm_rows'

    def forward(self, x):
        return (x * x).sum(axis=1, keepdims=True)

    def backward(self, g, out, x):
        return (2.0 * g * x,)


class Cosine(Op):
    """cosine similarity between every row of a and every row of b"""
    name = 'cosine'

    @staticmethod
    def _unit(x, which):
        n = np.linalg.norm(x, axis=1, keepdims=True)
        if np.any(n == 0):
            raise ZeroNormError(f'cosine: row {int(np.flatnonzero(n[:, 0] == 0)[0])} of {which} has zero norm')
        return x / n, n

    def forward(self, a, b):
        self.check(a.shape[1] == b.shape[1], a, b)
        ua, _ = self._unit(a, 'a')
        ub, _ = self._unit(b, 'b')
        return ua @ ub.T

    def backward(self, g, out, a, b):
        ua, na = self._unit(a, 'a')
        ub, nb = self._unit(b, 'b')
        gua, gub = g @ ub, g.T @ ua
        ga = (gua - ua * (gua * ua).sum(axis=1, keepdims=True)) / na
        gb = (gub - ub * (gub * ub).sum(axis=1, keepdims=True)) / nb
        return ga, gb


class Exp(Op):
    name = 'exp'

    def forward(self, x):
        return np.exp(x)

    def backward(self, g, out, x):
        return (g * out,)


class Log(Op):
    name = 'log'

    def forward(self, x):
        return np.log(x)

    def backward(self, g, out, x):
        return (g / x,)


# ---functional surface---

def matmul(a: Node, b: Node) -> Node: return a.graph.apply(MatMul(), a, b)
def spmm(matrix, x: Node) -> Node: return x.graph.apply(SpMM(matrix), x)
def gather(x: Node, index) -> Node: return x.graph.apply(GatherRows(index), x)
def select_rows(x: Node, selector: Node) -> Node: return x.graph.apply(SelectRows(), x, selector)
def row_softmax(x: Node) -> Node: return x.graph.apply(RowSoftmax(), x)
def segment_softmax(x: Node, indptr) -> Node: return x.graph.apply(SegmentSoftmax(indptr), x)
def relu(x: Node) -> Node: return x.graph.apply(ReLU(), x)
def leaky_relu(x: Node, slope: float = 0.01) -> Node: return x.graph.apply(LeakyReLU(slope), x)
def concat(*xs: Node) -> Node: return xs[0].graph.apply(Concat(), *xs)
def add(a: Node, b: Node) -> Node: return a.graph.apply(Add(), a, b)
def sub(a: Node, b: Node) -> Node: return a.graph.apply(Sub(), a, b)
def mul(a: Node, b: Node) -> Node: return a.graph.apply(Mul(), a, b)
def div(a: Node, b: Node) -> Node: return a.graph.apply(Div(), a, b)
def add_row(x: Node, r: Node) -> Node: return x.graph.apply(AddRow(), x, r)
def sub_row(x: Node, r: Node) -> Node: return x.graph.apply(SubRow(), x, r)
def row_scale(x: Node, v: Node) -> Node: return x.graph.apply(RowScale(), x, v)
def col_scale(x: Node, v: Node) -> Node: return x.graph.apply(ColScale(), x, v)
def reciprocal(x: Node) -> Node: return x.graph.apply(Reciprocal(), x)
def transpose(x: Node) -> Node: return x.graph.apply(Transpose(), x)
def diag(x: Node) -> Node: return x.graph.apply(Diag(), x)
def total(x: Node) -> Node: return x.graph.apply(Sum(), x)
def mean(x: Node) -> Node: return x.graph.apply(Mean(), x)
def col_sum(x: Node) -> Node: return x.graph.apply(ColSum(), x)
def row_sum(x: Node) -> Node: return x.graph.apply(RowSum(), x)
def sqnorm_rows(x: Node) -> Node: return x.graph.apply(SqNormRows(), x)
def cosine(a: Node, b: Node) -> Node: return a.graph.apply(Cosine(), a, b)
def exp(x: Node) -> Node: return x.graph.apply(Exp(), x)
def log(x: Node) -> Node: return x.graph.apply(Log(), x)


def scale(x: Node, s) -> Node:
    if isinstance(s, Node):
        return x.graph.apply(Scale(), x, s)
    return x.graph.apply(ConstScale(s), x)


def edge_aggregate(weights: Node, x: Node, indptr, indices) -> Node:
    return x.graph.apply(EdgeAggregate(indptr, indices, x.shape[0]), weights, x)
