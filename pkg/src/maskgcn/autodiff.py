"""Reverse-mode automatic differentiation over dense float64 matrices.

Every quantity is a 2-D array; scalars are 1x1 matrices. Operations build an
eager tape: each result node records its parents and a closure that pushes the
chain rule one step toward them. ``backward`` on a 1x1 root replays the tape
in reverse topological order, accumulating into ``.grad``.

Gradients accumulate (+=) across shared subexpressions and across backward
calls; the optimizer zeroes parameter grads between steps. Intermediate nodes
are rebuilt on every forward pass, so their grads start at zero. Nodes built
by ``constant`` carry ``track=False`` and never receive gradient.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError, ShapeError

Array = np.ndarray


def _as_matrix(data) -> Array:
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim == 0:
        return arr.reshape(1, 1)
    if arr.ndim == 1:
        return arr.reshape(1, -1)
    if arr.ndim == 2:
        return arr
    raise ShapeError(f"values are 2-D matrices, got shape {arr.shape}")


class Value:
    """A tape node: data, a same-shape gradient accumulator, and provenance."""

    __slots__ = ("data", "_grad", "parents", "push_grad", "op", "track")

    def __init__(self, data, parents=(), op="leaf", track=True):
        self.data = _as_matrix(data)
        self._grad = None  # allocated on first access
        self.parents = tuple(parents)
        self.push_grad = None
        self.op = op
        self.track = track

    @property
    def grad(self) -> Array:
        if self._grad is None:
            self._grad = np.zeros_like(self.data)
        return self._grad

    @grad.setter
    def grad(self, value) -> None:
        self._grad = value

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def item(self) -> float:
        if self.data.shape != (1, 1):
            raise ShapeError(f"item() requires a 1x1 value, got {self.data.shape}")
        return float(self.data[0, 0])

    def zero_grad(self) -> None:
        self._grad = None

    def __repr__(self):
        return f"Value(op={self.op!r}, shape={self.data.shape})"

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __mul__(self, other):
        return mul(self, other)

    def __matmul__(self, other):
        return matmul(self, other)

    def __neg__(self):
        return neg(self)


class Parameter(Value):
    """A named trainable leaf. Names must be unique within one model."""

    __slots__ = ("name",)

    def __init__(self, data, name: str):
        super().__init__(np.array(data, dtype=np.float64), op="param")
        self.name = name

    def __repr__(self):
        return f"Parameter({self.name!r}, shape={self.data.shape})"


def constant(data, op="const") -> Value:
    """Wrap plain numbers as a leaf that never receives gradient."""
    return Value(data, op=op, track=False)


def _result(data, parents, op) -> Value:
    track = any(p.track for p in parents)
    return Value(data, parents, op, track=track)


def _topo_order(root: Value) -> list[Value]:
    order: list[Value] = []
    seen: set[int] = set()
    stack: list[tuple[Value, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for parent in node.parents:
            stack.append((parent, False))
    return order  # every node appears after all of its parents


def backward(root: Value) -> None:
    """Accumulate d(root)/d(node) into .grad for every node reachable from root."""
    if root.data.shape != (1, 1):
        raise ShapeError(f"backward requires a 1x1 (scalar) root, got {root.data.shape}")
    order = _topo_order(root)
    root.grad += 1.0
    for node in reversed(order):
        if node.push_grad is not None and node.track:
            node.push_grad(node.grad)


def zero_all(root: Value) -> None:
    """Zero the grad of every node reachable from root (root included)."""
    for node in _topo_order(root):
        node.zero_grad()


# ---------------------------------------------------------------------------
# binary elementwise (strict shapes) and matmul


def _check_same_shape(a: Value, b: Value, op: str) -> None:
    if a.data.shape != b.data.shape:
        raise ShapeError(f"{op}: operand shapes differ, {a.data.shape} vs {b.data.shape}")


def add(a: Value, b: Value) -> Value:
    _check_same_shape(a, b, "add")
    out = _result(a.data + b.data, (a, b), "add")

    def push(g):
        if a.track:
            a.grad += g
        if b.track:
            b.grad += g

    out.push_grad = push
    return out


def sub(a: Value, b: Value) -> Value:
    _check_same_shape(a, b, "sub")
    out = _result(a.data - b.data, (a, b), "sub")

    def push(g):
        if a.track:
            a.grad += g
        if b.track:
            b.grad -= g

    out.push_grad = push
    return out


def mul(a: Value, b: Value) -> Value:
    _check_same_shape(a, b, "mul")
    out = _result(a.data * b.data, (a, b), "mul")

    def push(g):
        if a.track:
            a.grad += g * b.data
        if b.track:
            b.grad += g * a.data

    out.push_grad = push
    return out


def matmul(a: Value, b: Value) -> Value:
    if a.data.shape[1] != b.data.shape[0]:
        raise ShapeError(
            f"matmul: inner dimensions disagree, {a.data.shape} x {b.data.shape}"
        )
    out = _result(a.data @ b.data, (a, b), "matmul")

    def push(g):
        if a.track:
            a.grad += g @ b.data.T
        if b.track:
            b.grad += a.data.T @ g

    out.push_grad = push
    return out


# ---------------------------------------------------------------------------
# unary elementwise


def _sigmoid(x: Array) -> Array:
    # branch on sign so exp never overflows
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def sigmoid(a: Value) -> Value:
    out = _result(_sigmoid(a.data), (a,), "sigmoid")
    s = out.data

    def push(g):
        a.grad += g * s * (1.0 - s)

    out.push_grad = push
    return out


def relu(a: Value) -> Value:
    out = _result(np.maximum(a.data, 0.0), (a,), "relu")

    def push(g):
        a.grad += g * (a.data > 0.0)

    out.push_grad = push
    return out


def log(a: Value) -> Value:
    """Natural log. Inputs must be strictly positive; compose with shift()
    for the epsilon-guarded variant used in loss code."""
    if np.any(a.data <= 0.0):
        raise DomainError("log: input has nonpositive entries")
    out = _result(np.log(a.data), (a,), "log")

    def push(g):
        a.grad += g / a.data

    out.push_grad = push
    return out


def exp(a: Value) -> Value:
    out = _result(np.exp(a.data), (a,), "exp")
    e = out.data

    def push(g):
        a.grad += g * e

    out.push_grad = push
    return out


def neg(a: Value) -> Value:
    out = _result(-a.data, (a,), "neg")

    def push(g):
        a.grad -= g

    out.push_grad = push
    return out


def softplus(a: Value) -> Value:
    out = _result(np.logaddexp(0.0, a.data), (a,), "softplus")

    def push(g):
        a.grad += g * _sigmoid(a.data)

    out.push_grad = push
    return out


def sqrt(a: Value) -> Value:
    if np.any(a.data <= 0.0):
        raise DomainError("sqrt: input must be strictly positive")
    out = _result(np.sqrt(a.data), (a,), "sqrt")
    r = out.data

    def push(g):
        a.grad += g / (2.0 * r)

    out.push_grad = push
    return out


def rsqrt(a: Value) -> Value:
    if np.any(a.data <= 0.0):
        raise DomainError("rsqrt: input must be strictly positive")
    out = _result(1.0 / np.sqrt(a.data), (a,), "rsqrt")

    def push(g):
        a.grad += g * (-0.5) * a.data ** (-1.5)

    out.push_grad = push
    return out


def scale(a: Value, c: float) -> Value:
    """Multiply by a plain constant."""
    out = _result(a.data * c, (a,), "scale")

    def push(g):
        a.grad += g * c

    out.push_grad = push
    return out


def shift(a: Value, c: float) -> Value:
    """Add a plain constant."""
    out = _result(a.data + c, (a,), "shift")

    def push(g):
        a.grad += g

    out.push_grad = push
    return out


# ---------------------------------------------------------------------------
# scalar-Value broadcasting (for learnable scalars like the edge temperature)


def _check_scalar(s: Value, op: str) -> None:
    if s.data.shape != (1, 1):
        raise ShapeError(f"{op}: scalar operand must be 1x1, got {s.data.shape}")


def scale_by(a: Value, s: Value) -> Value:
    """Elementwise a * s where s is a learnable 1x1 scalar."""
    _check_scalar(s, "scale_by")
    out = _result(a.data * s.data[0, 0], (a, s), "scale_by")

    def push(g):
        if a.track:
            a.grad += g * s.data[0, 0]
        if s.track:
            s.grad += np.sum(g * a.data)

    out.push_grad = push
    return out


def shift_by(a: Value, s: Value) -> Value:
    """Elementwise a + s where s is a learnable 1x1 scalar."""
    _check_scalar(s, "shift_by")
    out = _result(a.data + s.data[0, 0], (a, s), "shift_by")

    def push(g):
        if a.track:
            a.grad += g
        if s.track:
            s.grad += np.sum(g)

    out.push_grad = push
    return out


# ---------------------------------------------------------------------------
# reductions


def sum(a: Value) -> Value:  # noqa: A001 - deliberate, used as ad.sum(...)
    out = _result(np.sum(a.data), (a,), "sum")

    def push(g):
        a.grad += g[0, 0]

    out.push_grad = push
    return out


def mean(a: Value) -> Value:
    out = _result(np.mean(a.data), (a,), "mean")
    inv_n = 1.0 / a.data.size

    def push(g):
        a.grad += g[0, 0] * inv_n

    out.push_grad = push
    return out


def row_sum(a: Value) -> Value:
    out = _result(a.data.sum(axis=1, keepdims=True), (a,), "row_sum")

    def push(g):
        a.grad += g  # broadcasts the Nx1 upstream over columns

    out.push_grad = push
    return out


# ---------------------------------------------------------------------------
# structure ops


def transpose(a: Value) -> Value:
    out = _result(a.data.T.copy(), (a,), "transpose")

    def push(g):
        a.grad += g.T

    out.push_grad = push
    return out


def broadcast_rows(a: Value, n: int) -> Value:
    """Tile a 1xD row vector into an NxD matrix."""
    if a.data.shape[0] != 1:
        raise ShapeError(f"broadcast_rows: expected a 1xD row, got {a.data.shape}")
    out = _result(np.tile(a.data, (n, 1)), (a,), "broadcast_rows")

    def push(g):
        a.grad += g.sum(axis=0, keepdims=True)

    out.push_grad = push
    return out


def broadcast_cols(a: Value, m: int) -> Value:
    """Tile an Nx1 column vector into an NxM matrix."""
    if a.data.shape[1] != 1:
        raise ShapeError(f"broadcast_cols: expected an Nx1 column, got {a.data.shape}")
    out = _result(np.tile(a.data, (1, m)), (a,), "broadcast_cols")

    def push(g):
        a.grad += g.sum(axis=1, keepdims=True)

    out.push_grad = push
    return out


def pairwise_sq_dist(a: Value) -> Value:
    """Squared Euclidean distances between all row pairs of an nxd matrix.

    Computed from explicit row differences so the output is bit-exactly
    symmetric and has an exactly zero diagonal.
    """
    x = a.data
    diff = x[:, None, :] - x[None, :, :]
    out = _result(np.einsum("ijk,ijk->ij", diff, diff), (a,), "pairwise_sq_dist")

    def push(g):
        s = g + g.T
        a.grad += 2.0 * (s.sum(axis=1, keepdims=True) * x - s @ x)

    out.push_grad = push
    return out
