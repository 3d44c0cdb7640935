"""
Differentiable primitives

Each function computes the forward value with numpy and hands an adjoint rule
to make_result(). Binary elementwise ops follow numpy broadcasting; their
gradients are summed back to each operand's shape.
"""

from typing import Optional, Sequence, Union

import numpy as np

from ..errors import DimensionError, NumericDomainError, VocabIndexError
from .tensor import Tensor, as_tensor, make_result

Operand = Union[Tensor, float, int, np.ndarray]


def unbroadcast(grad: np.ndarray, shape) -> np.ndarray:
    """Sum grad down to shape (reverse of numpy broadcasting)"""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _check_broadcast(a: Tensor, b: Tensor, op: str) -> None:
    try:
        np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise DimensionError(f"{op}: shapes {a.shape} and {b.shape} do not broadcast") from None


def _finite(data: np.ndarray, op: str) -> np.ndarray:
    if not np.all(np.isfinite(data)):
        raise NumericDomainError(f"{op} produced a non-finite value")
    return data


# Elementwise arithmetic

def add(a: Operand, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast(a, b, "add")
    return make_result(
        a.data + b.data, (a, b),
        lambda g: (unbroadcast(g, a.shape), unbroadcast(g, b.shape)),
        "add",
    )


def sub(a: Operand, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast(a, b, "sub")
    return make_result(
        a.data - b.data, (a, b),
        lambda g: (unbroadcast(g, a.shape), unbroadcast(-g, b.shape)),
        "sub",
    )


def mul(a: Operand, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast(a, b, "mul")
    return make_result(
        a.data * b.data, (a, b),
        lambda g: (unbroadcast(g * b.data, a.shape), unbroadcast(g * a.data, b.shape)),
        "mul",
    )


def div(a: Operand, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast(a, b, "div")
    if np.any(b.data == 0):
        raise NumericDomainError("div: division by zero")
    return make_result(
        a.data / b.data, (a, b),
        lambda g: (
            unbroadcast(g / b.data, a.shape),
            unbroadcast(-g * a.data / (b.data ** 2), b.shape),
        ),
        "div",
    )


def neg(a: Tensor) -> Tensor:
    return make_result(-a.data, (a,), lambda g: (-g,), "neg")


def scale(a: Tensor, factor: float) -> Tensor:
    return make_result(a.data * factor, (a,), lambda g: (g * factor,), "scale")


# Nonlinearities

def sigmoid(a: Tensor) -> Tensor:
    # tanh form stays finite for any input
    s = 0.5 * (1.0 + np.tanh(0.5 * a.data))
    return make_result(s, (a,), lambda g: (g * s * (1.0 - s),), "sigmoid")


def tanh(a: Tensor) -> Tensor:
    t = np.tanh(a.data)
    return make_result(t, (a,), lambda g: (g * (1.0 - t * t),), "tanh")


def relu(a: Tensor) -> Tensor:
    positive = a.data > 0
    return make_result(a.data * positive, (a,), lambda g: (g * positive,), "relu")


def clip(a: Tensor, low: float, high: float) -> Tensor:
    """Clamp into [low, high]; gradient passes only where the input was inside"""
    inside = (a.data >= low) & (a.data <= high)
    return make_result(np.clip(a.data, low, high), (a,), lambda g: (g * inside,), "clip")


def exp(a: Tensor) -> Tensor:
    with np.errstate(over="ignore"):
        e = np.exp(a.data)
    _finite(e, "exp")
    return make_result(e, (a,), lambda g: (g * e,), "exp")


def log(a: Tensor) -> Tensor:
    if np.any(a.data <= 0):
        raise NumericDomainError("log: input must be strictly positive")
    return make_result(np.log(a.data), (a,), lambda g: (g / a.data,), "log")


def softplus(a: Tensor) -> Tensor:
    """log(1 + exp(a)), stable for large |a|"""
    s = 0.5 * (1.0 + np.tanh(0.5 * a.data))
    return make_result(np.logaddexp(0.0, a.data), (a,), lambda g: (g * s,), "softplus")


# Reductions and shape manipulation

def sum_axis(a: Tensor, axis: Optional[Union[int, tuple]] = None, keepdims: bool = False) -> Tensor:
    def grad_fn(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, a.shape).copy(),)

    return make_result(a.data.sum(axis=axis, keepdims=keepdims), (a,), grad_fn, "sum")


def mean(a: Tensor, axis: Optional[int] = None, keepdims: bool = False) -> Tensor:
    count = a.size if axis is None else a.shape[axis]
    return scale(sum_axis(a, axis=axis, keepdims=keepdims), 1.0 / count)


def reshape(a: Tensor, shape) -> Tensor:
    return make_result(a.data.reshape(shape), (a,), lambda g: (g.reshape(a.shape),), "reshape")


def transpose(a: Tensor, axes: Optional[Sequence[int]] = None) -> Tensor:
    if axes is None:
        axes = tuple(reversed(range(a.ndim)))
    inverse = np.argsort(axes)
    return make_result(
        np.transpose(a.data, axes), (a,), lambda g: (np.transpose(g, inverse),), "transpose"
    )


def getitem(a: Tensor, index) -> Tensor:
    def grad_fn(g):
        full = np.zeros_like(a.data)
        np.add.at(full, index, g)
        return (full,)

    return make_result(a.data[index], (a,), grad_fn, "getitem")


def concat(tensors: Sequence[Tensor], axis: int = -1) -> Tensor:
    tensors = [as_tensor(t) for t in tensors]
    sizes = [t.shape[axis] for t in tensors]
    try:
        data = np.concatenate([t.data for t in tensors], axis=axis)
    except ValueError:
        raise DimensionError(
            f"concat: incompatible shapes {[t.shape for t in tensors]} on axis {axis}"
        ) from None
    splits = np.cumsum(sizes)[:-1]
    return make_result(data, tensors, lambda g: tuple(np.split(g, splits, axis=axis)), "concat")


def stack(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    tensors = [as_tensor(t) for t in tensors]
    shapes = {t.shape for t in tensors}
    if len(shapes) != 1:
        raise DimensionError(f"stack: shapes differ {sorted(shapes)}")
    data = np.stack([t.data for t in tensors], axis=axis)
    return make_result(
        data, tensors,
        lambda g: tuple(np.take(g, i, axis=axis) for i in range(len(tensors))),
        "stack",
    )


# Linear algebra

def matmul(a: Tensor, b: Tensor) -> Tensor:
    """
    Matrix product over the last two axes, batched over leading axes

    Raises:
        DimensionError: inner dimensions differ
    """
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise DimensionError(f"matmul: cannot multiply shapes {a.shape} and {b.shape}")

    def grad_fn(g):
        grad_a = g @ np.swapaxes(b.data, -1, -2)
        grad_b = np.swapaxes(a.data, -1, -2) @ g
        return unbroadcast(grad_a, a.shape), unbroadcast(grad_b, b.shape)

    return make_result(a.data @ b.data, (a, b), grad_fn, "matmul")


# Row-wise normalisations

def softmax_rows(a: Tensor) -> Tensor:
    """Softmax over the last axis with max subtraction"""
    shifted = a.data - a.data.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    p = e / e.sum(axis=-1, keepdims=True)

    def grad_fn(g):
        return (p * (g - (g * p).sum(axis=-1, keepdims=True)),)

    return make_result(p, (a,), grad_fn, "softmax")


def log_softmax_rows(a: Tensor) -> Tensor:
    shifted = a.data - a.data.max(axis=-1, keepdims=True)
    lse = np.log(np.exp(shifted).sum(axis=-1, keepdims=True))
    out = shifted - lse
    p = np.exp(out)

    def grad_fn(g):
        return (g - p * g.sum(axis=-1, keepdims=True),)

    return make_result(out, (a,), grad_fn, "log_softmax")


def layer_norm(x: Tensor, gain: Tensor, bias: Tensor, eps: float = 1e-5) -> Tensor:
    """Normalise the last axis to zero mean and unit variance, then apply gain and bias"""
    if gain.shape != (x.shape[-1],) or bias.shape != (x.shape[-1],):
        raise DimensionError(
            f"layer_norm: gain {gain.shape} / bias {bias.shape} do not match feature size {x.shape[-1]}"
        )
    mu = x.data.mean(axis=-1, keepdims=True)
    centered = x.data - mu
    rstd = 1.0 / np.sqrt((centered ** 2).mean(axis=-1, keepdims=True) + eps)
    xhat = centered * rstd
    out = xhat * gain.data + bias.data
    lead = tuple(range(x.ndim - 1))

    def grad_fn(g):
        dxhat = g * gain.data
        dx = rstd * (
            dxhat
            - dxhat.mean(axis=-1, keepdims=True)
            - xhat * (dxhat * xhat).mean(axis=-1, keepdims=True)
        )
        return dx, (g * xhat).sum(axis=lead), g.sum(axis=lead)

    return make_result(out, (x, gain, bias), grad_fn, "layer_norm")


# Index-based ops

def embedding_lookup(table: Tensor, ids) -> Tensor:
    """Gather rows of table[v x d] by integer ids of any shape; scatter-add on backward"""
    ids = np.asarray(ids, dtype=np.int64)
    vocab_size = table.shape[0]
    if ids.size and (ids.min() < 0 or ids.max() >= vocab_size):
        raise VocabIndexError(f"embedding_lookup: id out of range [0, {vocab_size})")

    def grad_fn(g):
        full = np.zeros_like(table.data)
        np.add.at(full, ids, g)
        return (full,)

    return make_result(table.data[ids], (table,), grad_fn, "embedding")


def pick(a: Tensor, ids) -> Tensor:
    """out[..., ] = a[..., ids[...]]: gather one entry of the last axis per position"""
    ids = np.asarray(ids, dtype=np.int64)
    if ids.shape != a.shape[:-1]:
        raise DimensionError(f"pick: ids shape {ids.shape} does not match {a.shape[:-1]}")
    if ids.size and (ids.min() < 0 or ids.max() >= a.shape[-1]):
        raise VocabIndexError(f"pick: id out of range [0, {a.shape[-1]})")
    expanded = ids[..., None]

    def grad_fn(g):
        full = np.zeros_like(a.data)
        np.put_along_axis(full, expanded, g[..., None], axis=-1)
        return (full,)

    return make_result(np.take_along_axis(a.data, expanded, axis=-1)[..., 0], (a,), grad_fn, "pick")


def dropout(a: Tensor, rate: float, rng: np.random.Generator, training: bool = True) -> Tensor:
    """Inverted dropout; identity when rate is 0 or outside training"""
    if not training or rate <= 0.0:
        return a
    keep = (rng.random(a.shape) >= rate).astype(a.data.dtype) / (1.0 - rate)
    return make_result(a.data * keep, (a,), lambda g: (g * keep,), "dropout")
