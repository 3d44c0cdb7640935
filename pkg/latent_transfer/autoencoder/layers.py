"""
Building blocks of the Transformer autoencoder

All layers work on batched tensors shaped [B x T x d]. Attention masks are
additive constants (0 or a large negative number) broadcast over heads.
"""

from typing import List, Optional

import numpy as np

from ..numerics import Module, Tensor, ops
from ..numerics.init import ones_param, xavier_init, zeros_param

NEG_INF = -1e9


def sinusoidal_positions(length: int, dim: int) -> np.ndarray:
    """Fixed sin/cos table [length x dim]"""
    positions = np.arange(length)[:, None]
    rates = 1.0 / np.power(10000.0, (2 * (np.arange(dim) // 2)) / dim)
    angles = positions * rates[None, :]
    table = np.zeros((length, dim))
    table[:, 0::2] = np.sin(angles[:, 0::2])
    table[:, 1::2] = np.cos(angles[:, 1::2])
    return table


def padding_mask(mask: np.ndarray) -> np.ndarray:
    """[B x T] 0/1 mask -> additive key mask [B x 1 x 1 x T]"""
    return np.where(mask[:, None, None, :] > 0, 0.0, NEG_INF)


def causal_mask(length: int) -> np.ndarray:
    """Additive mask [1 x 1 x T x T] hiding future positions"""
    upper = np.triu(np.ones((length, length)), k=1)
    return (upper * NEG_INF)[None, None, :, :]


class Linear(Module):
    def __init__(self, in_dim: int, out_dim: int, rng: np.random.Generator, bias: bool = True):
        self.weight = xavier_init((in_dim, out_dim), rng)
        self.bias = zeros_param((out_dim,)) if bias else None

    def __call__(self, x: Tensor) -> Tensor:
        out = ops.matmul(x, self.weight)
        return ops.add(out, self.bias) if self.bias is not None else out


class LayerNorm(Module):
    def __init__(self, dim: int):
        self.gain = ones_param((dim,))
        self.bias = zeros_param((dim,))

    def __call__(self, x: Tensor) -> Tensor:
        return ops.layer_norm(x, self.gain, self.bias)


class MultiHeadAttention(Module):
    """Scaled dot-product attention with `heads` heads of size d / heads"""

    def __init__(self, dim: int, heads: int, rng: np.random.Generator, dropout: float = 0.0):
        self.heads = heads
        self.head_dim = dim // heads
        self.dropout = dropout
        self.rng = rng
        self.w_q = Linear(dim, dim, rng)
        self.w_k = Linear(dim, dim, rng)
        self.w_v = Linear(dim, dim, rng)
        self.w_o = Linear(dim, dim, rng)

    def _split(self, x: Tensor) -> Tensor:
        batch, length, _ = x.shape
        return ops.transpose(ops.reshape(x, (batch, length, self.heads, self.head_dim)), (0, 2, 1, 3))

    def __call__(self, query: Tensor, memory: Tensor, mask: Optional[np.ndarray] = None) -> Tensor:
        batch, length, dim = query.shape
        q = self._split(self.w_q(query))
        k = self._split(self.w_k(memory))
        v = self._split(self.w_v(memory))
        scores = ops.scale(ops.matmul(q, ops.transpose(k, (0, 1, 3, 2))), 1.0 / np.sqrt(self.head_dim))
        if mask is not None:
            scores = ops.add(scores, Tensor(mask))
        weights = ops.dropout(ops.softmax_rows(scores), self.dropout, self.rng, self.training)
        context = ops.transpose(ops.matmul(weights, v), (0, 2, 1, 3))
        return self.w_o(ops.reshape(context, (batch, length, dim)))


class FeedForward(Module):
    def __init__(self, dim: int, hidden: int, rng: np.random.Generator, dropout: float = 0.0):
        self.inner = Linear(dim, hidden, rng)
        self.outer = Linear(hidden, dim, rng)
        self.dropout = dropout
        self.rng = rng

    def __call__(self, x: Tensor) -> Tensor:
        hidden = ops.dropout(ops.relu(self.inner(x)), self.dropout, self.rng, self.training)
        return self.outer(hidden)


class EncoderLayer(Module):
    """Post-norm self-attention + feed-forward block"""

    def __init__(self, dim: int, heads: int, ffn_dim: int, rng: np.random.Generator, dropout: float):
        self.attention = MultiHeadAttention(dim, heads, rng, dropout)
        self.norm1 = LayerNorm(dim)
        self.ffn = FeedForward(dim, ffn_dim, rng, dropout)
        self.norm2 = LayerNorm(dim)
        self.dropout = dropout
        self.rng = rng

    def _drop(self, x: Tensor) -> Tensor:
        return ops.dropout(x, self.dropout, self.rng, self.training)

    def __call__(self, x: Tensor, mask: np.ndarray) -> Tensor:
        x = self.norm1(ops.add(x, self._drop(self.attention(x, x, mask))))
        return self.norm2(ops.add(x, self._drop(self.ffn(x))))


class DecoderLayer(Module):
    """Causal self-attention, cross-attention over the latent memory, feed-forward"""

    def __init__(self, dim: int, heads: int, ffn_dim: int, rng: np.random.Generator, dropout: float):
        self.self_attention = MultiHeadAttention(dim, heads, rng, dropout)
        self.norm1 = LayerNorm(dim)
        self.cross_attention = MultiHeadAttention(dim, heads, rng, dropout)
        self.norm2 = LayerNorm(dim)
        self.ffn = FeedForward(dim, ffn_dim, rng, dropout)
        self.norm3 = LayerNorm(dim)
        self.dropout = dropout
        self.rng = rng

    def _drop(self, x: Tensor) -> Tensor:
        return ops.dropout(x, self.dropout, self.rng, self.training)

    def __call__(self, x: Tensor, memory: Tensor, self_mask: np.ndarray) -> Tensor:
        x = self.norm1(ops.add(x, self._drop(self.self_attention(x, x, self_mask))))
        x = self.norm2(ops.add(x, self._drop(self.cross_attention(x, memory))))
        return self.norm3(ops.add(x, self._drop(self.ffn(x))))


class GRUCell(Module):
    """Gates ordered reset, update, candidate"""

    def __init__(self, input_dim: int, hidden: int, rng: np.random.Generator):
        self.hidden = hidden
        self.w_x = xavier_init((input_dim, 3 * hidden), rng)
        self.w_h = xavier_init((hidden, 3 * hidden), rng)
        self.bias = zeros_param((3 * hidden,))

    def project_inputs(self, x: Tensor) -> Tensor:
        return ops.add(ops.matmul(x, self.w_x), self.bias)

    def __call__(self, gx: Tensor, h: Tensor) -> Tensor:
        size = self.hidden
        gh = ops.matmul(h, self.w_h)
        reset = ops.sigmoid(ops.add(gx[:, :size], gh[:, :size]))
        update = ops.sigmoid(ops.add(gx[:, size:2 * size], gh[:, size:2 * size]))
        candidate = ops.tanh(ops.add(gx[:, 2 * size:], ops.mul(reset, gh[:, 2 * size:])))
        return ops.add(ops.mul(ops.sub(1.0, update), candidate), ops.mul(update, h))


class BiGRU(Module):
    """
    Bidirectional GRU over padded sequences

    Padded steps carry the previous state through unchanged, so the backward
    direction starts at each row's last real token.
    """

    def __init__(self, input_dim: int, hidden: int, rng: np.random.Generator):
        self.hidden = hidden
        self.forward_cell = GRUCell(input_dim, hidden, rng)
        self.backward_cell = GRUCell(input_dim, hidden, rng)

    def _run(self, cell: GRUCell, x: Tensor, mask: np.ndarray, reverse: bool) -> List[Tensor]:
        batch, length, _ = x.shape
        gx_all = cell.project_inputs(x)
        h = Tensor(np.zeros((batch, self.hidden)))
        states: List[Optional[Tensor]] = [None] * length
        steps = range(length - 1, -1, -1) if reverse else range(length)
        for t in steps:
            candidate = cell(gx_all[:, t], h)
            keep = Tensor(mask[:, t:t + 1])
            h = ops.add(ops.mul(keep, candidate), ops.mul(ops.sub(1.0, keep), h))
            states[t] = h
        return states

    def __call__(self, x: Tensor, mask: np.ndarray) -> Tensor:
        forward = self._run(self.forward_cell, x, mask, reverse=False)
        backward = self._run(self.backward_cell, x, mask, reverse=True)
        return ops.concat([ops.stack(forward, axis=1), ops.stack(backward, axis=1)], axis=-1)
