"""Adam with bias correction, and global-norm gradient clipping"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from ..errors import DimensionError
from .tensor import Tensor

logger = logging.getLogger(__name__)


@dataclass
class AdamState:
    m: List[np.ndarray] = field(default_factory=list)
    v: List[np.ndarray] = field(default_factory=list)
    t: int = 0
    lr: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def for_params(cls, params: Sequence[Tensor], **hyper) -> "AdamState":
        return cls(
            m=[np.zeros_like(p.data) for p in params],
            v=[np.zeros_like(p.data) for p in params],
            **hyper,
        )


def adam_step(params: Sequence[Tensor], grads: Sequence[np.ndarray], state: AdamState,
              rows: Optional[Sequence[Optional[np.ndarray]]] = None) -> None:
    """
    Apply one bias-corrected Adam update in place

    Args:
        params: Parameter tensors, updated in place
        grads: Gradients aligned with params
        state: Moment buffers and step counter, updated in place
        rows: Optional per-param row indices; a param with rows only has those
            rows of its moments and values updated (lazy update for lookup tables)

    Raises:
        DimensionError: params, grads and state are not aligned
    """
    if not (len(params) == len(grads) == len(state.m) == len(state.v)):
        raise DimensionError(
            f"adam_step: {len(params)} params, {len(grads)} grads, {len(state.m)} moment buffers"
        )
    for p, g, m in zip(params, grads, state.m):
        if p.shape != np.shape(g) or p.shape != m.shape:
            raise DimensionError(f"adam_step: param {p.shape}, grad {np.shape(g)}, moment {m.shape}")
    if rows is None:
        rows = [None] * len(params)
    elif len(rows) != len(params):
        raise DimensionError(f"adam_step: {len(params)} params but {len(rows)} row selections")

    state.t += 1
    correction1 = 1.0 - state.beta1 ** state.t
    correction2 = 1.0 - state.beta2 ** state.t
    for p, g, m, v, selected in zip(params, grads, state.m, state.v, rows):
        if selected is None:
            _adam_update(p.data, g, m, v, state, correction1, correction2)
            continue
        index = np.unique(np.asarray(selected, dtype=np.int64))
        values, moment1, moment2 = p.data[index], m[index], v[index]
        _adam_update(values, g[index], moment1, moment2, state, correction1, correction2)
        p.data[index], m[index], v[index] = values, moment1, moment2


def _adam_update(values: np.ndarray, g: np.ndarray, m: np.ndarray, v: np.ndarray, state: AdamState,
                 correction1: float, correction2: float) -> None:
    m *= state.beta1
    m += (1.0 - state.beta1) * g
    v *= state.beta2
    v += (1.0 - state.beta2) * g * g
    m_hat = m / correction1
    v_hat = v / correction2
    values -= (state.lr * m_hat / (np.sqrt(v_hat) + state.eps)).astype(values.dtype)


class Adam:
    """Optimizer object over a fixed parameter list"""

    def __init__(self, params: Sequence[Tensor], lr: float = 0.001,
                 betas=(0.9, 0.999), eps: float = 1e-8):
        self.params = list(params)
        self.state = AdamState.for_params(self.params, lr=lr, beta1=betas[0], beta2=betas[1], eps=eps)

    def step(self, rows: Optional[Dict[int, np.ndarray]] = None) -> None:
        """rows maps id(param) to the rows touched this step, for row-sparse params"""
        selections = None
        if rows:
            selections = [rows.get(id(p)) for p in self.params]
        adam_step(self.params, [p.grad for p in self.params], self.state, selections)

    def zero_grad(self) -> None:
        for p in self.params:
            p.zero_grad()


def clip_grad_norm(params: Sequence[Tensor], max_norm: float) -> float:
    """Rescale gradients so their global L2 norm is at most max_norm; returns the norm before clipping"""
    total = float(np.sqrt(sum(float(np.sum(p.grad.astype(np.float64) ** 2)) for p in params)))
    if max_norm > 0 and total > max_norm:
        factor = max_norm / (total + 1e-12)
        for p in params:
            p.grad *= factor
    return total
