"""Label-smoothed reconstruction loss"""

from typing import Optional

import numpy as np

from ..errors import DimensionError
from ..numerics import Tensor, ops
from ..textdata.vocab import PAD


def reconstruction_loss(logits: Tensor, target_ids, epsilon: float = 0.1,
                        mask: Optional[np.ndarray] = None) -> Tensor:
    """
    Sum over non-pad positions of -[(1 - eps) log p_true + (eps / v) sum_i log p_i]

    Args:
        logits: [B x T x v] or [T x v]
        target_ids: Ids aligned with the logits' leading axes
        epsilon: Smoothing weight; 0 gives plain cross-entropy
        mask: Positions to count; defaults to target != PAD

    Returns:
        Scalar tensor (summed, not averaged)
    """
    target_ids = np.asarray(target_ids, dtype=np.int64)
    if target_ids.shape != logits.shape[:-1]:
        raise DimensionError(f"targets {target_ids.shape} do not align with logits {logits.shape}")
    if mask is None:
        mask = (target_ids != PAD).astype(np.float64)
    vocab_size = logits.shape[-1]

    log_probs = ops.log_softmax_rows(logits)
    true_term = ops.pick(log_probs, target_ids)
    per_position = ops.scale(true_term, 1.0 - epsilon)
    if epsilon > 0:
        uniform_term = ops.scale(ops.sum_axis(log_probs, axis=-1), epsilon / vocab_size)
        per_position = ops.add(per_position, uniform_term)
    return ops.neg(ops.sum_axis(ops.mul(per_position, Tensor(mask))))


def cross_entropy(logits: Tensor, target_ids, mask: Optional[np.ndarray] = None) -> Tensor:
    return reconstruction_loss(logits, target_ids, 0.0, mask)
