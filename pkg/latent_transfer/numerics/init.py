"""Seeded random streams and Xavier initialisation"""

from typing import Sequence

import numpy as np

from .tensor import Tensor, get_dtype


def seeded_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def xavier_bound(shape: Sequence[int]) -> float:
    fan_in = shape[0]
    fan_out = int(np.prod(shape[1:])) if len(shape) > 1 else shape[0]
    return float(np.sqrt(6.0 / (fan_in + fan_out)))


def xavier_init(shape: Sequence[int], rng: np.random.Generator) -> Tensor:
    """Uniform draw in +-sqrt(6 / (fan_in + fan_out)) as a trainable leaf"""
    bound = xavier_bound(shape)
    # draw in float64 so both precisions see the same stream
    values = rng.uniform(-bound, bound, size=tuple(shape))
    return Tensor(values.astype(get_dtype()), requires_grad=True)


def zeros_param(shape: Sequence[int]) -> Tensor:
    return Tensor(np.zeros(tuple(shape)), requires_grad=True)


def ones_param(shape: Sequence[int]) -> Tensor:
    return Tensor(np.ones(tuple(shape)), requires_grad=True)
