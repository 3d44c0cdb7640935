"""Minimal tensor library with reverse-mode autodiff and Adam"""

from .tensor import (
    Tape,
    Tensor,
    backward,
    current_tape,
    get_dtype,
    get_precision,
    grad_enabled,
    no_grad,
    precision,
    set_precision,
)
from .module import Module, parameter
from .optim import Adam, AdamState, adam_step, clip_grad_norm
from .init import seeded_rng, xavier_init
from .gradcheck import gradient_check, relative_error

__all__ = [
    "Tape", "Tensor", "backward", "current_tape", "get_dtype", "get_precision",
    "grad_enabled", "no_grad", "precision", "set_precision",
    "Module", "parameter",
    "Adam", "AdamState", "adam_step", "clip_grad_norm",
    "seeded_rng", "xavier_init",
    "gradient_check", "relative_error",
]
