"""Fast gradient iterative modification and the transfer pipeline"""

from .editor import fgim_edit, fgim_step, within_threshold
from .pipeline import degree_examples, sweep_degrees, sweep_targets, transfer, transfer_many

__all__ = [
    "fgim_edit", "fgim_step", "within_threshold",
    "degree_examples", "sweep_degrees", "sweep_targets", "transfer", "transfer_many",
]
