"""
Fast gradient iterative modification of latents

Each weight of the ascending weight set restarts from the original latent.
Within a weight the step size decays by lambda after every unsuccessful
iterate, and the first iterate whose prediction lies within the threshold
of the target (L-infinity over aspects) is returned immediately, so the
smallest successful weight wins.
"""

import logging
from typing import Optional, Tuple

import numpy as np

from ..models.transfer_models import EditOutcome, EditStep, EditTrace, FGIMConfig, LossForm
from ..classifier.latent_classifier import LatentScorer, grad_wrt_latent

logger = logging.getLogger(__name__)


def fgim_step(z: np.ndarray, target, weight: float, scorer: LatentScorer,
              form: LossForm = LossForm.BINARY) -> np.ndarray:
    """z - weight * grad_z L(C(z), target)"""
    grad, _, _ = grad_wrt_latent(scorer, z, target, form)
    return np.asarray(z) - weight * grad


def within_threshold(prediction: np.ndarray, target: np.ndarray, threshold: float) -> bool:
    return float(np.max(np.abs(np.asarray(target) - np.asarray(prediction)))) < threshold


def fgim_edit(z: np.ndarray, target, config: FGIMConfig, scorer: LatentScorer,
              form: LossForm = LossForm.BINARY) -> EditOutcome:
    """
    Edit one latent until the classifier agrees with the target

    Args:
        z: Original latent [latent_dim]
        target: Target attribute values [A]
        config: Weight set, decay, threshold and inner step budget
        scorer: Frozen classifier supplying gradients

    Returns:
        EditOutcome with the accepted latent (or the lowest-loss iterate when
        every weight fails) and the full trace
    """
    config.validate()
    z = np.array(z, copy=True)
    target = np.asarray(target, dtype=np.float64)
    trace = EditTrace()

    start_grad, _, _ = grad_wrt_latent(scorer, z, target, form)
    start_norm = float(np.linalg.norm(start_grad))
    best: Optional[Tuple[float, np.ndarray]] = None

    for index, initial_weight in enumerate(config.weights):
        weight = initial_weight
        grad_norm = start_norm
        current = z - weight * start_grad
        for step in range(config.s_steps):
            grad, loss, prediction = grad_wrt_latent(scorer, current, target, form)
            trace.steps.append(EditStep(
                weight_index=index,
                inner_step=step,
                weight=float(weight),
                grad_norm=grad_norm,
                edit_norm=float(np.linalg.norm(current - z)),
                prediction=tuple(float(p) for p in np.atleast_1d(prediction)),
                loss=loss,
            ))
            if best is None or loss < best[0]:
                best = (loss, current)
            if within_threshold(prediction, target, config.threshold):
                trace.success = True
                trace.success_weight_index = index
                logger.debug(f"FGIM succeeded with weight {initial_weight} after {step + 1} iterates")
                return EditOutcome(z=z, edited=current, success=True, trace=trace)
            if step == config.s_steps - 1:
                break
            weight *= config.decay
            grad_norm = float(np.linalg.norm(grad))
            current = current - weight * grad

    logger.debug(f"FGIM failed for all {len(config.weights)} weights; keeping lowest-loss iterate")
    return EditOutcome(z=z, edited=best[1], success=False, trace=trace)
