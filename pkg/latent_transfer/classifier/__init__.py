"""Attribute classifiers over latents"""

from .latent_classifier import (
    LatentClassifier,
    LatentScorer,
    LinearScorer,
    attribute_accuracy,
    classifier_loss,
    classifier_loss_from_logits,
    grad_wrt_latent,
    per_aspect_accuracy,
)
from .trainer import ClassifierTrainer, train_classifier

__all__ = [
    "LatentClassifier", "LatentScorer", "LinearScorer", "attribute_accuracy",
    "classifier_loss", "classifier_loss_from_logits", "grad_wrt_latent",
    "per_aspect_accuracy", "ClassifierTrainer", "train_classifier",
]
