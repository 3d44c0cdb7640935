"""
Latent classifier training

The classifier is fit on latents precomputed by a frozen encoder; the
encoder is never part of this graph.
"""

import logging
from typing import Optional

import numpy as np

from ..errors import ContractError, TrainingError
from ..models.transfer_models import ClassifierConfig, TrainingHistory
from ..numerics import Adam, Tensor, backward
from .latent_classifier import LatentScorer, attribute_accuracy, classifier_loss_from_logits


class ClassifierTrainer:
    """Adam on (z, y) pairs with best-dev-accuracy selection"""

    def __init__(self, scorer: LatentScorer, config: ClassifierConfig, seed: int = 0):
        self.scorer = scorer
        self.config = config
        self.seed = seed
        self.optimizer = Adam(scorer.parameters(), lr=config.lr)
        self.logger = logging.getLogger(self.__class__.__name__)

    def train_epoch(self, latents: np.ndarray, labels: np.ndarray, epoch: int) -> float:
        order = np.random.default_rng(self.seed + epoch).permutation(len(latents))
        loss_sum = 0.0
        for start in range(0, len(order), self.config.batch_size):
            rows = order[start:start + self.config.batch_size]
            self.optimizer.zero_grad()
            logits = self.scorer.logits(Tensor(latents[rows]))
            total = classifier_loss_from_logits(logits, labels[rows], self.config.loss_form)
            value = float(total.item())
            if not np.isfinite(value):
                raise TrainingError("classifier loss is not finite", epoch)
            backward(total * (1.0 / len(rows)))
            self.optimizer.step()
            loss_sum += value
        return loss_sum / len(order)

    def fit(self, train_latents: np.ndarray, train_labels: np.ndarray,
            dev_latents: Optional[np.ndarray] = None, dev_labels: Optional[np.ndarray] = None) -> TrainingHistory:
        if len(train_latents) == 0 or len(train_latents) != len(train_labels):
            raise ContractError("classifier training needs matching, nonempty latents and labels")
        if dev_latents is None or len(dev_latents) == 0:
            dev_latents, dev_labels = train_latents, train_labels

        history = TrainingHistory(metric_name="dev_accuracy")
        best = -1.0
        for epoch in range(1, self.config.epochs + 1):
            train_loss = self.train_epoch(train_latents, train_labels, epoch)
            accuracy = attribute_accuracy(self.scorer.predict(dev_latents), dev_labels)
            history.train_loss.append(train_loss)
            history.dev_metric.append(accuracy)
            if accuracy > best:
                best = accuracy
                history.best_epoch = epoch
                history.best_state = self.scorer.state_dict()
            self.logger.info(
                f"Epoch {epoch}/{self.config.epochs}: train_loss={train_loss:.4f} "
                f"dev_accuracy={accuracy:.4f} best_epoch={history.best_epoch}"
            )
        self.scorer.load_state_dict(history.best_state)
        return history


def train_classifier(scorer: LatentScorer, train_latents: np.ndarray, train_labels: np.ndarray,
                     dev_latents: Optional[np.ndarray], dev_labels: Optional[np.ndarray],
                     config: ClassifierConfig, seed: int = 0) -> TrainingHistory:
    """Train scorer in place and return its history"""
    return ClassifierTrainer(scorer, config, seed).fit(train_latents, train_labels, dev_latents, dev_labels)
