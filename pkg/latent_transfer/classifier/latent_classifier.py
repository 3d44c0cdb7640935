"""
Attribute classifiers over latent vectors

LatentScorer is the interface FGIM relies on: logits over A aspects and
predictions q = sigmoid(logits) in (0, 1)^A. Gradients with respect to z are
taken with the scorer's parameters detached, so FGIM never touches them.
"""

import logging
from abc import ABC, abstractmethod
from typing import Tuple

import numpy as np

from ..errors import DimensionError, NumericDomainError
from ..models.transfer_models import LossForm
from ..numerics import Module, Tape, Tensor, backward, no_grad, ops
from ..numerics.init import seeded_rng, xavier_init, zeros_param

logger = logging.getLogger(__name__)


def _use(param: Tensor, frozen: bool) -> Tensor:
    return param.detach() if frozen else param


class LatentScorer(Module, ABC):
    """Base class for classifiers C(z) -> q in (0, 1)^A"""

    @property
    @abstractmethod
    def latent_dim(self) -> int:
        pass

    @property
    @abstractmethod
    def num_attributes(self) -> int:
        pass

    @abstractmethod
    def logits(self, z: Tensor, frozen: bool = False) -> Tensor:
        """
        Pre-sigmoid scores [B x A] (or [A] for a single latent)

        Args:
            z: Latents [B x latent_dim] or [latent_dim]
            frozen: Use detached parameters so no gradient reaches them
        """
        pass

    def check_latent(self, z: Tensor) -> None:
        if z.shape[-1] != self.latent_dim:
            raise DimensionError(f"latent has {z.shape[-1]} components, classifier expects {self.latent_dim}")

    def classify(self, z: Tensor, frozen: bool = False) -> Tensor:
        return ops.sigmoid(self.logits(z, frozen))

    def predict(self, latents: np.ndarray) -> np.ndarray:
        """q for a batch of latents, outside any graph"""
        with no_grad():
            return self.classify(Tensor(np.asarray(latents))).data


class LatentClassifier(LatentScorer):
    """latent_dim -> hidden1 -> hidden2 -> A, sigmoid after every layer"""

    def __init__(self, latent_dim: int, num_attributes: int, hidden1: int = 100, hidden2: int = 50,
                 seed: int = 0):
        rng = seeded_rng(seed)
        self._latent_dim = latent_dim
        self._num_attributes = num_attributes
        self.w1 = xavier_init((latent_dim, hidden1), rng)
        self.b1 = zeros_param((hidden1,))
        self.w2 = xavier_init((hidden1, hidden2), rng)
        self.b2 = zeros_param((hidden2,))
        self.w3 = xavier_init((hidden2, num_attributes), rng)
        self.b3 = zeros_param((num_attributes,))

    @property
    def latent_dim(self) -> int:
        return self._latent_dim

    @property
    def num_attributes(self) -> int:
        return self._num_attributes

    def logits(self, z: Tensor, frozen: bool = False) -> Tensor:
        self.check_latent(z)
        single = z.ndim == 1
        x = ops.reshape(z, (1, z.shape[0])) if single else z
        h = ops.sigmoid(ops.add(ops.matmul(x, _use(self.w1, frozen)), _use(self.b1, frozen)))
        h = ops.sigmoid(ops.add(ops.matmul(h, _use(self.w2, frozen)), _use(self.b2, frozen)))
        out = ops.add(ops.matmul(h, _use(self.w3, frozen)), _use(self.b3, frozen))
        return ops.reshape(out, (self._num_attributes,)) if single else out


class LinearScorer(LatentScorer):
    """q = sigmoid(z W + b); W = [[1]], b = [0] is the scalar classifier sigmoid(z)"""

    def __init__(self, weight: np.ndarray, bias: np.ndarray):
        weight = np.atleast_2d(np.asarray(weight, dtype=np.float64))
        bias = np.atleast_1d(np.asarray(bias, dtype=np.float64))
        if bias.shape != (weight.shape[1],):
            raise DimensionError(f"bias {bias.shape} does not match weight {weight.shape}")
        self.weight = Tensor(weight, requires_grad=True)
        self.bias = Tensor(bias, requires_grad=True)

    @property
    def latent_dim(self) -> int:
        return self.weight.shape[0]

    @property
    def num_attributes(self) -> int:
        return self.weight.shape[1]

    def logits(self, z: Tensor, frozen: bool = False) -> Tensor:
        self.check_latent(z)
        single = z.ndim == 1
        x = ops.reshape(z, (1, z.shape[0])) if single else z
        out = ops.add(ops.matmul(x, _use(self.weight, frozen)), _use(self.bias, frozen))
        return ops.reshape(out, (self.num_attributes,)) if single else out


def classifier_loss(q: Tensor, target, form: LossForm = LossForm.BINARY) -> Tensor:
    """
    Attribute loss on probabilities

    BINARY: -sum[t log q + (1 - t) log(1 - q)]; ONE_SIDED: -sum t log q.

    Raises:
        DimensionError: q and target shapes differ
        NumericDomainError: some q is not strictly inside (0, 1)
    """
    target = np.asarray(target, dtype=np.float64)
    if q.shape != target.shape:
        raise DimensionError(f"prediction {q.shape} and target {target.shape} differ")
    if np.any(q.data <= 0.0) or np.any(q.data >= 1.0):
        raise NumericDomainError("classifier outputs must lie strictly inside (0, 1)")
    positive = ops.mul(Tensor(target), ops.log(q))
    if form is LossForm.ONE_SIDED:
        return ops.neg(ops.sum_axis(positive))
    negative = ops.mul(Tensor(1.0 - target), ops.log(ops.sub(1.0, q)))
    return ops.neg(ops.sum_axis(ops.add(positive, negative)))


def classifier_loss_from_logits(logits: Tensor, target, form: LossForm = LossForm.BINARY) -> Tensor:
    """classifier_loss(sigmoid(logits), target) written with softplus, finite for any logits"""
    target = np.asarray(target, dtype=np.float64)
    if logits.shape != target.shape:
        raise DimensionError(f"logits {logits.shape} and target {target.shape} differ")
    if form is LossForm.ONE_SIDED:
        return ops.sum_axis(ops.mul(Tensor(target), ops.softplus(ops.neg(logits))))
    return ops.sum_axis(ops.sub(ops.softplus(logits), ops.mul(Tensor(target), logits)))


def grad_wrt_latent(scorer: LatentScorer, z: np.ndarray, target,
                    form: LossForm = LossForm.BINARY) -> Tuple[np.ndarray, float, np.ndarray]:
    """
    Gradient of the attribute loss with respect to z

    Returns:
        (gradient, loss value, prediction C(z)); the scorer's parameters and
        their grad buffers are left untouched
    """
    with Tape():
        latent = Tensor(np.asarray(z), requires_grad=True)
        logits = scorer.logits(latent, frozen=True)
        loss = classifier_loss_from_logits(logits, target, form)
        backward(loss)
    prediction = 0.5 * (1.0 + np.tanh(0.5 * logits.data))
    return latent.grad.copy(), float(loss.item()), prediction


def attribute_accuracy(predictions: np.ndarray, targets: np.ndarray) -> float:
    """Fraction of rows with every aspect on the target's side of 0.5"""
    predictions, targets = np.atleast_2d(predictions), np.atleast_2d(targets)
    if len(predictions) == 0:
        return 0.0
    return float(np.mean(np.all((predictions > 0.5) == (targets > 0.5), axis=1)))


def per_aspect_accuracy(predictions: np.ndarray, targets: np.ndarray) -> np.ndarray:
    predictions, targets = np.atleast_2d(predictions), np.atleast_2d(targets)
    return np.mean((predictions > 0.5) == (targets > 0.5), axis=0)
