"""
Independent text attribute classifier for transfer accuracy

A fastText-style model: unigram and bigram features hashed into buckets,
their embeddings averaged, and a linear layer with one sigmoid per aspect.
It trains on raw text and labels only and shares nothing with the latent
classifier.
"""

import logging
from typing import List, Sequence

import numpy as np

from ..errors import ContractError, TrainingError
from ..models.transfer_models import Corpus, EvalConfig
from ..numerics import Adam, Module, Tensor, backward, no_grad, ops
from ..numerics.init import seeded_rng, zeros_param
from ..classifier.latent_classifier import (
    attribute_accuracy,
    classifier_loss_from_logits,
    per_aspect_accuracy,
)

logger = logging.getLogger(__name__)

FNV_OFFSET = 0x811C9DC5
FNV_PRIME = 0x01000193


def fnv1a_32(text: str) -> int:
    h = FNV_OFFSET
    for byte in text.encode("utf-8"):
        h ^= byte
        h = (h * FNV_PRIME) & 0xFFFFFFFF
    return h


def ngram_features(tokens: Sequence[str], buckets: int) -> List[int]:
    """Hashed bucket ids of all unigrams and space-joined bigrams"""
    grams = list(tokens) + [f"{a} {b}" for a, b in zip(tokens, tokens[1:])]
    return [fnv1a_32(g) % buckets for g in grams]


class EvalClassifier(Module):
    def __init__(self, num_attributes: int, buckets: int = 262144, dim: int = 16, seed: int = 0):
        rng = seeded_rng(seed)
        self.buckets = buckets
        self.num_attributes = num_attributes
        self.embedding = Tensor(rng.uniform(-1.0 / dim, 1.0 / dim, size=(buckets, dim)), requires_grad=True)
        self.weight = zeros_param((dim, num_attributes))
        self.bias = zeros_param((num_attributes,))

    def features(self, sentences: Sequence[Sequence[str]]) -> List[List[int]]:
        return [ngram_features(tokens, self.buckets) for tokens in sentences]

    def logits(self, sentences: Sequence[Sequence[str]]) -> Tensor:
        return self.logits_from_features(self.features(sentences))

    def logits_from_features(self, features: Sequence[Sequence[int]]) -> Tensor:
        flat = [f for row in features for f in row]
        averaging = np.zeros((len(features), max(len(flat), 1)))
        col = 0
        for row, ids in enumerate(features):
            if ids:
                averaging[row, col:col + len(ids)] = 1.0 / len(ids)
            col += len(ids)
        if flat:
            embedded = ops.embedding_lookup(self.embedding, np.asarray(flat))
            pooled = ops.matmul(Tensor(averaging), embedded)
        else:
            pooled = Tensor(np.zeros((len(features), self.embedding.shape[1])))
        return ops.add(ops.matmul(pooled, self.weight), self.bias)

    def predict(self, sentences: Sequence[Sequence[str]]) -> np.ndarray:
        with no_grad():
            return ops.sigmoid(self.logits(sentences)).data


def train_eval_classifier(corpus: Corpus, config: EvalConfig, seed: int = 0) -> EvalClassifier:
    """
    Logistic training with Adam on raw sentences and their attribute vectors

    Only the embedding rows hit by a batch are updated (lazy Adam), so a step
    costs the batch's features rather than the whole hashed table.

    Raises:
        ContractError: the corpus is empty
    """
    if len(corpus) == 0:
        raise ContractError("evaluation classifier needs a nonempty training corpus")
    model = EvalClassifier(corpus.num_attributes, config.hash_buckets, config.embed_dim, seed)
    optimizer = Adam(model.parameters(), lr=config.lr)
    sentences = corpus.sentences
    labels = corpus.attribute_matrix()
    for epoch in range(1, config.epochs + 1):
        order = np.random.default_rng(seed + epoch).permutation(len(sentences))
        total = 0.0
        for start in range(0, len(order), config.batch_size):
            rows = order[start:start + config.batch_size]
            optimizer.zero_grad()
            features = model.features([sentences[i] for i in rows])
            loss = classifier_loss_from_logits(model.logits_from_features(features), labels[rows])
            if not np.isfinite(loss.item()):
                raise TrainingError("evaluation classifier loss is not finite", epoch)
            backward(loss * (1.0 / len(rows)))
            touched = np.fromiter((f for ids in features for f in ids), dtype=np.int64)
            optimizer.step({id(model.embedding): touched})
            total += loss.item()
        logger.info(f"Eval classifier epoch {epoch}/{config.epochs}: loss={total / len(order):.4f}")
    return model


def eval_accuracy(sentences: Sequence[Sequence[str]], targets: np.ndarray, clf: EvalClassifier) -> float:
    """Fraction of sentences whose predicted aspects all sit on the target's side of 0.5"""
    if len(sentences) == 0:
        raise ContractError("cannot measure accuracy on an empty sentence list")
    return attribute_accuracy(clf.predict(sentences), np.atleast_2d(targets))


def eval_per_aspect_accuracy(sentences: Sequence[Sequence[str]], targets: np.ndarray,
                             clf: EvalClassifier) -> np.ndarray:
    if len(sentences) == 0:
        raise ContractError("cannot measure accuracy on an empty sentence list")
    return per_aspect_accuracy(clf.predict(sentences), np.atleast_2d(targets))
