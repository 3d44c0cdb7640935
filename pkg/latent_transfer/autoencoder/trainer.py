"""
Autoencoder training loop

Adam with teacher forcing; the summed reconstruction loss is divided by the
batch's token count. The state with the lowest dev loss is restored at the
end.
"""

import logging
from typing import Optional, Tuple

import numpy as np

from ..errors import TrainingError
from ..models.transfer_models import AEHyperParams, Corpus, TrainingHistory
from ..numerics import Adam, Tensor, backward, clip_grad_norm, no_grad
from ..textdata.batching import batch_iter, encode_padded
from ..textdata.vocab import EOS, PAD, Vocab
from .losses import reconstruction_loss
from .model import TransformerAutoencoder


class AutoencoderTrainer:
    """Trains a TransformerAutoencoder on one corpus"""

    def __init__(self, model: TransformerAutoencoder, vocab: Vocab, hp: AEHyperParams, seed: int = 0):
        self.model = model
        self.vocab = vocab
        self.hp = hp
        self.seed = seed
        self.optimizer = Adam(model.parameters(), lr=hp.lr)
        self.logger = logging.getLogger(self.__class__.__name__)

    def _batch_loss(self, batch) -> Tuple[Tensor, int]:
        z = self.model.encode_latent(batch.ids)
        logits = self.model.decode_logits(z, batch.decoder_inputs)
        total = reconstruction_loss(logits, batch.ids, self.hp.smoothing)
        return total, int(batch.mask.sum())

    def train_epoch(self, corpus: Corpus, epoch: int) -> float:
        self.model.train()
        loss_sum, token_count = 0.0, 0
        for batch in batch_iter(corpus, self.vocab, self.hp.batch_size, shuffle=True, seed=self.seed + epoch):
            self.optimizer.zero_grad()
            total, tokens = self._batch_loss(batch)
            value = float(total.item())
            if not np.isfinite(value):
                raise TrainingError("reconstruction loss is not finite", epoch)
            backward(total * (1.0 / tokens))
            clip_grad_norm(self.optimizer.params, self.hp.grad_clip)
            self.optimizer.step()
            loss_sum += value
            token_count += tokens
        return loss_sum / max(token_count, 1)

    def evaluate(self, corpus: Corpus) -> float:
        """Per-token loss without updating anything"""
        self.model.eval()
        loss_sum, token_count = 0.0, 0
        with no_grad():
            for batch in batch_iter(corpus, self.vocab, self.hp.batch_size):
                total, tokens = self._batch_loss(batch)
                loss_sum += float(total.item())
                token_count += tokens
        self.model.train()
        return loss_sum / max(token_count, 1)

    def fit(self, train: Corpus, dev: Optional[Corpus] = None) -> TrainingHistory:
        history = TrainingHistory(metric_name="dev_loss")
        best = float("inf")
        for epoch in range(1, self.hp.epochs + 1):
            train_loss = self.train_epoch(train, epoch)
            dev_loss = self.evaluate(dev) if dev is not None and len(dev) else train_loss
            if not np.isfinite(dev_loss):
                raise TrainingError("dev loss is not finite", epoch)
            history.train_loss.append(train_loss)
            history.dev_metric.append(dev_loss)
            if dev_loss < best:
                best = dev_loss
                history.best_epoch = epoch
                history.best_state = self.model.state_dict()
            self.logger.info(
                f"Epoch {epoch}/{self.hp.epochs}: train_loss={train_loss:.4f} "
                f"dev_loss={dev_loss:.4f} best_epoch={history.best_epoch}"
            )
        if history.best_state:
            self.model.load_state_dict(history.best_state)
        return history


def train_autoencoder(train: Corpus, dev: Optional[Corpus], vocab: Vocab, hp: AEHyperParams,
                      seed: int = 0) -> Tuple[TransformerAutoencoder, TrainingHistory]:
    """Build and train an autoencoder, returning the best-dev model and its history"""
    model = TransformerAutoencoder(vocab.size, hp, seed)
    history = AutoencoderTrainer(model, vocab, hp, seed).fit(train, dev)
    return model, history


def reconstruction_accuracy(model: TransformerAutoencoder, corpus: Corpus, vocab: Vocab,
                            batch_size: int = 128) -> Tuple[float, float]:
    """
    Greedy reconstruction quality on a corpus

    Returns:
        (token accuracy over reference positions including EOS, exact sentence rate)
    """
    matched, total, exact = 0, 0, 0
    for start in range(0, len(corpus), batch_size):
        sentences = corpus.sentences[start:start + batch_size]
        ids = encode_padded(sentences, vocab, corpus.max_len)
        decoded = model.reconstruct(ids)
        for row, predicted in zip(ids, decoded):
            reference = [int(t) for t in row if t != PAD]
            hypothesis = predicted + [EOS]
            hits = sum(1 for i, tok in enumerate(reference) if i < len(hypothesis) and hypothesis[i] == tok)
            matched += hits
            total += len(reference)
            exact += int(hypothesis == reference)
    if total == 0:
        return 0.0, 0.0
    return matched / total, exact / len(corpus)
