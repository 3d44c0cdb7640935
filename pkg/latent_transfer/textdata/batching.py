"""Padded id batches and deterministic batch streams"""

from dataclasses import dataclass
from typing import Iterator, List, Sequence

import numpy as np

from ..errors import ContractError
from ..models.transfer_models import Corpus, Example
from .vocab import BOS, PAD, Vocab


@dataclass
class Batch:
    ids: np.ndarray         # [B x T] int64, PAD-padded, EOS-terminated
    mask: np.ndarray        # [B x T] 1.0 on non-PAD positions
    lengths: np.ndarray     # [B] non-PAD counts
    attributes: np.ndarray  # [B x A]

    def __len__(self) -> int:
        return self.ids.shape[0]

    @property
    def decoder_inputs(self) -> np.ndarray:
        """Teacher-forcing inputs: BOS followed by the targets shifted right"""
        shifted = np.full_like(self.ids, PAD)
        shifted[:, 0] = BOS
        shifted[:, 1:] = self.ids[:, :-1]
        return shifted


def encode_padded(sentences: Sequence[Sequence[str]], vocab: Vocab, max_len: int) -> np.ndarray:
    """Encode with room for EOS after max_len tokens, pad to the longest row"""
    encoded = [vocab.encode(tokens, max_len + 1) for tokens in sentences]
    width = max(len(ids) for ids in encoded)
    ids = np.full((len(encoded), width), PAD, dtype=np.int64)
    for row, seq in enumerate(encoded):
        ids[row, : len(seq)] = seq
    return ids


def make_batch(examples: Sequence[Example], vocab: Vocab, max_len: int) -> Batch:
    if not examples:
        raise ContractError("cannot build an empty batch")
    ids = encode_padded([ex.tokens for ex in examples], vocab, max_len)
    mask = (ids != PAD).astype(np.float64)
    attributes = np.stack([ex.attributes.as_array() for ex in examples])
    return Batch(ids=ids, mask=mask, lengths=mask.sum(axis=1).astype(np.int64), attributes=attributes)


def batch_iter(corpus: Corpus, vocab: Vocab, batch_size: int, shuffle: bool = False,
               seed: int = 0) -> Iterator[Batch]:
    """
    Stream batches over a corpus

    The order is a fixed permutation of the seed when shuffling, corpus order
    otherwise; the final partial batch is emitted.
    """
    if batch_size < 1:
        raise ContractError(f"batch_size must be >= 1, got {batch_size}")
    order: List[int] = list(range(len(corpus)))
    if shuffle:
        order = list(np.random.default_rng(seed).permutation(len(corpus)))
    for start in range(0, len(order), batch_size):
        chunk = [corpus.items[i] for i in order[start:start + batch_size]]
        yield make_batch(chunk, vocab, corpus.max_len)
