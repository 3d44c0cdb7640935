"""Tokenization, vocabulary, dataset ingestion and batching"""

from .vocab import BOS, EOS, PAD, UNK, Vocab, build_vocab, tokenize
from .batching import Batch, batch_iter, encode_padded, make_batch
from .factory import ProcessorFactory, load_dataset, load_from_config
from .stats import dataset_stats

__all__ = [
    "BOS", "EOS", "PAD", "UNK", "Vocab", "build_vocab", "tokenize",
    "Batch", "batch_iter", "encode_padded", "make_batch",
    "ProcessorFactory", "load_dataset", "load_from_config",
    "dataset_stats",
]
