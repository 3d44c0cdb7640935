"""Transformer autoencoder, reconstruction loss and training"""

from .model import LatentPooler, TransformerAutoencoder, encode_corpus
from .losses import cross_entropy, reconstruction_loss
from .trainer import AutoencoderTrainer, reconstruction_accuracy, train_autoencoder

__all__ = [
    "LatentPooler", "TransformerAutoencoder", "encode_corpus",
    "cross_entropy", "reconstruction_loss",
    "AutoencoderTrainer", "reconstruction_accuracy", "train_autoencoder",
]
