"""
Transformer autoencoder with a pooled latent vector

encode_latent: token embeddings + positions -> Transformer encoder (U) ->
U + positions -> bidirectional GRU -> single-head self-attention -> sigmoid
-> masked sum over time = z.

decode_logits: z is projected to the model width, used as a one-slot
cross-attention memory and added to every decoder input embedding.
"""

import logging
from typing import List, Sequence, Union

import numpy as np

from ..errors import ContractError, DimensionError
from ..models.transfer_models import AEHyperParams
from ..numerics import Module, Tensor, no_grad, ops
from ..numerics.init import seeded_rng, xavier_init
from ..textdata.vocab import BOS, EOS, PAD
from .layers import (
    BiGRU,
    DecoderLayer,
    EncoderLayer,
    Linear,
    causal_mask,
    padding_mask,
    sinusoidal_positions,
)

logger = logging.getLogger(__name__)

SATURATION_ULPS = 64


class LatentPooler(Module):
    """
    Sum(Sigmoid(SelfAttention(GRU(U + H)))) over non-pad positions

    Gates are clipped a few ulps inside (0, 1) so that every component of z
    stays strictly within (0, T) even where the sigmoid rounds to 0 or 1.
    """

    def __init__(self, embed_dim: int, gru_hidden: int, attn_dim: int, rng: np.random.Generator):
        self.gru = BiGRU(embed_dim, gru_hidden, rng)
        latent_dim = 2 * gru_hidden
        self.attn_dim = attn_dim
        self.w_q = Linear(latent_dim, attn_dim, rng)
        self.w_k = Linear(latent_dim, attn_dim, rng)
        self.w_v = Linear(latent_dim, latent_dim, rng)

    def __call__(self, states: Tensor, mask: np.ndarray) -> Tensor:
        recurrent = self.gru(states, mask)
        scores = ops.matmul(self.w_q(recurrent), ops.transpose(self.w_k(recurrent), (0, 2, 1)))
        scores = ops.scale(scores, 1.0 / np.sqrt(self.attn_dim))
        scores = ops.add(scores, Tensor(padding_mask(mask)[:, 0]))
        attended = ops.matmul(ops.softmax_rows(scores), self.w_v(recurrent))
        margin = SATURATION_ULPS * float(np.finfo(attended.data.dtype).eps)
        gates = ops.clip(ops.sigmoid(attended), margin, 1.0 - margin)
        gated = ops.mul(gates, Tensor(mask[:, :, None]))
        return ops.sum_axis(gated, axis=1)


class TransformerAutoencoder(Module):
    """
    Encoder E, pooler and decoder D sharing one token embedding table

    Args:
        vocab_size: Size v of the vocabulary
        hp: Architecture hyperparameters
        seed: Seed for initialisation and dropout
    """

    def __init__(self, vocab_size: int, hp: AEHyperParams, seed: int = 0):
        hp.validate()
        self.hp = hp
        self.vocab_size = vocab_size
        self.max_positions = hp.max_len + 1
        self.rng = seeded_rng(seed)
        rng = self.rng
        self.positions = sinusoidal_positions(self.max_positions, hp.embed_dim)

        self.embedding = xavier_init((vocab_size, hp.embed_dim), rng)
        self.encoder_layers = [
            EncoderLayer(hp.embed_dim, hp.heads, hp.ffn_dim, rng, hp.dropout)
            for _ in range(hp.encoder_layers)
        ]
        self.pooler = LatentPooler(hp.embed_dim, hp.gru_hidden, hp.attn_dim, rng)
        self.latent_proj = Linear(hp.latent_dim, hp.embed_dim, rng)
        self.decoder_layers = [
            DecoderLayer(hp.embed_dim, hp.heads, hp.ffn_dim, rng, hp.dropout)
            for _ in range(hp.decoder_layers)
        ]
        self.output_proj = Linear(hp.embed_dim, vocab_size, rng)

    @property
    def latent_dim(self) -> int:
        return self.hp.latent_dim

    def _embed(self, ids: np.ndarray) -> Tensor:
        length = ids.shape[1]
        if length > self.max_positions:
            raise ContractError(f"sequence length {length} exceeds max_len + 1 = {self.max_positions}")
        tokens = ops.scale(ops.embedding_lookup(self.embedding, ids), np.sqrt(self.hp.embed_dim))
        return ops.add(tokens, Tensor(self.positions[:length]))

    def encode_latent(self, ids: Union[np.ndarray, Sequence[int]]) -> Tensor:
        """
        Map padded id rows [B x T] (or one row) to latents [B x latent_dim]

        Raises:
            ContractError: a row holds only PAD
        """
        ids = np.atleast_2d(np.asarray(ids, dtype=np.int64))
        mask = (ids != PAD).astype(np.float64)
        if np.any(mask.sum(axis=1) == 0):
            raise ContractError("cannot encode a sequence made only of PAD")

        x = ops.dropout(self._embed(ids), self.hp.dropout, self.rng, self.training)
        key_mask = padding_mask(mask)
        for layer in self.encoder_layers:
            x = layer(x, key_mask)
        with_positions = ops.add(x, Tensor(self.positions[: ids.shape[1]]))
        return self.pooler(with_positions, mask)

    def decode_logits(self, z: Tensor, teacher_ids: Union[np.ndarray, Sequence[int]]) -> Tensor:
        """
        Per-position vocabulary logits [B x T x v] under teacher forcing

        Args:
            z: Latents [B x latent_dim] (or one latent vector)
            teacher_ids: Decoder input ids starting with BOS

        Raises:
            ContractError: teacher rows do not start with BOS or are too long
            DimensionError: z does not have latent_dim components
        """
        teacher_ids = np.atleast_2d(np.asarray(teacher_ids, dtype=np.int64))
        if z.ndim == 1:
            z = ops.reshape(z, (1, z.shape[0]))
        if z.shape[-1] != self.latent_dim or z.shape[0] != teacher_ids.shape[0]:
            raise DimensionError(f"latent shape {z.shape} does not match batch {teacher_ids.shape} "
                                 f"with latent_dim {self.latent_dim}")
        if np.any(teacher_ids[:, 0] != BOS):
            raise ContractError("decoder teacher sequences must start with BOS")

        batch, length = teacher_ids.shape
        memory = ops.reshape(self.latent_proj(z), (batch, 1, self.hp.embed_dim))
        x = ops.add(self._embed(teacher_ids), memory)
        x = ops.dropout(x, self.hp.dropout, self.rng, self.training)
        mask = causal_mask(length)
        for layer in self.decoder_layers:
            x = layer(x, memory, mask)
        return self.output_proj(x)

    def greedy_decode(self, z: Union[Tensor, np.ndarray], max_len: int = 0) -> List[List[int]]:
        """
        Argmax decoding from BOS until EOS or max_len tokens

        Returns:
            One id list per latent row, without BOS and EOS
        """
        max_len = max_len or self.hp.max_len
        data = z.data if isinstance(z, Tensor) else np.asarray(z)
        data = np.atleast_2d(data)
        was_training = self.training
        self.eval()
        try:
            with no_grad():
                latent = Tensor(data)
                generated = np.full((data.shape[0], 1), BOS, dtype=np.int64)
                finished = np.zeros(data.shape[0], dtype=bool)
                for _ in range(min(max_len + 1, self.max_positions)):
                    logits = self.decode_logits(latent, generated).data[:, -1, :]
                    next_ids = np.where(finished, PAD, logits.argmax(axis=-1))
                    generated = np.concatenate([generated, next_ids[:, None]], axis=1)
                    finished |= next_ids == EOS
                    if finished.all():
                        break
        finally:
            self.train(was_training)

        outputs = []
        for row in generated[:, 1:]:
            ids = []
            for token in row:
                if token in (EOS, PAD):
                    break
                ids.append(int(token))
            outputs.append(ids[:max_len])
        return outputs

    def reconstruct(self, ids: np.ndarray) -> List[List[int]]:
        with no_grad():
            was_training = self.training
            self.eval()
            try:
                z = self.encode_latent(ids)
            finally:
                self.train(was_training)
        return self.greedy_decode(z)


def encode_corpus(model: TransformerAutoencoder, sentences: Sequence[Sequence[str]], vocab,
                  max_len: int, batch_size: int = 128) -> np.ndarray:
    """Latents [N x latent_dim] of tokenized sentences, encoder in eval mode"""
    from ..textdata.batching import encode_padded

    was_training = model.training
    model.eval()
    chunks = []
    try:
        with no_grad():
            for start in range(0, len(sentences), batch_size):
                ids = encode_padded(sentences[start:start + batch_size], vocab, max_len)
                chunks.append(model.encode_latent(ids).data.astype(np.float64))
    finally:
        model.train(was_training)
    if not chunks:
        return np.zeros((0, model.latent_dim))
    return np.concatenate(chunks, axis=0)
