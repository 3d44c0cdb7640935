"""Finite-difference checks of every differentiable primitive and layer"""

import numpy as np
import pytest

from latent_transfer.autoencoder.layers import BiGRU, MultiHeadAttention, padding_mask
from latent_transfer.autoencoder.losses import reconstruction_loss
from latent_transfer.autoencoder.model import LatentPooler, TransformerAutoencoder
from latent_transfer.classifier.latent_classifier import (
    LatentClassifier,
    classifier_loss,
    classifier_loss_from_logits,
)
from latent_transfer.models.transfer_models import AEHyperParams, LossForm
from latent_transfer.numerics import Tensor, gradient_check, ops, relative_error
from latent_transfer.numerics.init import seeded_rng

S = ops.sum_axis
R = np.random.default_rng(11)
TRIALS = 100


def _rand(*shape, low=-1.0, high=1.0):
    return R.uniform(low, high, size=shape)


def _uniform(*shape, low=-1.0, high=1.0):
    return lambda rng: rng.uniform(low, high, size=shape)


def _away_from_zero(*shape):
    return lambda rng: rng.choice([-1.0, 1.0], size=shape) * rng.uniform(0.1, 1.5, size=shape)


def _off_clip_bounds(*shape):
    def draw(rng):
        inner = rng.uniform(0.1, 0.4, size=shape)
        outer = rng.uniform(0.6, 1.5, size=shape)
        magnitude = np.where(rng.random(shape) < 0.5, inner, outer)
        return rng.choice([-1.0, 1.0], size=shape) * magnitude
    return draw


def _inputs(*factories):
    return lambda rng: [make(rng) for make in factories]


WEIGHTS = _rand(2, 5)
AWAY_FROM_ZERO = np.array([[0.5, -0.7, 1.2], [-0.3, 0.9, -1.1]])
EMBED_IDS = np.array([[0, 2], [2, 4]])
PICK_IDS = np.array([[0, 3, 1], [2, 2, 0]])
MASK = np.array([[1.0, 1.0, 1.0, 0.0], [1.0, 1.0, 0.0, 0.0]])

# name -> (scalar function of the input tensors, draw of the input arrays)
PRIMITIVES = {
    "add_broadcast": (lambda t: S(ops.mul(ops.add(t[0], t[1]), ops.add(t[0], t[1]))),
                      _inputs(_uniform(3, 4), _uniform(4))),
    "sub_mul_div": (lambda t: S(ops.div(ops.mul(ops.sub(t[0], t[1]), t[1]), ops.add(t[1], 3.0))),
                    _inputs(_uniform(3), _uniform(3))),
    "neg_scale": (lambda t: S(ops.mul(ops.neg(t[0]), ops.scale(t[0], 0.3))), _inputs(_uniform(4))),
    "sigmoid": (lambda t: S(ops.mul(ops.sigmoid(t[0]), t[0])), _inputs(_uniform(2, 3, low=-4, high=4))),
    "tanh": (lambda t: S(ops.mul(ops.tanh(t[0]), t[0])), _inputs(_uniform(5))),
    "relu": (lambda t: S(ops.mul(ops.relu(t[0]), t[0])), _inputs(_away_from_zero(2, 3))),
    "exp": (lambda t: S(ops.exp(t[0])), _inputs(_uniform(4))),
    "log": (lambda t: S(ops.log(t[0])), _inputs(_uniform(4, low=0.5, high=2.0))),
    "softplus": (lambda t: S(ops.mul(ops.softplus(t[0]), t[0])), _inputs(_uniform(6, low=-5, high=5))),
    "mean_axis": (lambda t: S(ops.tanh(ops.mean(t[0], axis=1))), _inputs(_uniform(3, 4))),
    "reshape_transpose": (lambda t: S(ops.mul(ops.transpose(ops.reshape(t[0], (3, 2))), Tensor(AWAY_FROM_ZERO))),
                          _inputs(_uniform(2, 3))),
    "getitem": (lambda t: S(ops.mul(t[0][:, 1:], t[0][:, 1:])), _inputs(_uniform(3, 4))),
    "concat": (lambda t: S(ops.tanh(ops.concat([t[0], t[1]], axis=-1))), _inputs(_uniform(2, 3), _uniform(2, 2))),
    "stack": (lambda t: S(ops.mul(ops.stack([t[0], t[1]], axis=1), ops.stack([t[1], t[0]], axis=1))),
              _inputs(_uniform(2, 3), _uniform(2, 3))),
    "matmul_batched": (lambda t: S(ops.tanh(ops.matmul(t[0], t[1]))), _inputs(_uniform(2, 3, 4), _uniform(4, 5))),
    "softmax_rows": (lambda t: S(ops.mul(ops.softmax_rows(t[0]), Tensor(WEIGHTS))), _inputs(_uniform(2, 5))),
    "log_softmax_rows": (lambda t: S(ops.mul(ops.log_softmax_rows(t[0]), Tensor(WEIGHTS))),
                         _inputs(_uniform(2, 5))),
    "layer_norm": (lambda t: S(ops.mul(ops.layer_norm(t[0], t[1], t[2]), Tensor(WEIGHTS))),
                   _inputs(_uniform(2, 5, low=-2.0, high=2.0), _uniform(5, low=0.5, high=1.5), _uniform(5))),
    "embedding_lookup": (lambda t: S(ops.tanh(ops.embedding_lookup(t[0], EMBED_IDS))), _inputs(_uniform(5, 3))),
    "pick": (lambda t: S(ops.pick(ops.log_softmax_rows(t[0]), PICK_IDS)), _inputs(_uniform(2, 3, 4))),
    "clip": (lambda t: S(ops.mul(ops.clip(t[0], -0.5, 0.5), t[0])), _inputs(_off_clip_bounds(2, 3))),
    "dropout": (lambda t: S(ops.mul(ops.dropout(t[0], 0.5, np.random.default_rng(0)), t[0])),
                _inputs(_uniform(3, 3))),
}


def _worst_error(name, mode):
    fn, draw = PRIMITIVES[name]
    return max(gradient_check(fn, draw(np.random.default_rng(trial)), mode=mode) for trial in range(TRIALS))


@pytest.mark.parametrize("name", sorted(PRIMITIVES))
def test_primitive_gradients_float64(name):
    assert _worst_error(name, "float64") < 1e-6


@pytest.mark.parametrize("name", sorted(PRIMITIVES))
def test_primitive_gradients_float32(name):
    assert _worst_error(name, "float32") < 1e-4


def test_relative_error_floor_for_zero_gradients():
    assert relative_error(np.zeros(3), np.zeros(3)) == 0.0
    assert relative_error(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == pytest.approx(np.sqrt(2.0))


class TestLossGradients:
    @pytest.mark.parametrize("epsilon", [0.0, 0.1])
    def test_reconstruction_loss(self, epsilon):
        targets = np.array([[4, 2, 0], [5, 1, 2]])
        fn = lambda t: reconstruction_loss(t[0], targets, epsilon)  # noqa: E731
        assert gradient_check(fn, [_rand(2, 3, 6)]) < 1e-6

    @pytest.mark.parametrize("form", list(LossForm))
    def test_classifier_loss_from_logits(self, form):
        target = np.array([1.0, 0.0, 0.7])
        fn = lambda t: classifier_loss_from_logits(t[0], target, form)  # noqa: E731
        assert gradient_check(fn, [_rand(3, low=-3, high=3)]) < 1e-6

    def test_probability_form(self):
        target = np.array([1.0, 0.0])
        fn = lambda t: classifier_loss(t[0], target)  # noqa: E731
        assert gradient_check(fn, [np.array([0.8, 0.3])]) < 1e-6


@pytest.mark.usefixtures("float64")
class TestLayerGradients:
    def test_multi_head_attention_with_padding(self):
        attention = MultiHeadAttention(4, 2, seeded_rng(0))
        mask = padding_mask(np.array([[1.0, 1.0, 0.0]]))
        fn = lambda t: S(ops.tanh(attention(t[0], t[0], mask)))  # noqa: E731
        assert gradient_check(fn, [_rand(1, 3, 4)]) < 1e-6

    def test_bidirectional_gru(self):
        gru = BiGRU(3, 2, seeded_rng(0))
        fn = lambda t: S(ops.tanh(gru(t[0], MASK)))  # noqa: E731
        assert gradient_check(fn, [_rand(2, 4, 3)]) < 1e-6

    def test_latent_pooler(self):
        pooler = LatentPooler(3, 2, 4, seeded_rng(0))
        fn = lambda t: S(ops.mul(pooler(t[0], MASK), pooler(t[0], MASK)))  # noqa: E731
        assert gradient_check(fn, [_rand(2, 4, 3)]) < 1e-6

    def test_decoder_gradient_with_respect_to_latent(self):
        hp = AEHyperParams(embed_dim=8, latent_dim=8, attn_dim=8, ffn_dim=16, gru_hidden=4,
                           encoder_layers=1, decoder_layers=1, heads=2, max_len=5, dropout=0.0)
        model = TransformerAutoencoder(9, hp, seed=0)
        targets = np.array([[4, 5, 2, 0], [6, 7, 8, 2]])
        teacher = np.array([[1, 4, 5, 2], [1, 6, 7, 8]])
        fn = lambda t: reconstruction_loss(model.decode_logits(t[0], teacher), targets, 0.1)  # noqa: E731
        assert gradient_check(fn, [_rand(2, 8)]) < 1e-6

    def test_latent_classifier_gradient_with_respect_to_latent(self):
        scorer = LatentClassifier(6, 2, 5, 4, seed=0)
        target = np.array([[1.0, 0.0]])
        fn = lambda t: classifier_loss_from_logits(scorer.logits(t[0], frozen=True), target)  # noqa: E731
        assert gradient_check(fn, [_rand(1, 6)]) < 1e-6
