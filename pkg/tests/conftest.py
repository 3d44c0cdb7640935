"""Shared fixtures"""

import numpy as np
import pytest

from latent_transfer.models.transfer_models import AEHyperParams, EvalConfig, Split
from latent_transfer.numerics import get_precision, set_precision
from latent_transfer.textdata.vocab import build_vocab
from latent_transfer.toydata import make_toy_corpus


@pytest.fixture(autouse=True)
def restore_precision():
    previous = get_precision()
    yield
    set_precision(previous)


@pytest.fixture
def float64():
    set_precision("float64")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_hp():
    return AEHyperParams(
        embed_dim=8, latent_dim=8, attn_dim=8, ffn_dim=16, gru_hidden=4,
        encoder_layers=1, decoder_layers=1, heads=2, max_len=12, dropout=0.0,
        batch_size=16, epochs=1,
    )


@pytest.fixture
def toy_corpora():
    return make_toy_corpus(n_train=40, n_dev=10, n_test=10, seed=3)


@pytest.fixture
def toy_vocab(toy_corpora):
    return build_vocab(toy_corpora[Split.TRAIN])


@pytest.fixture
def small_eval_config():
    return EvalConfig(hash_buckets=1024, embed_dim=8, lr=0.05, epochs=3, batch_size=16, sample_size=10)
