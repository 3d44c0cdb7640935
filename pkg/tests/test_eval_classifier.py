"""Tests for the hashed n-gram evaluation classifier"""

import numpy as np
import pytest

from latent_transfer.errors import ContractError
from latent_transfer.evalsuite.eval_classifier import (
    EvalClassifier,
    eval_accuracy,
    eval_per_aspect_accuracy,
    fnv1a_32,
    ngram_features,
    train_eval_classifier,
)
from latent_transfer.models.transfer_models import Corpus, EvalConfig, Example, Split
from latent_transfer.toydata import make_toy_corpus


@pytest.mark.parametrize("text,expected", [
    ("", 0x811C9DC5),
    ("a", 0xE40C292C),
    ("foobar", 0xBF9CF968),
])
def test_fnv1a_known_values(text, expected):
    assert fnv1a_32(text) == expected


def test_features_cover_unigrams_and_bigrams():
    features = ngram_features(["good", "food", "here"], 97)
    assert len(features) == 5
    assert all(0 <= f < 97 for f in features)
    assert features[3] == fnv1a_32("good food") % 97


def test_prediction_shapes():
    clf = EvalClassifier(2, buckets=64, dim=4)
    q = clf.predict([["a", "b"], [], ["c"]])
    assert q.shape == (3, 2)
    np.testing.assert_allclose(q, 0.5)


@pytest.fixture(scope="module")
def trained():
    corpora = make_toy_corpus(n_train=200, n_dev=10, n_test=60, seed=11)
    config = EvalConfig(hash_buckets=4096, embed_dim=8, lr=0.1, epochs=15, batch_size=16)
    return corpora, train_eval_classifier(corpora[Split.TRAIN], config, seed=0)


def test_learns_toy_sentiment(trained):
    corpora, clf = trained
    test = corpora[Split.TEST]
    assert eval_accuracy(test.sentences, test.attribute_matrix(), clf) > 0.8


def test_flipped_targets_score_low(trained):
    corpora, clf = trained
    test = corpora[Split.TEST]
    assert eval_accuracy(test.sentences, 1.0 - test.attribute_matrix(), clf) < 0.2


def test_per_aspect_accuracy_shape(trained):
    corpora, clf = trained
    test = corpora[Split.TEST]
    per_aspect = eval_per_aspect_accuracy(test.sentences, test.attribute_matrix(), clf)
    assert per_aspect.shape == (1,)


def test_empty_inputs(trained):
    _, clf = trained
    with pytest.raises(ContractError):
        eval_accuracy([], np.zeros((0, 1)), clf)
    with pytest.raises(ContractError):
        train_eval_classifier(Corpus(Split.TRAIN, [], 1, 12), EvalConfig())


def _shuffled(corpus: Corpus, seed: int) -> Corpus:
    order = np.random.default_rng(seed).permutation(len(corpus))
    items = [Example(item.tokens, corpus.items[j].attributes) for item, j in zip(corpus.items, order)]
    return Corpus(corpus.split, items, corpus.num_attributes, corpus.max_len)


def test_shuffled_labels_score_near_chance():
    corpora = make_toy_corpus(n_train=400, n_dev=400, n_test=2, seed=21)
    train, dev = _shuffled(corpora[Split.TRAIN], 1), _shuffled(corpora[Split.DEV], 2)
    config = EvalConfig(hash_buckets=4096, embed_dim=8, lr=0.1, epochs=5, batch_size=16)
    clf = train_eval_classifier(train, config, seed=0)
    assert abs(eval_accuracy(dev.sentences, dev.attribute_matrix(), clf) - 0.5) <= 0.1


def test_training_leaves_unhashed_rows_untouched():
    corpora = make_toy_corpus(n_train=40, n_dev=2, n_test=2, seed=4)
    config = EvalConfig(hash_buckets=4096, embed_dim=8, lr=0.1, epochs=2, batch_size=16)
    initial = EvalClassifier(1, config.hash_buckets, config.embed_dim, seed=0).embedding.data.copy()
    clf = train_eval_classifier(corpora[Split.TRAIN], config, seed=0)

    hit = sorted({f for tokens in corpora[Split.TRAIN].sentences for f in ngram_features(tokens, 4096)})
    unhit = np.setdiff1d(np.arange(4096), hit)
    np.testing.assert_array_equal(clf.embedding.data[unhit], initial[unhit])
    assert not np.array_equal(clf.embedding.data[hit], initial[hit])
