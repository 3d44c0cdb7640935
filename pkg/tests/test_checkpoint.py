"""Tests for the checkpoint archive and run directories"""

import struct

import numpy as np
import pytest

from latent_transfer.autoencoder.model import TransformerAutoencoder
from latent_transfer.classifier.latent_classifier import LatentClassifier
from latent_transfer.cli.checkpoint import (
    MAGIC,
    check_latent_dims,
    decode_checkpoint,
    encode_checkpoint,
    load_checkpoint,
    load_metadata,
    save_checkpoint,
    save_metadata,
)
from latent_transfer.cli.runs import (
    CLF_CHECKPOINT,
    load_autoencoder,
    load_classifier,
    load_models,
    save_autoencoder,
    save_classifier,
)
from latent_transfer.errors import CheckpointError, IncompatibleCheckpointError
from latent_transfer.models.transfer_models import ClassifierConfig, LossForm


class TestArchive:
    def test_empty_archive(self):
        payload = encode_checkpoint({})
        assert payload == MAGIC + struct.pack("<II", 1, 0)
        assert len(payload) == 12
        assert decode_checkpoint(payload) == {}

    def test_single_value_layout(self):
        payload = encode_checkpoint({"w": np.ones((1, 1))})
        expected = (
            MAGIC + struct.pack("<II", 1, 1)
            + struct.pack("<I", 1) + b"w"
            + struct.pack("<I", 2) + struct.pack("<2Q", 1, 1)
            + b"\x00\x00\x80\x3f"
        )
        assert payload == expected

    def test_entries_keep_order_and_values(self, rng):
        tensors = {"b": rng.normal(size=(2, 3)), "a": rng.normal(size=4), "s": np.array(2.5)}
        decoded = decode_checkpoint(encode_checkpoint(tensors))
        assert list(decoded) == ["b", "a", "s"]
        for name, value in tensors.items():
            assert decoded[name].dtype == np.float32
            np.testing.assert_allclose(decoded[name], value.astype(np.float32))

    def test_save_load_save_is_byte_identical(self, tmp_path, rng):
        first, second = tmp_path / "a.ckpt", tmp_path / "b.ckpt"
        save_checkpoint({"x": rng.normal(size=(3, 2)), "y": rng.normal(size=5)}, first)
        save_checkpoint(load_checkpoint(first), second)
        assert first.read_bytes() == second.read_bytes()

    def test_truncated(self):
        payload = encode_checkpoint({"w": np.ones((2, 2))})
        for cut in (3, 10, 16, len(payload) - 1):
            with pytest.raises(CheckpointError, match="truncated|magic"):
                decode_checkpoint(payload[:cut])

    def test_bad_magic(self):
        with pytest.raises(CheckpointError, match="magic"):
            decode_checkpoint(b"NOPE" + struct.pack("<II", 1, 0))

    def test_unknown_version(self):
        with pytest.raises(CheckpointError, match="version"):
            decode_checkpoint(MAGIC + struct.pack("<II", 2, 0))

    def test_trailing_bytes(self):
        with pytest.raises(CheckpointError, match="trailing"):
            decode_checkpoint(encode_checkpoint({"w": np.ones(1)}) + b"\x00")

    def test_duplicate_names(self):
        with pytest.raises(CheckpointError):
            encode_checkpoint([("w", np.ones(1)), ("w", np.zeros(1))])
        entry = struct.pack("<I", 1) + b"w" + struct.pack("<I", 1) + struct.pack("<Q", 1) + b"\x00" * 4
        with pytest.raises(CheckpointError, match="duplicate"):
            decode_checkpoint(MAGIC + struct.pack("<II", 1, 2) + entry + entry)

    def test_missing_file(self, tmp_path):
        with pytest.raises(CheckpointError):
            load_checkpoint(tmp_path / "none.ckpt")

    def test_metadata(self, tmp_path):
        save_metadata({"b": 1, "a": [1, 2]}, tmp_path / "m.json")
        assert load_metadata(tmp_path / "m.json") == {"a": [1, 2], "b": 1}
        (tmp_path / "bad.json").write_text("{not json", encoding="utf-8")
        with pytest.raises(CheckpointError):
            load_metadata(tmp_path / "bad.json")


class TestLatentDims:
    def test_matching(self):
        assert check_latent_dims({"latent_proj.weight": np.zeros((8, 4))}, {"w1": np.zeros((8, 3))}) == 8

    def test_mismatch(self):
        with pytest.raises(IncompatibleCheckpointError):
            check_latent_dims({"latent_proj.weight": np.zeros((8, 4))}, {"w1": np.zeros((6, 3))})

    def test_missing_tensor(self):
        with pytest.raises(CheckpointError):
            check_latent_dims({}, {"w1": np.zeros((6, 3))})


class TestRunDirectory:
    @pytest.fixture
    def run_dir(self, tmp_path, toy_vocab, tiny_hp):
        model = TransformerAutoencoder(len(toy_vocab), tiny_hp, seed=0)
        save_autoencoder(model, toy_vocab, tmp_path)
        config = ClassifierConfig(hidden1=6, hidden2=5, loss_form=LossForm.ONE_SIDED)
        save_classifier(LatentClassifier(8, 1, 6, 5, seed=1), config, tmp_path)
        return tmp_path

    def test_models_round_trip(self, run_dir, toy_vocab, tiny_hp):
        model, scorer, vocab, form = load_models(run_dir)
        assert model.hp == tiny_hp
        assert not model.training
        assert vocab.size == toy_vocab.size
        assert (scorer.latent_dim, scorer.num_attributes) == (8, 1)
        assert form is LossForm.ONE_SIDED

    def test_reloaded_autoencoder_matches(self, run_dir, toy_vocab, tiny_hp):
        original = TransformerAutoencoder(len(toy_vocab), tiny_hp, seed=0)
        model, _ = load_autoencoder(run_dir)
        for (name, a), (_, b) in zip(original.named_parameters(), model.named_parameters()):
            np.testing.assert_allclose(a.data, b.data, rtol=1e-6, err_msg=name)

    def test_incompatible_classifier(self, run_dir):
        save_classifier(LatentClassifier(6, 1, 6, 5), ClassifierConfig(hidden1=6, hidden2=5), run_dir)
        with pytest.raises(IncompatibleCheckpointError):
            load_models(run_dir)

    def test_missing_classifier(self, run_dir):
        (run_dir / CLF_CHECKPOINT).unlink()
        with pytest.raises(CheckpointError):
            load_classifier(run_dir)
