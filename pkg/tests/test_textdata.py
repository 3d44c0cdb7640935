"""Tests for tokenization, vocabulary, batching, dataset layouts and statistics"""

import numpy as np
import pytest

from latent_transfer.errors import ContractError, IngestionError, VocabIndexError
from latent_transfer.models.transfer_models import AttributeVector, Corpus, DatasetLayout, Example, Split
from latent_transfer.textdata.batching import batch_iter, encode_padded, make_batch
from latent_transfer.textdata.factory import ProcessorFactory, load_dataset
from latent_transfer.textdata.layout_processors import FilePerAttributeProcessor, TsvProcessor
from latent_transfer.textdata.stats import dataset_stats
from latent_transfer.textdata.vocab import BOS, EOS, PAD, RESERVED, UNK, Vocab, build_vocab, tokenize


def _write(path, lines):
    path.write_text("".join(f"{line}\n" for line in lines), encoding="utf-8")


class TestVocab:
    def test_tokenize_lowercases_and_splits(self):
        assert tokenize("The Food  was GREAT .") == ["the", "food", "was", "great", "."]

    def test_frequency_order_with_lexicographic_ties(self):
        vocab = build_vocab([["b", "a", "c"], ["a", "b"], ["a"]])
        assert vocab.id_to_token == list(RESERVED) + ["a", "b", "c"]

    def test_min_count_and_max_size(self):
        sentences = [["x", "x", "y", "z", "z", "z"]]
        assert build_vocab(sentences, min_count=2).id_to_token[4:] == ["z", "x"]
        assert build_vocab(sentences, max_size=5).id_to_token[4:] == ["z"]

    def test_empty_corpus_rejected(self):
        with pytest.raises(IngestionError):
            build_vocab([[], []])

    def test_encode_appends_eos_and_maps_oov(self):
        vocab = build_vocab([["good", "food"]])
        ids = vocab.encode(["good", "pizza"], max_len=10)
        assert ids == [vocab.token_to_id["good"], UNK, EOS]

    def test_encode_truncates(self):
        vocab = build_vocab([["a", "b", "c"]])
        assert len(vocab.encode(["a", "b", "c"], max_len=2)) == 2

    def test_decode_stops_at_eos_and_drops_reserved(self):
        vocab = build_vocab([["good", "food"]])
        good, food = vocab.token_to_id["good"], vocab.token_to_id["food"]
        assert vocab.decode([BOS, good, UNK, food, EOS, good]) == ["good", "food"]

    def test_decode_rejects_out_of_range(self):
        vocab = build_vocab([["a"]])
        with pytest.raises(VocabIndexError):
            vocab.decode([vocab.size])

    def test_save_and_load(self, tmp_path):
        vocab = build_vocab([["the", "food", "was", "good"]])
        vocab.save(tmp_path / "vocab.txt")
        assert Vocab.load(tmp_path / "vocab.txt").id_to_token == vocab.id_to_token

    def test_reserved_prefix_required(self):
        with pytest.raises(ContractError):
            Vocab(["a", "b", "c", "d"])


class TestBatching:
    def test_encode_padded_keeps_eos_at_max_len(self):
        vocab = build_vocab([["a", "b", "c"]])
        ids = encode_padded([["a", "b", "c"], ["a"]], vocab, max_len=3)
        assert ids.shape == (2, 4)
        assert ids[0, 3] == EOS
        assert list(ids[1]) == [vocab.token_to_id["a"], EOS, PAD, PAD]

    def test_decoder_inputs_shift_right_after_bos(self):
        vocab = build_vocab([["a", "b"]])
        example = Example(["a", "b"], AttributeVector.of(1.0))
        batch = make_batch([example], vocab, max_len=5)
        assert list(batch.decoder_inputs[0]) == [BOS, batch.ids[0, 0], batch.ids[0, 1]]
        assert batch.lengths[0] == 3
        np.testing.assert_array_equal(batch.attributes, [[1.0]])

    def test_batch_iter_covers_corpus_once(self, toy_corpora, toy_vocab):
        corpus = toy_corpora[Split.TRAIN]
        sizes = [len(b) for b in batch_iter(corpus, toy_vocab, 16, shuffle=True, seed=1)]
        assert sizes == [16, 16, 8]

    def test_shuffle_is_seeded(self, toy_corpora, toy_vocab):
        corpus = toy_corpora[Split.TRAIN]
        first = next(batch_iter(corpus, toy_vocab, 8, shuffle=True, seed=5)).ids
        again = next(batch_iter(corpus, toy_vocab, 8, shuffle=True, seed=5)).ids
        np.testing.assert_array_equal(first, again)


class TestFilePerAttributeLayout:
    def test_two_names_map_to_scalar_labels(self, tmp_path):
        _write(tmp_path / "train.0", ["the food was bad ."])
        _write(tmp_path / "train.1", ["the food was good .", "great place !"])
        corpora = FilePerAttributeProcessor(str(tmp_path), max_len=20).process()
        train = corpora[Split.TRAIN]
        assert train.num_attributes == 1
        assert [item.attributes.values for item in train.items] == [(0.0,), (1.0,), (1.0,)]
        assert Split.DEV not in corpora

    def test_more_names_become_one_hot(self, tmp_path):
        for name in ("a", "b", "c"):
            _write(tmp_path / f"train.{name}", [f"sentence {name}"])
        train = FilePerAttributeProcessor(str(tmp_path), 20, ["a", "b", "c"]).process()[Split.TRAIN]
        assert train.num_attributes == 3
        assert train.items[1].attributes.values == (0.0, 1.0, 0.0)

    def test_prefix_truncation_and_references(self, tmp_path):
        _write(tmp_path / "sentiment.train.0", ["one two three four five"])
        _write(tmp_path / "sentiment.train.1", ["six"])
        _write(tmp_path / "sentiment.train.0.ref", ["one two"])
        _write(tmp_path / "sentiment.train.1.ref", ["seven"])
        train = FilePerAttributeProcessor(str(tmp_path), 3, file_prefix="sentiment.").process()[Split.TRAIN]
        assert train.items[0].tokens == ["one", "two", "three"]
        assert train.items[1].reference == ["seven"]
        assert train.has_references

    def test_empty_lines_skipped(self, tmp_path):
        _write(tmp_path / "train.0", ["bad", "", "worse"])
        _write(tmp_path / "train.1", ["good"])
        assert len(FilePerAttributeProcessor(str(tmp_path), 5).process()[Split.TRAIN]) == 3

    def test_partial_split_rejected(self, tmp_path):
        _write(tmp_path / "train.0", ["bad"])
        _write(tmp_path / "train.1", ["good"])
        _write(tmp_path / "dev.0", ["bad"])
        with pytest.raises(IngestionError) as excinfo:
            FilePerAttributeProcessor(str(tmp_path), 5).process()
        assert excinfo.value.path.endswith("dev.1")

    def test_missing_train_split(self, tmp_path):
        with pytest.raises(IngestionError):
            FilePerAttributeProcessor(str(tmp_path), 5).process()

    def test_missing_directory(self, tmp_path):
        with pytest.raises(IngestionError):
            FilePerAttributeProcessor(str(tmp_path / "absent"), 5)


class TestTsvLayout:
    def test_ratings_parsed_and_aspects_inferred(self, tmp_path):
        _write(tmp_path / "train.tsv", ["good beer\t1.0\t0.8", "flat and stale\t0.0\t0.25"])
        train = TsvProcessor(str(tmp_path), 10).process()[Split.TRAIN]
        assert train.num_attributes == 2
        assert train.items[1].attributes.values == (0.0, 0.25)
        assert train.items[0].tokens == ["good", "beer"]

    def test_short_row_reports_line(self, tmp_path):
        _write(tmp_path / "train.tsv", ["good\t1.0\t1.0", "bad\t0.0"])
        with pytest.raises(IngestionError) as excinfo:
            TsvProcessor(str(tmp_path), 10).process()
        assert excinfo.value.line == 2
        assert ":2:" in str(excinfo.value)

    def test_rating_outside_unit_interval(self, tmp_path):
        _write(tmp_path / "train.tsv", ["good\t1.5"])
        with pytest.raises(IngestionError) as excinfo:
            TsvProcessor(str(tmp_path), 10).process()
        assert excinfo.value.line == 1

    def test_non_numeric_rating(self, tmp_path):
        _write(tmp_path / "train.tsv", ["good\t1.0", "bad\tnone"])
        with pytest.raises(IngestionError) as excinfo:
            TsvProcessor(str(tmp_path), 10).process()
        assert excinfo.value.line == 2

    def test_references_alongside(self, tmp_path):
        _write(tmp_path / "train.tsv", ["good\t1.0", "bad\t0.0"])
        _write(tmp_path / "train.tsv.ref", ["bad", "good"])
        train = load_dataset(str(tmp_path), DatasetLayout.TSV, 10)[Split.TRAIN]
        assert [item.reference for item in train.items] == [["bad"], ["good"]]


class TestFactoryAndStats:
    def test_factory_lists_layouts(self):
        layouts = ProcessorFactory().get_supported_layouts()
        assert set(layouts) == {"file-per-attribute", "tsv"}

    def test_stats_per_split_and_attribute(self, toy_corpora, toy_vocab):
        frame = dataset_stats(toy_corpora, toy_vocab)
        assert list(frame.columns) == ["split", "attribute", "count", "max_length", "mean_length", "vocab"]
        train = frame[frame["split"] == "train"]
        assert list(train["attribute"]) == ["0", "1"]
        assert list(train["count"]) == [20, 20]
        assert (frame["vocab"] == toy_vocab.size).all()

    def test_corpus_rejects_wrong_aspect_count(self):
        with pytest.raises(ContractError):
            Corpus(Split.TRAIN, [Example(["a"], AttributeVector.of(1.0, 0.0))], 1, 5)
