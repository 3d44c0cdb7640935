"""Tests for corpus BLEU"""

import math
from pathlib import Path

import pytest

from latent_transfer.errors import ContractError
from latent_transfer.evalsuite.bleu import bleu, closest_length, ngrams

FIXTURES = Path(__file__).parent / "fixtures"


def load_pairs(name: str):
    candidates, references = [], []
    for line in (FIXTURES / name).read_text(encoding="utf-8").splitlines():
        candidate, reference = line.split("\t")
        candidates.append(candidate.split())
        references.append(reference.split())
    return candidates, references


def test_golden_corpus():
    # half the candidates copy their reference, half replace the final token
    candidates, references = load_pairs("bleu_pairs.tsv")
    assert len(candidates) == 20
    assert bleu(candidates, references) == pytest.approx(83.76, abs=0.01)


def test_identical_corpus_scores_100():
    sentences = [s.split() for s in ["the food was great .", "service was slow but friendly ."]]
    assert bleu(sentences, sentences) == pytest.approx(100.0)


def test_missing_four_gram_scores_zero():
    assert bleu([["a", "b", "c"]], [["a", "b", "c"]]) == 0.0


def test_empty_candidates_score_zero():
    assert bleu([[]], [["a", "b", "c", "d"]]) == 0.0


def test_brevity_penalty():
    reference = "w1 w2 w3 w4 w5 w6 w7 w8".split()
    candidate = reference[:4]
    # all n-gram precisions are 1, so only the penalty exp(1 - 8/4) remains
    assert bleu([candidate], [reference]) == pytest.approx(100.0 * math.exp(-1.0))


def test_counts_are_clipped():
    candidate = ["the"] * 7
    reference = "the cat is on the mat".split()
    unigram_only = bleu([candidate], [reference], max_n=1)
    assert unigram_only == pytest.approx(100.0 * 2 / 7)


def test_multiple_references_per_candidate():
    candidate = "the cat sat on the mat".split()
    refs = [["a", "dog", "ran", "off", "the", "road"], candidate]
    assert bleu([candidate], [refs]) == pytest.approx(100.0)


def test_closest_length_prefers_shorter_on_tie():
    assert closest_length(5, [4, 6]) == 4
    assert closest_length(5, [7, 3, 5]) == 5


def test_ngrams():
    assert ngrams(["a", "b", "a", "b"], 2)[("a", "b")] == 2
    assert sum(ngrams(["a"], 2).values()) == 0


def test_count_mismatch():
    with pytest.raises(ContractError):
        bleu([["a"]], [])
