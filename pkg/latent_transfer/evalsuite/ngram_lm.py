"""
Interpolated Kneser-Ney trigram language model

Sentences are padded as `<s> <s> w_1 ... w_n </s>`. The highest order uses
raw counts, lower orders use continuation counts, and the unigram level is
interpolated with the uniform distribution over the vocabulary (training
words plus `</s>` and `<unk>`), so every conditional distribution sums to one
over the vocabulary.
"""

import logging
import math
from collections import Counter
from typing import Iterable, Sequence, Set, Tuple

from ..errors import ContractError

logger = logging.getLogger(__name__)

BOS_TOKEN = "<s>"
EOS_TOKEN = "</s>"
UNK_TOKEN = "<unk>"


class NGramLM:
    """Trigram model with absolute discount D at every order"""

    def __init__(self, vocabulary: Set[str], discount: float = 0.75, uniform_only: bool = False):
        self.vocabulary = set(vocabulary) | {EOS_TOKEN, UNK_TOKEN}
        self.discount = discount
        self.uniform_only = uniform_only
        self.trigrams: Counter = Counter()
        self.context_counts: Counter = Counter()          # c(u v *)
        self.context_types: Counter = Counter()           # N1+(u v *)
        self.bigram_continuation: Counter = Counter()     # N1+(* v w)
        self.middle_totals: Counter = Counter()           # N1+(* v *)
        self.middle_types: Counter = Counter()            # N1+(v *) over continuation bigrams
        self.unigram_continuation: Counter = Counter()    # N1+(* w)
        self.unigram_total = 0

    @property
    def vocab_size(self) -> int:
        return len(self.vocabulary)

    @classmethod
    def uniform(cls, vocab_size: int) -> "NGramLM":
        """Model assigning 1 / vocab_size to every word, including the two special tokens"""
        if vocab_size < 2:
            raise ContractError("a uniform model needs at least the </s> and <unk> entries")
        words = {f"w{i}" for i in range(vocab_size - 2)}
        return cls(words, uniform_only=True)

    def fit(self, sentences: Iterable[Sequence[str]]) -> "NGramLM":
        seen_trigrams = set()
        for tokens in sentences:
            padded = [BOS_TOKEN, BOS_TOKEN] + list(tokens) + [EOS_TOKEN]
            for u, v, w in zip(padded, padded[1:], padded[2:]):
                self.trigrams[(u, v, w)] += 1
                self.context_counts[(u, v)] += 1
                seen_trigrams.add((u, v, w))

        for u, v, w in seen_trigrams:
            self.context_types[(u, v)] += 1
            self.bigram_continuation[(v, w)] += 1
            self.middle_totals[v] += 1

        # continuation bigrams feed the unigram level
        for v, w in self.bigram_continuation:
            self.middle_types[v] += 1
            self.unigram_continuation[w] += 1
        self.unigram_total = sum(self.unigram_continuation.values())
        if self.unigram_total == 0:
            raise ContractError("cannot train a language model on an empty corpus")
        logger.info(f"Trained trigram LM: {len(self.trigrams)} trigram types, vocabulary {self.vocab_size}")
        return self

    def _map(self, word: str) -> str:
        return word if word in self.vocabulary or word == BOS_TOKEN else UNK_TOKEN

    def unigram_prob(self, word: str) -> float:
        uniform = 1.0 / self.vocab_size
        if self.uniform_only:
            return uniform
        d = self.discount
        count = self.unigram_continuation.get(word, 0)
        kept_types = len(self.unigram_continuation)
        return max(count - d, 0.0) / self.unigram_total + d * kept_types / self.unigram_total * uniform

    def bigram_prob(self, word: str, v: str) -> float:
        lower = self.unigram_prob(word)
        total = self.middle_totals.get(v, 0)
        if self.uniform_only or total == 0:
            return lower
        d = self.discount
        count = self.bigram_continuation.get((v, word), 0)
        return max(count - d, 0.0) / total + d * self.middle_types[v] / total * lower

    def prob(self, word: str, context: Tuple[str, str]) -> float:
        """P(word | u v) with context = (u, v)"""
        u, v = (self._map(c) for c in context)
        word = self._map(word)
        lower = self.bigram_prob(word, v)
        total = self.context_counts.get((u, v), 0)
        if self.uniform_only or total == 0:
            return lower
        d = self.discount
        count = self.trigrams.get((u, v, word), 0)
        return max(count - d, 0.0) / total + d * self.context_types[(u, v)] / total * lower

    def log_prob(self, word: str, context: Tuple[str, str]) -> float:
        return math.log(self.prob(word, context))

    def sentence_log_prob(self, tokens: Sequence[str]) -> Tuple[float, int]:
        """Natural-log probability of a sentence including </s>, and its token count"""
        padded = [BOS_TOKEN, BOS_TOKEN] + list(tokens) + [EOS_TOKEN]
        total = sum(self.log_prob(w, (u, v)) for u, v, w in zip(padded, padded[1:], padded[2:]))
        return total, len(tokens) + 1


def train_lm(sentences: Iterable[Sequence[str]], discount: float = 0.75) -> NGramLM:
    sentences = [list(s) for s in sentences]
    vocabulary = {tok for s in sentences for tok in s}
    return NGramLM(vocabulary, discount).fit(sentences)


def perplexity(sentences: Sequence[Sequence[str]], lm: NGramLM) -> float:
    """
    exp of the mean negative log-likelihood per token, </s> included

    Raises:
        ContractError: no sentences to score
    """
    if len(sentences) == 0:
        raise ContractError("cannot compute perplexity of an empty evaluation set")
    log_sum, count = 0.0, 0
    for tokens in sentences:
        value, n = lm.sentence_log_prob(tokens)
        log_sum += value
        count += n
    return math.exp(-log_sum / count)
