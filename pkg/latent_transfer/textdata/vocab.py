"""
Tokenization and vocabulary

Datasets ship pre-tokenized, so tokenization is lowercase whitespace
splitting. Ids 0..3 are reserved for PAD, BOS, EOS and UNK.
"""

import logging
from collections import Counter
from pathlib import Path
from typing import Iterable, List, Sequence, Union

from ..errors import ContractError, IngestionError, VocabIndexError
from ..models.transfer_models import Corpus

logger = logging.getLogger(__name__)

PAD, BOS, EOS, UNK = 0, 1, 2, 3
RESERVED = ("<pad>", "<bos>", "<eos>", "<unk>")


def tokenize(text: str) -> List[str]:
    return text.lower().split()


class Vocab:
    """Bijection between tokens and ids, reserved tokens first"""

    def __init__(self, tokens: Sequence[str]):
        if tuple(tokens[:4]) != RESERVED:
            raise ContractError("Vocab must start with the reserved tokens")
        if len(set(tokens)) != len(tokens):
            raise ContractError("Vocab tokens must be unique")
        self.id_to_token: List[str] = list(tokens)
        self.token_to_id = {tok: i for i, tok in enumerate(self.id_to_token)}

    @property
    def size(self) -> int:
        return len(self.id_to_token)

    def __len__(self) -> int:
        return self.size

    def __contains__(self, token: str) -> bool:
        return token in self.token_to_id

    def encode(self, tokens: Sequence[str], max_len: int) -> List[int]:
        """Map tokens to ids (OOV to UNK), append EOS, truncate to max_len"""
        ids = [self.token_to_id.get(tok, UNK) for tok in tokens]
        ids.append(EOS)
        return ids[:max_len]

    def decode(self, ids: Iterable[int]) -> List[str]:
        """Stop at the first EOS and drop reserved tokens"""
        tokens = []
        for i in ids:
            i = int(i)
            if i < 0 or i >= self.size:
                raise VocabIndexError(f"Token id {i} outside vocabulary of size {self.size}")
            if i == EOS:
                break
            if i >= len(RESERVED):
                tokens.append(self.id_to_token[i])
        return tokens

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text("\n".join(self.id_to_token) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Vocab":
        path = Path(path)
        if not path.exists():
            raise IngestionError("vocabulary file not found", str(path))
        lines = path.read_text(encoding="utf-8").splitlines()
        return cls([line for line in lines if line])


def build_vocab(corpus: Union[Corpus, Iterable[Sequence[str]]], min_count: int = 1,
                max_size: int = 10000) -> Vocab:
    """
    Build a vocabulary from training sentences

    Tokens are ordered by descending frequency, ties broken lexicographically,
    filtered by min_count and truncated so the total size (reserved tokens
    included) is at most max_size.

    Raises:
        IngestionError: the corpus has no tokens
    """
    sentences = corpus.sentences if isinstance(corpus, Corpus) else corpus
    counts = Counter(tok for sentence in sentences for tok in sentence)
    if not counts:
        raise IngestionError("cannot build a vocabulary from an empty corpus")
    if max_size <= len(RESERVED):
        raise ContractError(f"max_size must exceed {len(RESERVED)}")

    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    kept = [tok for tok, count in ranked if count >= min_count and tok not in RESERVED]
    kept = kept[: max_size - len(RESERVED)]
    logger.info(f"Built vocabulary: {len(kept)} of {len(counts)} token types kept (min_count={min_count})")
    return Vocab(list(RESERVED) + kept)
