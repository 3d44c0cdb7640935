"""Corpus-level BLEU with clipped counts and no smoothing"""

import math
from collections import Counter
from typing import List, Sequence, Union

from ..errors import ContractError

Tokens = Sequence[str]


def ngrams(tokens: Tokens, n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def _as_reference_sets(references: Sequence[Union[Tokens, Sequence[Tokens]]]) -> List[List[Tokens]]:
    sets = []
    for ref in references:
        if len(ref) and isinstance(ref[0], str):
            sets.append([ref])
        elif len(ref) == 0:
            sets.append([[]])
        else:
            sets.append(list(ref))
    return sets


def closest_length(candidate_length: int, lengths: Sequence[int]) -> int:
    """Reference length nearest the candidate; ties go to the shorter one"""
    return min(lengths, key=lambda r: (abs(r - candidate_length), r))


def bleu(candidates: Sequence[Tokens], references: Sequence[Union[Tokens, Sequence[Tokens]]],
         max_n: int = 4) -> float:
    """
    Corpus BLEU in [0, 100]

    Args:
        candidates: Tokenized system outputs
        references: One reference per candidate, or a list of references per candidate
        max_n: Highest n-gram order

    Raises:
        ContractError: candidate and reference counts differ
    """
    if len(candidates) != len(references):
        raise ContractError(f"{len(candidates)} candidates but {len(references)} references")
    reference_sets = _as_reference_sets(references)

    clipped = [0] * max_n
    totals = [0] * max_n
    cand_length, ref_length = 0, 0
    for cand, refs in zip(candidates, reference_sets):
        cand_length += len(cand)
        ref_length += closest_length(len(cand), [len(r) for r in refs])
        for n in range(1, max_n + 1):
            cand_counts = ngrams(cand, n)
            max_ref = Counter()
            for ref in refs:
                for gram, count in ngrams(ref, n).items():
                    max_ref[gram] = max(max_ref[gram], count)
            clipped[n - 1] += sum(min(count, max_ref[gram]) for gram, count in cand_counts.items())
            totals[n - 1] += max(len(cand) - n + 1, 0)

    if cand_length == 0 or any(c == 0 for c in clipped) or any(t == 0 for t in totals):
        return 0.0
    log_precision = sum(math.log(c / t) for c, t in zip(clipped, totals)) / max_n
    brevity = 1.0 if cand_length > ref_length else math.exp(1.0 - ref_length / cand_length)
    return min(100.0, 100.0 * brevity * math.exp(log_precision))
