"""
Synthetic templated sentiment corpora

Single-aspect corpora flip one sentiment adjective; the two-aspect variant
has independent food and service slots. Every sentence gets a reference in
which each adjective is replaced by its counterpart of the opposite polarity,
so references exist for every split.
"""

import logging
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .models.transfer_models import AttributeVector, Corpus, Example, Split

logger = logging.getLogger(__name__)

# index-aligned antonym pairs: NEGATIVE[i] <-> POSITIVE[i]
NEGATIVE = ["terrible", "bland", "rude", "awful", "horrible", "bad", "cold", "disappointing"]
POSITIVE = ["great", "delicious", "friendly", "amazing", "excellent", "good", "warm", "wonderful"]
NOUNS = ["food", "service", "staff", "pizza", "pasta", "waiter", "place", "coffee", "burger", "menu"]

SINGLE_TEMPLATES = [
    "the {noun} was {adj} .",
    "i thought the {noun} was really {adj} .",
    "our {noun} was {adj} tonight .",
    "this {noun} is so {adj} !",
    "honestly the {noun} here is {adj} .",
    "what a {adj} {noun} .",
]

FOOD_NEGATIVE = ["bland", "cold", "greasy", "stale"]
FOOD_POSITIVE = ["tasty", "fresh", "delicious", "hot"]
SERVICE_NEGATIVE = ["rude", "slow", "careless", "grumpy"]
SERVICE_POSITIVE = ["friendly", "quick", "attentive", "cheerful"]
PAIR_TEMPLATES = [
    "the food was {food} and the service was {service} .",
    "{food} food but {service} service .",
    "the food is {food} , the staff is {service} .",
    "we found the food {food} and the waiter {service} .",
]

TOY_MAX_LEN = 12


def _single(rng: np.random.Generator, label: int) -> Tuple[str, str]:
    template = SINGLE_TEMPLATES[rng.integers(len(SINGLE_TEMPLATES))]
    noun = NOUNS[rng.integers(len(NOUNS))]
    index = rng.integers(len(POSITIVE))
    adjectives = (NEGATIVE, POSITIVE)
    sentence = template.format(noun=noun, adj=adjectives[label][index])
    reference = template.format(noun=noun, adj=adjectives[1 - label][index])
    return sentence, reference


def _pair(rng: np.random.Generator, food_label: int, service_label: int) -> Tuple[str, str]:
    template = PAIR_TEMPLATES[rng.integers(len(PAIR_TEMPLATES))]
    f_index = rng.integers(len(FOOD_POSITIVE))
    s_index = rng.integers(len(SERVICE_POSITIVE))
    food = (FOOD_NEGATIVE, FOOD_POSITIVE)
    service = (SERVICE_NEGATIVE, SERVICE_POSITIVE)
    sentence = template.format(food=food[food_label][f_index], service=service[service_label][s_index])
    reference = template.format(food=food[1 - food_label][f_index], service=service[1 - service_label][s_index])
    return sentence, reference


def make_toy_split(split: Split, size: int, rng: np.random.Generator, aspects: int = 1) -> Corpus:
    """Balanced labels, templated sentences and flipped references"""
    items: List[Example] = []
    for i in range(size):
        if aspects == 1:
            label = i % 2
            sentence, reference = _single(rng, label)
            attributes = AttributeVector.of(float(label))
        else:
            food_label, service_label = i % 2, (i // 2) % 2
            sentence, reference = _pair(rng, food_label, service_label)
            attributes = AttributeVector.of(float(food_label), float(service_label))
        items.append(Example(sentence.split(), attributes, reference.split()))
    return Corpus(split, items, aspects, TOY_MAX_LEN)


def make_toy_corpus(n_train: int = 2000, n_dev: int = 200, n_test: int = 200, seed: int = 0,
                    aspects: int = 1) -> Dict[Split, Corpus]:
    if aspects not in (1, 2):
        raise ValueError(f"toy corpora have 1 or 2 aspects, got {aspects}")
    rng = np.random.default_rng(seed)
    return {
        Split.TRAIN: make_toy_split(Split.TRAIN, n_train, rng, aspects),
        Split.DEV: make_toy_split(Split.DEV, n_dev, rng, aspects),
        Split.TEST: make_toy_split(Split.TEST, n_test, rng, aspects),
    }


def _write_lines(path: Path, lines: Sequence[str]) -> None:
    path.write_text("".join(f"{line}\n" for line in lines), encoding="utf-8")


def write_toy_dataset(corpora: Dict[Split, Corpus], out_dir: str) -> Path:
    """
    Write single-aspect corpora in the file-per-attribute layout and
    two-aspect corpora in the TSV layout, references alongside.
    """
    root = Path(out_dir)
    root.mkdir(parents=True, exist_ok=True)
    for split, corpus in corpora.items():
        if corpus.num_attributes == 1:
            for value in (0, 1):
                items = [it for it in corpus.items if int(it.attributes.values[0]) == value]
                path = root / f"{split.value}.{value}"
                _write_lines(path, [it.text for it in items])
                _write_lines(root / f"{path.name}.ref", [" ".join(it.reference) for it in items])
        else:
            path = root / f"{split.value}.tsv"
            _write_lines(path, [
                "\t".join([it.text] + [f"{v:g}" for v in it.attributes.values]) for it in corpus.items
            ])
            _write_lines(root / f"{path.name}.ref", [" ".join(it.reference) for it in corpus.items])
        logger.info(f"Wrote {len(corpus)} {split.value} sentences to {root}")
    return root
