"""
End-to-end transfer: encode, edit the latent, decode

Encoding and decoding are batched; latent edits are independent and may run
on a thread pool against the shared read-only models.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from ..autoencoder.model import TransformerAutoencoder, encode_corpus
from ..classifier.latent_classifier import LatentScorer
from ..errors import IncompatibleCheckpointError
from ..evalsuite.evaluator import Evaluator
from ..models.transfer_models import (
    AttributeVector,
    Corpus,
    FGIMConfig,
    LossForm,
    SweepRow,
    TargetRule,
    TransferResult,
)
from ..textdata.vocab import Vocab
from .editor import fgim_edit

logger = logging.getLogger(__name__)

Targets = Union[AttributeVector, Sequence[AttributeVector]]


def _check_compatible(model: TransformerAutoencoder, scorer: LatentScorer) -> None:
    if model.latent_dim != scorer.latent_dim:
        raise IncompatibleCheckpointError(
            f"autoencoder latent_dim {model.latent_dim} differs from classifier latent_dim {scorer.latent_dim}"
        )


def transfer_many(sentences: Sequence[Sequence[str]], targets: Targets, model: TransformerAutoencoder,
                  scorer: LatentScorer, vocab: Vocab, config: FGIMConfig,
                  form: LossForm = LossForm.BINARY, workers: int = 1,
                  batch_size: int = 128) -> List[TransferResult]:
    """
    Transfer a list of tokenized sentences

    Args:
        targets: One target for all sentences, or one per sentence
        workers: Threads used for the latent edits
    """
    _check_compatible(model, scorer)
    if isinstance(targets, AttributeVector):
        targets = [targets] * len(sentences)
    if len(targets) != len(sentences):
        raise ValueError(f"{len(sentences)} sentences but {len(targets)} targets")
    if not sentences:
        return []

    max_len = model.hp.max_len
    latents = encode_corpus(model, [list(s)[:max_len] for s in sentences], vocab, max_len, batch_size)
    jobs = [(z, t.as_array()) for z, t in zip(latents, targets)]

    def edit(job: Tuple[np.ndarray, np.ndarray]):
        return fgim_edit(job[0], job[1], config, scorer, form)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(edit, jobs))
    else:
        outcomes = [edit(job) for job in jobs]

    edited = np.stack([o.edited for o in outcomes])
    decoded: List[List[int]] = []
    for start in range(0, len(edited), batch_size):
        decoded.extend(model.greedy_decode(edited[start:start + batch_size]))

    results = [
        TransferResult(
            source=list(src), target=tgt, success=o.success, z=o.z, edited=o.edited,
            output=vocab.decode(ids), trace=o.trace,
        )
        for src, tgt, o, ids in zip(sentences, targets, outcomes, decoded)
    ]
    successes = sum(r.success for r in results)
    logger.info(f"Transferred {len(results)} sentences: {successes} edits reached the target")
    return results


def transfer(sentence: Sequence[str], target: AttributeVector, model: TransformerAutoencoder,
             scorer: LatentScorer, vocab: Vocab, config: FGIMConfig,
             form: LossForm = LossForm.BINARY) -> TransferResult:
    """encode -> fgim_edit -> greedy_decode for one sentence"""
    return transfer_many([sentence], target, model, scorer, vocab, config, form)[0]


def sweep_targets(corpus: Corpus, rule: TargetRule, fixed: Optional[AttributeVector] = None) -> List[AttributeVector]:
    if rule is TargetRule.FIXED:
        if fixed is None:
            raise ValueError("a fixed target rule needs a target vector")
        return [fixed] * len(corpus)
    return [item.attributes.flipped() for item in corpus.items]


def sweep_degrees(corpus: Corpus, rule: TargetRule, model: TransformerAutoencoder, scorer: LatentScorer,
                  vocab: Vocab, base: FGIMConfig, evaluator: Evaluator,
                  fixed: Optional[AttributeVector] = None, form: LossForm = LossForm.BINARY,
                  workers: int = 1) -> List[SweepRow]:
    """
    Run transfer with each singleton weight set {w} of the base configuration

    BLEU is computed against the corpus references when every item has one,
    otherwise against the source sentences.
    """
    targets = sweep_targets(corpus, rule, fixed)
    target_matrix = np.stack([t.as_array() for t in targets])
    use_refs = corpus.has_references
    references = [item.reference for item in corpus.items] if use_refs else corpus.sentences

    rows: List[SweepRow] = []
    for weight in base.weights:
        results = transfer_many(corpus.sentences, targets, model, scorer, vocab,
                                base.with_weights([weight]), form, workers)
        outputs = [r.output for r in results]
        report = evaluator.evaluate(corpus.sentences, outputs, target_matrix, references)
        row = SweepRow(
            weight=float(weight),
            acc=report.acc,
            bleu=report.bleu,
            ppl=report.ppl,
            mean_edit_norm=float(np.mean([r.edit_norm for r in results])),
            success_rate=float(np.mean([r.success for r in results])),
            bleu_reference="references" if use_refs else "sources",
        )
        logger.info(f"Sweep w={weight:g}: acc={row.acc:.4f} bleu={row.bleu:.2f} ppl={row.ppl:.2f} "
                    f"edit={row.mean_edit_norm:.4f} success={row.success_rate:.3f}")
        rows.append(row)
    return rows


def degree_examples(sentence: Sequence[str], target: AttributeVector, model: TransformerAutoencoder,
                    scorer: LatentScorer, vocab: Vocab, base: FGIMConfig,
                    form: LossForm = LossForm.BINARY) -> List[TransferResult]:
    """One transfer of the same sentence per singleton weight, in weight order"""
    return [
        transfer(sentence, target, model, scorer, vocab, base.with_weights([w]), form)
        for w in base.weights
    ]
