"""
Automatic evaluation of transfer outputs: accuracy, BLEU, perplexity
"""

import logging
from typing import List, Optional, Sequence

import numpy as np

from ..classifier.latent_classifier import per_aspect_accuracy
from ..errors import ContractError
from ..models.transfer_models import Corpus, EvalConfig, EvalReport, EvalRow
from .bleu import bleu
from .eval_classifier import EvalClassifier, train_eval_classifier
from .ngram_lm import NGramLM, perplexity, train_lm

logger = logging.getLogger(__name__)


def _label(values: Sequence[float]) -> str:
    return ",".join(f"{v:g}" for v in values)


def evaluate_outputs(outputs: Sequence[Sequence[str]], targets: np.ndarray,
                     references: Optional[Sequence[Sequence[str]]], eval_clf: EvalClassifier, lm: NGramLM,
                     sources: Optional[Sequence[Sequence[str]]] = None) -> EvalReport:
    """
    Score transfer outputs

    Args:
        outputs: Transferred sentences
        targets: Target attribute rows [N x A]
        references: Human references, one per output; BLEU falls back to sources without them
        sources: Source sentences, reported per row

    Raises:
        ContractError: empty or misaligned inputs, or neither references nor sources
    """
    if len(outputs) == 0:
        raise ContractError("nothing to evaluate")
    targets = np.atleast_2d(np.asarray(targets, dtype=np.float64))
    if len(targets) != len(outputs) or (sources is not None and len(sources) != len(outputs)):
        raise ContractError("sources, outputs and targets must align")
    bleu_refs = references if references is not None else sources
    if bleu_refs is None:
        raise ContractError("BLEU needs references or source sentences")

    predictions = eval_clf.predict(outputs)
    hits = np.all((predictions > 0.5) == (targets > 0.5), axis=1)
    source_text = [" ".join(s) for s in sources] if sources is not None else [""] * len(outputs)
    rows: List[EvalRow] = [
        EvalRow(
            source=src,
            output=" ".join(out),
            target=_label(tgt),
            predicted=_label(np.round(pred, 4)),
            correct=bool(hit),
            ppl=perplexity([out], lm),
        )
        for src, out, tgt, pred, hit in zip(source_text, outputs, targets, predictions, hits)
    ]
    return EvalReport(
        acc=float(np.mean(hits)),
        bleu=bleu(outputs, bleu_refs),
        ppl=perplexity(outputs, lm),
        per_aspect_acc=[float(a) for a in per_aspect_accuracy(predictions, targets)],
        rows=rows,
    )


class Evaluator:
    """Bundles the evaluation classifier and language model of one dataset"""

    def __init__(self, classifier: EvalClassifier, lm: NGramLM):
        self.classifier = classifier
        self.lm = lm
        self.logger = logging.getLogger(self.__class__.__name__)

    @classmethod
    def from_corpus(cls, train: Corpus, config: EvalConfig, seed: int = 0) -> "Evaluator":
        classifier = train_eval_classifier(train, config, seed)
        lm = train_lm(train.sentences, config.lm_discount)
        return cls(classifier, lm)

    def evaluate(self, sources: Sequence[Sequence[str]], outputs: Sequence[Sequence[str]],
                 targets: np.ndarray, references: Optional[Sequence[Sequence[str]]] = None) -> EvalReport:
        report = evaluate_outputs(outputs, targets, references, self.classifier, self.lm, sources)
        self.logger.info(f"Evaluated {len(outputs)} outputs: acc={report.acc:.4f} "
                         f"bleu={report.bleu:.2f} ppl={report.ppl:.2f}")
        return report
