"""Automatic evaluation: text classifier, BLEU, n-gram perplexity, latent projection"""

from .bleu import bleu
from .eval_classifier import EvalClassifier, eval_accuracy, eval_per_aspect_accuracy, train_eval_classifier
from .evaluator import Evaluator
from .ngram_lm import NGramLM, perplexity, train_lm
from .projection import ProjectionResult, export_latents, export_raw_latents, project_latents

__all__ = [
    "bleu", "EvalClassifier", "eval_accuracy", "eval_per_aspect_accuracy", "train_eval_classifier",
    "Evaluator", "NGramLM", "perplexity", "train_lm",
    "ProjectionResult", "export_latents", "export_raw_latents", "project_latents",
]
