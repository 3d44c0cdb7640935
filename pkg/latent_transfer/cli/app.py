"""
Command-line entry point

    latent-transfer [--config FILE] [--output-dir DIR] [--log-level LEVEL] <subcommand> ...

Subcommands: make-toy, stats, train-ae, train-clf, transfer, sweep, eval,
export-latents. Every error class maps to its own exit status (EXIT_CODES).
"""

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional, Sequence, TextIO

import numpy as np
from dotenv import load_dotenv
from tabulate import tabulate

from .. import __version__
from ..autoencoder.model import encode_corpus
from ..autoencoder.trainer import reconstruction_accuracy, train_autoencoder
from ..classifier.latent_classifier import LatentClassifier, attribute_accuracy
from ..classifier.trainer import train_classifier
from ..errors import (
    CheckpointError,
    ConfigError,
    IncompatibleCheckpointError,
    IngestionError,
    LatentTransferError,
    TargetVectorError,
    TrainingError,
)
from ..evalsuite.evaluator import Evaluator
from ..evalsuite.projection import export_latents, export_raw_latents, project_latents
from ..fgim.editor import fgim_edit
from ..fgim.pipeline import sweep_degrees, sweep_targets, transfer_many
from ..models.transfer_models import AttributeVector, Corpus, RunConfig, Split, TargetRule
from ..numerics.tensor import set_precision
from ..reports.artifacts import write_history_csv, write_trace_jsonl
from ..reports.report_generators import ReportFactory
from ..textdata.factory import load_from_config
from ..textdata.stats import dataset_stats
from ..textdata.vocab import build_vocab, tokenize
from ..toydata import make_toy_corpus, write_toy_dataset
from .checkpoint import save_checkpoint
from .config import apply_environment, parse_config
from .runs import load_autoencoder, load_models, save_autoencoder, save_classifier

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_FILE = "latent_transfer.log"

# most specific class first
EXIT_CODES = [
    (ConfigError, 3),
    (IncompatibleCheckpointError, 5),
    (CheckpointError, 4),
    (TargetVectorError, 6),
    (IngestionError, 7),
    (TrainingError, 8),
    (LatentTransferError, 9),
]
EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_USAGE = 2

# component seeds derive from the run seed
AE_SEED_OFFSET = 0
CLF_SEED_OFFSET = 1
EVAL_SEED_OFFSET = 2


def exit_code_for(error: BaseException) -> int:
    for error_class, code in EXIT_CODES:
        if isinstance(error, error_class):
            return code
    return EXIT_UNEXPECTED


def configure_logging(level: Optional[str] = None, log_dir: Optional[Path] = None) -> None:
    level = (level or os.getenv("LOG_LEVEL") or "INFO").upper()
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_dir is not None:
        log_dir.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_dir / LOG_FILE, encoding="utf-8"))
    logging.basicConfig(level=getattr(logging, level, logging.INFO), format=LOG_FORMAT,
                        handlers=handlers, force=True)


def load_run_config(args: argparse.Namespace) -> RunConfig:
    config = parse_config(args.config) if getattr(args, "config", None) else RunConfig()
    if getattr(args, "output_dir", None):
        config.output_dir = args.output_dir
    config = apply_environment(config)
    config.validate()
    return config


def _read_sentences(path: Optional[str], stdin: TextIO) -> List[List[str]]:
    if path is None:
        lines = stdin.read().splitlines()
    else:
        source = Path(path)
        if not source.exists():
            raise IngestionError("file not found", str(source))
        lines = source.read_text(encoding="utf-8").splitlines()
    # blank lines stay as empty sentences so files remain line-aligned
    blank = sum(1 for line in lines if not line.strip())
    if blank:
        logger.warning(f"{path or '<stdin>'}: {blank} blank line(s) read as empty sentences")
    return [tokenize(line) for line in lines]


def _write_sentences(sentences: Sequence[Sequence[str]], path: Optional[str], stdout: TextIO) -> None:
    text = "".join(" ".join(tokens) + "\n" for tokens in sentences)
    if path is None:
        stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _parse_target(text: Optional[str], num_attributes: int) -> Optional[AttributeVector]:
    if text is None:
        return None
    target = AttributeVector.parse(text)
    if target.dimension != num_attributes:
        raise TargetVectorError(
            f"target '{text}' has {target.dimension} aspects, the classifier predicts {num_attributes}"
        )
    return target


def _sample(corpus: Corpus, size: int, seed: int) -> Corpus:
    if len(corpus) <= size:
        return corpus
    indices = np.sort(np.random.default_rng(seed).choice(len(corpus), size=size, replace=False))
    return corpus.subset([int(i) for i in indices])


def _evaluation_split(corpora) -> Corpus:
    for split in (Split.TEST, Split.DEV, Split.TRAIN):
        if split in corpora:
            return corpora[split]
    raise IngestionError("dataset has no split to evaluate on")


def cmd_make_toy(args: argparse.Namespace, config: RunConfig) -> int:
    corpora = make_toy_corpus(args.n_train, args.n_dev, args.n_test, seed=config.seed, aspects=args.aspects)
    root = write_toy_dataset(corpora, args.out)
    logger.info(f"Toy dataset with {args.aspects} aspect(s) written to {root}")
    return EXIT_OK


def cmd_stats(args: argparse.Namespace, config: RunConfig) -> int:
    corpora = load_from_config(config.data, config.ae.max_len)
    vocab = build_vocab(corpora[Split.TRAIN], config.data.min_count, config.data.max_vocab)
    frame = dataset_stats(corpora, vocab)
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    frame.to_csv(out_dir / "stats.csv", index=False, encoding="utf-8")
    args.stdout.write(tabulate(frame, headers="keys", tablefmt="github", showindex=False) + "\n")
    return EXIT_OK


def cmd_train_ae(args: argparse.Namespace, config: RunConfig) -> int:
    corpora = load_from_config(config.data, config.ae.max_len)
    train = corpora[Split.TRAIN]
    dev = corpora.get(Split.DEV)
    vocab = build_vocab(train, config.data.min_count, config.data.max_vocab)
    logger.info(f"Vocabulary of {vocab.size} tokens from {len(train)} training sentences")

    model, history = train_autoencoder(train, dev, vocab, config.ae, config.seed + AE_SEED_OFFSET)
    run_dir = Path(config.output_dir)
    save_autoencoder(model, vocab, run_dir)
    write_history_csv(history, run_dir / "ae_history.csv")
    if dev is not None and len(dev):
        token_acc, exact = reconstruction_accuracy(model, dev, vocab, config.ae.batch_size)
        logger.info(f"Dev reconstruction: token accuracy {token_acc:.4f}, exact match {exact:.4f}")
    return EXIT_OK


def cmd_train_clf(args: argparse.Namespace, config: RunConfig) -> int:
    run_dir = Path(config.output_dir)
    model, vocab = load_autoencoder(run_dir)
    corpora = load_from_config(config.data, config.ae.max_len)
    train = corpora[Split.TRAIN]
    dev = corpora.get(Split.DEV)
    batch = config.ae.batch_size

    train_latents = encode_corpus(model, train.sentences, vocab, model.hp.max_len, batch)
    dev_latents = dev_labels = None
    if dev is not None and len(dev):
        dev_latents = encode_corpus(model, dev.sentences, vocab, model.hp.max_len, batch)
        dev_labels = dev.attribute_matrix()

    clf = config.classifier
    scorer = LatentClassifier(model.latent_dim, train.num_attributes, clf.hidden1, clf.hidden2,
                              seed=config.seed + CLF_SEED_OFFSET)
    history = train_classifier(scorer, train_latents, train.attribute_matrix(), dev_latents, dev_labels,
                               clf, seed=config.seed + CLF_SEED_OFFSET)
    save_classifier(scorer, clf, run_dir)
    write_history_csv(history, run_dir / "clf_history.csv")
    if dev_latents is not None:
        accuracy = attribute_accuracy(scorer.predict(dev_latents), dev_labels)
        logger.info(f"Latent classifier dev accuracy {accuracy:.4f}")
    return EXIT_OK


def cmd_transfer(args: argparse.Namespace, config: RunConfig) -> int:
    model, scorer, vocab, form = load_models(config.output_dir)
    target = _parse_target(args.target, scorer.num_attributes)
    sentences = [tokens[:model.hp.max_len] for tokens in _read_sentences(args.input, args.stdin)]
    workers = args.workers or config.eval.workers

    results = transfer_many(sentences, target, model, scorer, vocab, config.fgim, form, workers,
                            config.ae.batch_size)
    _write_sentences([r.output for r in results], args.output, args.stdout)
    if args.trace:
        count = write_trace_jsonl(results, args.trace)
        logger.info(f"Wrote {count} trace records to {args.trace}")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace, config: RunConfig) -> int:
    run_dir = Path(config.output_dir)
    model, scorer, vocab, form = load_models(run_dir)
    rule = TargetRule(args.rule)
    fixed = _parse_target(args.target, scorer.num_attributes)
    if rule is TargetRule.FIXED and fixed is None:
        raise TargetVectorError("--rule fixed needs --target")

    corpora = load_from_config(config.data, config.ae.max_len)
    sample = _sample(_evaluation_split(corpora), config.eval.sample_size, config.seed)
    evaluator = Evaluator.from_corpus(corpora[Split.TRAIN], config.eval, config.seed + EVAL_SEED_OFFSET)
    rows = sweep_degrees(sample, rule, model, scorer, vocab, config.fgim, evaluator, fixed, form,
                         args.workers or config.eval.workers)

    factory = ReportFactory()
    formats = ["csv", "text"] + (["excel"] if args.excel else [])
    for name in formats:
        generator = factory.create_generator(name, str(run_dir))
        path = generator.generate_sweep_report(rows, generator.default_filename("sweep"))
        logger.info(f"Sweep {generator.format_name} report: {path}")
    return EXIT_OK


def cmd_eval(args: argparse.Namespace, config: RunConfig) -> int:
    run_dir = Path(config.output_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    corpora = load_from_config(config.data, config.ae.max_len)
    train = corpora[Split.TRAIN]
    target = _parse_target(args.target, train.num_attributes)

    sources = _read_sentences(args.sources, args.stdin)
    outputs = _read_sentences(args.outputs, args.stdin)
    references = _read_sentences(args.references, args.stdin) if args.references else None
    if len(sources) != len(outputs) or (references is not None and len(references) != len(outputs)):
        raise IngestionError("sources, outputs and references must have the same number of lines")

    evaluator = Evaluator.from_corpus(train, config.eval, config.seed + EVAL_SEED_OFFSET)
    save_checkpoint(evaluator.classifier.state_dict(), run_dir / "eval_clf.ckpt")

    targets = np.tile(target.as_array(), (len(outputs), 1))
    report = evaluator.evaluate(sources, outputs, targets, references)
    factory = ReportFactory()
    for name in ("csv", "text"):
        generator = factory.create_generator(name, str(run_dir))
        generator.generate_eval_report(report, generator.default_filename("eval"))
    args.stdout.write(f"acc={report.acc:.4f} bleu={report.bleu:.2f} ppl={report.ppl:.2f}\n")
    return EXIT_OK


def cmd_export_latents(args: argparse.Namespace, config: RunConfig) -> int:
    run_dir = Path(config.output_dir)
    model, scorer, vocab, form = load_models(run_dir)
    corpora = load_from_config(config.data, config.ae.max_len)
    sample = _sample(_evaluation_split(corpora), config.eval.sample_size, config.seed)

    latents = encode_corpus(model, sample.sentences, vocab, model.hp.max_len, config.ae.batch_size)
    targets = sweep_targets(sample, TargetRule.FLIP)
    rows = [latents]
    labels = [str(item.attributes) for item in sample.items]
    weights = [0.0] * len(sample)
    for weight in config.fgim.weights:
        single = config.fgim.with_weights([weight])
        edited = [fgim_edit(z, t.as_array(), single, scorer, form).edited for z, t in zip(latents, targets)]
        rows.append(np.stack(edited))
        labels.extend(str(t) for t in targets)
        weights.extend([float(weight)] * len(sample))

    stacked = np.concatenate(rows, axis=0)
    result = project_latents(stacked)
    export_latents(result, labels, weights, run_dir / "latents.csv")
    export_raw_latents(stacked, labels, weights, run_dir / "latents_raw.txt")
    logger.info(f"Exported {len(stacked)} latents; explained variance ratio "
                f"{', '.join(f'{r:.3f}' for r in result.explained_ratio)}")
    return EXIT_OK


COMMANDS = {
    "make-toy": cmd_make_toy,
    "stats": cmd_stats,
    "train-ae": cmd_train_ae,
    "train-clf": cmd_train_clf,
    "transfer": cmd_transfer,
    "sweep": cmd_sweep,
    "eval": cmd_eval,
    "export-latents": cmd_export_latents,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="latent-transfer",
                                     description="Controllable text attribute transfer in latent space")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="Run configuration file")
    parser.add_argument("--output-dir", help="Run directory (overrides output_dir)")
    parser.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR (default: $LOG_LEVEL or INFO)")
    sub = parser.add_subparsers(dest="command", required=True)

    toy = sub.add_parser("make-toy", help="Write the synthetic templated corpus")
    toy.add_argument("--out", required=True, help="Dataset directory")
    toy.add_argument("--aspects", type=int, choices=(1, 2), default=1)
    toy.add_argument("--n-train", type=int, default=2000)
    toy.add_argument("--n-dev", type=int, default=200)
    toy.add_argument("--n-test", type=int, default=200)

    sub.add_parser("stats", help="Dataset statistics per split and attribute")
    sub.add_parser("train-ae", help="Train the autoencoder")
    sub.add_parser("train-clf", help="Train the latent attribute classifier")

    tr = sub.add_parser("transfer", help="Transfer sentences to a target attribute vector")
    tr.add_argument("--target", required=True, help="Comma-separated values in [0, 1], e.g. 1.0 or 1,0")
    tr.add_argument("--input", help="One sentence per line (default: stdin)")
    tr.add_argument("--output", help="Transferred sentences (default: stdout)")
    tr.add_argument("--trace", help="Per-sentence FGIM trace as JSON-lines")
    tr.add_argument("--workers", type=int, default=0)

    sw = sub.add_parser("sweep", help="Transfer-strength sweep over singleton weight sets")
    sw.add_argument("--rule", choices=[r.value for r in TargetRule], default=TargetRule.FLIP.value)
    sw.add_argument("--target", help="Target vector for --rule fixed")
    sw.add_argument("--excel", action="store_true", help="Also write an Excel workbook")
    sw.add_argument("--workers", type=int, default=0)

    ev = sub.add_parser("eval", help="Accuracy, BLEU and perplexity of transfer outputs")
    ev.add_argument("--sources", required=True)
    ev.add_argument("--outputs", required=True)
    ev.add_argument("--references")
    ev.add_argument("--target", required=True, help="Target vector the outputs were transferred to")

    sub.add_parser("export-latents", help="2-D projection of source and edited latents")
    return parser


def run_subcommand(name: str, args: argparse.Namespace) -> int:
    """Run one subcommand and map any error to its exit status"""
    if name not in COMMANDS:
        logger.error(f"Unknown subcommand '{name}'")
        return EXIT_USAGE
    for stream, default in (("stdin", sys.stdin), ("stdout", sys.stdout)):
        if getattr(args, stream, None) is None:
            setattr(args, stream, default)
    try:
        config = load_run_config(args)
        set_precision(config.precision)
        if name != "make-toy":
            configure_logging(getattr(args, "log_level", None), Path(config.output_dir))
        return COMMANDS[name](args, config)
    except LatentTransferError as e:
        code = exit_code_for(e)
        logger.error(f"{name} failed ({type(e).__name__}): {e}")
        return code
    except Exception as e:
        logger.exception(f"{name} failed with an unexpected error: {e}")
        return EXIT_UNEXPECTED


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    configure_logging(args.log_level)
    return run_subcommand(args.command, args)


if __name__ == "__main__":
    sys.exit(main())
