"""
Run-directory artifacts: checkpoints, metadata sidecars and vocabulary

    <run>/ae.ckpt  ae.json  vocab.txt  ae_history.csv
    <run>/clf.ckpt clf.json clf_history.csv
"""

import dataclasses
import logging
from pathlib import Path
from typing import Tuple, Union

from ..autoencoder.model import TransformerAutoencoder
from ..classifier.latent_classifier import LatentClassifier
from ..errors import CheckpointError, DimensionError
from ..models.transfer_models import AEHyperParams, ClassifierConfig, LossForm
from ..numerics.module import Module
from ..textdata.vocab import Vocab
from .checkpoint import check_latent_dims, load_checkpoint, load_metadata, save_checkpoint, save_metadata

logger = logging.getLogger(__name__)

AE_CHECKPOINT = "ae.ckpt"
AE_METADATA = "ae.json"
VOCAB_FILE = "vocab.txt"
CLF_CHECKPOINT = "clf.ckpt"
CLF_METADATA = "clf.json"

PathLike = Union[str, Path]


def _load_into(module: Module, tensors, path: Path) -> None:
    try:
        module.load_state_dict(tensors)
    except DimensionError as e:
        raise CheckpointError(f"{path} does not match its metadata: {e}") from None


def save_autoencoder(model: TransformerAutoencoder, vocab: Vocab, run_dir: PathLike) -> Path:
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    save_checkpoint(model.state_dict(), run_dir / AE_CHECKPOINT)
    save_metadata({"vocab_size": vocab.size, "hp": dataclasses.asdict(model.hp)}, run_dir / AE_METADATA)
    vocab.save(run_dir / VOCAB_FILE)
    return run_dir / AE_CHECKPOINT


def load_autoencoder(run_dir: PathLike) -> Tuple[TransformerAutoencoder, Vocab]:
    run_dir = Path(run_dir)
    tensors = load_checkpoint(run_dir / AE_CHECKPOINT)
    meta = load_metadata(run_dir / AE_METADATA)
    vocab_path = run_dir / VOCAB_FILE
    if not vocab_path.exists():
        raise CheckpointError(f"vocabulary not found: {vocab_path}")
    vocab = Vocab.load(vocab_path)
    if vocab.size != meta.get("vocab_size"):
        raise CheckpointError(f"{vocab_path} has {vocab.size} tokens, {AE_METADATA} expects {meta.get('vocab_size')}")
    try:
        hp = AEHyperParams(**meta["hp"])
    except (KeyError, TypeError) as e:
        raise CheckpointError(f"malformed {AE_METADATA}: {e}") from None
    model = TransformerAutoencoder(vocab.size, hp)
    _load_into(model, tensors, run_dir / AE_CHECKPOINT)
    model.eval()
    logger.info(f"Loaded autoencoder from {run_dir} ({model.num_parameters()} parameters)")
    return model, vocab


def save_classifier(scorer: LatentClassifier, config: ClassifierConfig, run_dir: PathLike) -> Path:
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    save_checkpoint(scorer.state_dict(), run_dir / CLF_CHECKPOINT)
    save_metadata({
        "latent_dim": scorer.latent_dim,
        "num_attributes": scorer.num_attributes,
        "hidden1": config.hidden1,
        "hidden2": config.hidden2,
        "loss_form": config.loss_form.value,
    }, run_dir / CLF_METADATA)
    return run_dir / CLF_CHECKPOINT


def load_classifier(run_dir: PathLike) -> Tuple[LatentClassifier, LossForm]:
    run_dir = Path(run_dir)
    tensors = load_checkpoint(run_dir / CLF_CHECKPOINT)
    meta = load_metadata(run_dir / CLF_METADATA)
    try:
        scorer = LatentClassifier(int(meta["latent_dim"]), int(meta["num_attributes"]),
                                  int(meta["hidden1"]), int(meta["hidden2"]))
        form = LossForm(meta.get("loss_form", LossForm.BINARY.value))
    except (KeyError, ValueError) as e:
        raise CheckpointError(f"malformed {CLF_METADATA}: {e}") from None
    _load_into(scorer, tensors, run_dir / CLF_CHECKPOINT)
    return scorer, form


def load_models(run_dir: PathLike) -> Tuple[TransformerAutoencoder, LatentClassifier, Vocab, LossForm]:
    """
    Load the autoencoder and classifier of a run

    Raises:
        CheckpointError: an archive or sidecar is missing or malformed
        IncompatibleCheckpointError: the archives disagree on latent_dim
    """
    run_dir = Path(run_dir)
    check_latent_dims(load_checkpoint(run_dir / AE_CHECKPOINT), load_checkpoint(run_dir / CLF_CHECKPOINT))
    model, vocab = load_autoencoder(run_dir)
    scorer, form = load_classifier(run_dir)
    return model, scorer, vocab, form
