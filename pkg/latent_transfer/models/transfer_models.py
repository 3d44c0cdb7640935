"""
Data models for latent attribute transfer

Configuration dataclasses, corpus records, FGIM traces and evaluation
results shared across the package.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import ConfigError, ContractError, TargetVectorError


class Split(Enum):
    TRAIN = "train"
    DEV = "dev"
    TEST = "test"


class DatasetLayout(Enum):
    FILE_PER_ATTRIBUTE = "file-per-attribute"
    TSV = "tsv"


class LossForm(Enum):
    """Classifier loss: full per-aspect binary cross-entropy, or the one-sided -sum(t log q)"""
    BINARY = "binary"
    ONE_SIDED = "one-sided"


class TargetRule(Enum):
    """How sweep targets are chosen: flip each source label, or use one fixed vector"""
    FLIP = "flip"
    FIXED = "fixed"


@dataclass(frozen=True)
class AttributeVector:
    """One value in [0, 1] per aspect"""

    values: Tuple[float, ...]

    def __post_init__(self):
        if len(self.values) < 1:
            raise ContractError("AttributeVector needs at least one aspect")
        for v in self.values:
            if not (0.0 <= v <= 1.0) or v != v:
                raise ContractError(f"Attribute value {v} is outside [0, 1]")

    @classmethod
    def of(cls, *values: float) -> "AttributeVector":
        return cls(tuple(float(v) for v in values))

    @classmethod
    def parse(cls, text: str) -> "AttributeVector":
        """Parse a comma-separated list of decimals such as '1.0,0.0'"""
        parts = [p.strip() for p in text.split(",")]
        if not text.strip() or any(not p for p in parts):
            raise TargetVectorError(f"Malformed target vector '{text}'")
        try:
            values = tuple(float(p) for p in parts)
        except ValueError:
            raise TargetVectorError(f"Malformed target vector '{text}'") from None
        if any(not (0.0 <= v <= 1.0) for v in values):
            raise TargetVectorError(f"Target vector '{text}' has entries outside [0, 1]")
        return cls(values)

    @property
    def dimension(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)

    def flipped(self) -> "AttributeVector":
        """1 - round(y) per aspect"""
        return AttributeVector(tuple(1.0 - float(round(v)) for v in self.values))

    def __str__(self) -> str:
        return ",".join(f"{v:g}" for v in self.values)


@dataclass
class Example:
    tokens: List[str]
    attributes: AttributeVector
    reference: Optional[List[str]] = None

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


@dataclass
class Corpus:
    """Attribute-labelled sentences of one split"""

    split: Split
    items: List[Example]
    num_attributes: int
    max_len: int

    def __post_init__(self):
        for item in self.items:
            if item.attributes.dimension != self.num_attributes:
                raise ContractError(
                    f"Corpus expects {self.num_attributes} aspects, found {item.attributes.dimension}"
                )
            if len(item.tokens) > self.max_len:
                raise ContractError(f"Sentence longer than max_len={self.max_len}")

    def __len__(self) -> int:
        return len(self.items)

    @property
    def sentences(self) -> List[List[str]]:
        return [item.tokens for item in self.items]

    @property
    def has_references(self) -> bool:
        return bool(self.items) and all(item.reference is not None for item in self.items)

    def attribute_matrix(self) -> np.ndarray:
        if not self.items:
            return np.zeros((0, self.num_attributes))
        return np.stack([item.attributes.as_array() for item in self.items])

    def subset(self, indices: Sequence[int]) -> "Corpus":
        return Corpus(self.split, [self.items[i] for i in indices], self.num_attributes, self.max_len)

    def with_labels(self, labels: np.ndarray) -> "Corpus":
        """Same sentences with replaced attribute rows"""
        items = [
            Example(item.tokens, AttributeVector(tuple(float(v) for v in row)), item.reference)
            for item, row in zip(self.items, labels)
        ]
        return Corpus(self.split, items, self.num_attributes, self.max_len)


def _check(condition: bool, key: str, reason: str) -> None:
    if not condition:
        raise ConfigError(reason, key=key)


@dataclass
class DataConfig:
    path: str = "data"
    layout: DatasetLayout = DatasetLayout.FILE_PER_ATTRIBUTE
    attribute_names: Tuple[str, ...] = ("0", "1")
    file_prefix: str = ""
    min_count: int = 1
    max_vocab: int = 10000

    def validate(self) -> None:
        _check(len(self.attribute_names) >= 1, "data.attribute_names", "at least one name required")
        _check(self.min_count >= 1, "data.min_count", "must be >= 1")
        _check(self.max_vocab > 4, "data.max_vocab", "must exceed the 4 reserved tokens")


@dataclass
class AEHyperParams:
    embed_dim: int = 256
    latent_dim: int = 256
    attn_dim: int = 256
    ffn_dim: int = 1024
    gru_hidden: int = 128
    encoder_layers: int = 2
    decoder_layers: int = 2
    heads: int = 4
    max_len: int = 20
    smoothing: float = 0.1
    dropout: float = 0.1
    lr: float = 0.001
    batch_size: int = 128
    epochs: int = 10
    grad_clip: float = 5.0

    def validate(self) -> None:
        _check(self.latent_dim == 2 * self.gru_hidden, "ae.latent_dim",
               f"must equal 2 * gru_hidden ({2 * self.gru_hidden})")
        _check(self.heads >= 1 and self.embed_dim % self.heads == 0, "ae.heads",
               f"embed_dim {self.embed_dim} is not divisible by heads {self.heads}")
        for key in ("embed_dim", "attn_dim", "ffn_dim", "gru_hidden", "max_len", "batch_size", "epochs"):
            _check(getattr(self, key) >= 1, f"ae.{key}", "must be >= 1")
        _check(self.encoder_layers >= 1, "ae.encoder_layers", "must be >= 1")
        _check(self.decoder_layers >= 1, "ae.decoder_layers", "must be >= 1")
        _check(0.0 <= self.smoothing < 1.0, "ae.smoothing", "must be in [0, 1)")
        _check(0.0 <= self.dropout < 1.0, "ae.dropout", "must be in [0, 1)")
        _check(self.lr > 0, "ae.lr", "must be > 0")
        _check(self.grad_clip >= 0, "ae.grad_clip", "must be >= 0")


@dataclass
class ClassifierConfig:
    hidden1: int = 100
    hidden2: int = 50
    lr: float = 0.001
    batch_size: int = 128
    epochs: int = 20
    loss_form: LossForm = LossForm.BINARY

    def validate(self) -> None:
        _check(self.hidden1 >= 1, "classifier.hidden1", "must be >= 1")
        _check(self.hidden2 >= 1, "classifier.hidden2", "must be >= 1")
        _check(self.lr > 0, "classifier.lr", "must be > 0")
        _check(self.batch_size >= 1, "classifier.batch_size", "must be >= 1")
        _check(self.epochs >= 1, "classifier.epochs", "must be >= 1")


@dataclass
class FGIMConfig:
    weights: Tuple[float, ...] = (1.0, 2.0, 3.0, 4.0, 5.0, 6.0)
    decay: float = 0.9
    threshold: float = 0.001
    s_steps: int = 30

    def validate(self) -> None:
        _check(len(self.weights) >= 1, "fgim.weights", "at least one weight required")
        _check(all(w > 0 for w in self.weights), "fgim.weights", "all weights must be > 0")
        _check(all(a < b for a, b in zip(self.weights, self.weights[1:])), "fgim.weights",
               "weights must be strictly ascending")
        _check(0.0 < self.decay < 1.0, "fgim.lambda", "must be in (0, 1)")
        _check(self.threshold > 0, "fgim.threshold", "must be > 0")
        _check(self.s_steps >= 1, "fgim.s_steps", "must be >= 1")

    def with_weights(self, weights: Sequence[float]) -> "FGIMConfig":
        return FGIMConfig(tuple(float(w) for w in weights), self.decay, self.threshold, self.s_steps)


@dataclass
class EvalConfig:
    hash_buckets: int = 262144
    embed_dim: int = 16
    lr: float = 0.01
    epochs: int = 10
    batch_size: int = 64
    lm_discount: float = 0.75
    sample_size: int = 200
    workers: int = 1

    def validate(self) -> None:
        _check(self.hash_buckets >= 1, "eval.hash_buckets", "must be >= 1")
        _check(self.embed_dim >= 1, "eval.embed_dim", "must be >= 1")
        _check(self.lr > 0, "eval.lr", "must be > 0")
        _check(self.epochs >= 1, "eval.epochs", "must be >= 1")
        _check(self.batch_size >= 1, "eval.batch_size", "must be >= 1")
        _check(0.0 < self.lm_discount < 1.0, "eval.lm_discount", "must be in (0, 1)")
        _check(self.sample_size >= 1, "eval.sample_size", "must be >= 1")
        _check(self.workers >= 1, "eval.workers", "must be >= 1")


@dataclass
class RunConfig:
    seed: int = 42
    output_dir: str = "runs"
    precision: str = "float32"
    data: DataConfig = field(default_factory=DataConfig)
    ae: AEHyperParams = field(default_factory=AEHyperParams)
    classifier: ClassifierConfig = field(default_factory=ClassifierConfig)
    fgim: FGIMConfig = field(default_factory=FGIMConfig)
    eval: EvalConfig = field(default_factory=EvalConfig)

    def validate(self) -> None:
        _check(self.precision in ("float32", "float64"), "precision", "must be float32 or float64")
        self.data.validate()
        self.ae.validate()
        self.classifier.validate()
        self.fgim.validate()
        self.eval.validate()


@dataclass
class TrainingHistory:
    """Per-epoch metrics of one training run and the best checkpoint state"""

    train_loss: List[float] = field(default_factory=list)
    dev_metric: List[float] = field(default_factory=list)
    metric_name: str = "dev_loss"
    best_epoch: int = -1
    best_state: Dict[str, np.ndarray] = field(default_factory=dict)


@dataclass
class EditStep:
    """One FGIM iterate"""

    weight_index: int
    inner_step: int
    weight: float
    grad_norm: float
    edit_norm: float
    prediction: Tuple[float, ...]
    loss: float

    def to_dict(self) -> Dict:
        return {
            "weight_index": self.weight_index,
            "inner_step": self.inner_step,
            "weight": self.weight,
            "grad_norm": self.grad_norm,
            "edit_norm": self.edit_norm,
            "prediction": list(self.prediction),
            "loss": self.loss,
        }


@dataclass
class EditTrace:
    steps: List[EditStep] = field(default_factory=list)
    success: bool = False
    success_weight_index: Optional[int] = None

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def weights_tried(self) -> List[int]:
        seen: List[int] = []
        for step in self.steps:
            if not seen or seen[-1] != step.weight_index:
                seen.append(step.weight_index)
        return seen


@dataclass
class EditOutcome:
    """Result of fgim_edit on one latent"""

    z: np.ndarray
    edited: np.ndarray
    success: bool
    trace: EditTrace

    @property
    def edit_norm(self) -> float:
        return float(np.linalg.norm(self.edited - self.z))


@dataclass
class TransferResult:
    source: List[str]
    target: AttributeVector
    success: bool
    z: np.ndarray
    edited: np.ndarray
    output: List[str]
    trace: EditTrace

    @property
    def edit_norm(self) -> float:
        return float(np.linalg.norm(self.edited - self.z))

    def to_record(self) -> Dict:
        """JSON-ready trace record for one sentence"""
        return {
            "source": " ".join(self.source),
            "output": " ".join(self.output),
            "target": list(self.target.values),
            "success": self.success,
            "success_weight_index": self.trace.success_weight_index,
            "edit_norm": self.edit_norm,
            "z": self.z,
            "z_edited": self.edited,
            "steps": [step.to_dict() for step in self.trace.steps],
        }


@dataclass
class SweepRow:
    weight: float
    acc: float
    bleu: float
    ppl: float
    mean_edit_norm: float
    success_rate: float
    bleu_reference: str = "references"


@dataclass
class EvalRow:
    source: str
    output: str
    target: str
    predicted: str
    correct: bool
    ppl: float


@dataclass
class EvalReport:
    acc: float
    bleu: float
    ppl: float
    per_aspect_acc: List[float] = field(default_factory=list)
    rows: List[EvalRow] = field(default_factory=list)

    def __post_init__(self):
        if not (0.0 <= self.acc <= 1.0):
            raise ContractError(f"accuracy {self.acc} outside [0, 1]")
        if not (0.0 <= self.bleu <= 100.0):
            raise ContractError(f"BLEU {self.bleu} outside [0, 100]")
        if not self.ppl > 0:
            raise ContractError(f"perplexity {self.ppl} must be positive")
