"""
Exception hierarchy for latent_transfer

Every error derives from LatentTransferError and from the closest built-in
exception, so callers can catch either one. The CLI maps each class to an
exit code (see cli.app.EXIT_CODES).
"""

from typing import Optional


class LatentTransferError(Exception):
    """Base class for all errors raised by this package"""


class DimensionError(LatentTransferError, ValueError):
    """Tensor or parameter shapes do not agree"""


class NumericDomainError(LatentTransferError, ArithmeticError):
    """A value left the domain of a function (log of a non-positive, overflow, NaN)"""


class VocabIndexError(LatentTransferError, IndexError):
    """A token id is negative or not smaller than the vocabulary size"""


class ContractError(LatentTransferError, ValueError):
    """A documented precondition of an operation was violated"""


class AutodiffError(ContractError):
    """The autodiff tape was misused"""


class IngestionError(LatentTransferError, ValueError):
    """A dataset file is missing or malformed"""

    def __init__(self, reason: str, path: Optional[str] = None, line: Optional[int] = None):
        self.reason = reason
        self.path = path
        self.line = line
        location = path or "<input>"
        if line is not None:
            location = f"{location}:{line}"
        super().__init__(f"{location}: {reason}")


class TrainingError(LatentTransferError, RuntimeError):
    """Training diverged"""

    def __init__(self, reason: str, epoch: int):
        self.epoch = epoch
        super().__init__(f"epoch {epoch}: {reason}")


class ConfigError(LatentTransferError, ValueError):
    """A configuration file could not be parsed or holds an invalid value"""

    def __init__(self, reason: str, line: Optional[int] = None, key: Optional[str] = None):
        self.reason = reason
        self.line = line
        self.key = key
        if line is not None:
            message = f"line {line}: {reason}"
        elif key is not None:
            message = f"{key}: {reason}"
        else:
            message = reason
        super().__init__(message)


class CheckpointError(LatentTransferError, ValueError):
    """A checkpoint archive is missing, truncated or malformed"""


class IncompatibleCheckpointError(CheckpointError):
    """Two checkpoints disagree on the latent dimension"""


class TargetVectorError(LatentTransferError, ValueError):
    """A target attribute vector could not be parsed"""
