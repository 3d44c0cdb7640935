"""
Named-tensor checkpoint archive

Layout (little-endian): magic b"FGIM", u32 version, u32 entry count, then per
entry: u32 name length, UTF-8 name, u32 rank, rank x u64 dimensions, float32
values in row-major order. Loading rejects bad magic, unknown versions,
truncation, trailing bytes and duplicate names.
"""

import logging
import struct
from collections import OrderedDict
from pathlib import Path
from typing import Dict, Iterable, Mapping, Tuple, Union

import numpy as np
import orjson

from ..errors import CheckpointError, IncompatibleCheckpointError

logger = logging.getLogger(__name__)

MAGIC = b"FGIM"
VERSION = 1

Entries = Union[Mapping[str, np.ndarray], Iterable[Tuple[str, np.ndarray]]]


def encode_checkpoint(tensors: Entries) -> bytes:
    items = list(tensors.items()) if isinstance(tensors, Mapping) else list(tensors)
    names = [name for name, _ in items]
    if len(set(names)) != len(names):
        raise CheckpointError("duplicate tensor names in checkpoint")
    chunks = [MAGIC, struct.pack("<II", VERSION, len(items))]
    for name, value in items:
        encoded = name.encode("utf-8")
        array = np.ascontiguousarray(np.asarray(value), dtype="<f4")
        chunks.append(struct.pack("<I", len(encoded)))
        chunks.append(encoded)
        chunks.append(struct.pack("<I", array.ndim))
        chunks.append(struct.pack(f"<{array.ndim}Q", *array.shape))
        chunks.append(array.tobytes(order="C"))
    return b"".join(chunks)


class _Reader:
    def __init__(self, payload: bytes):
        self.payload = payload
        self.offset = 0

    def take(self, size: int, what: str) -> bytes:
        if self.offset + size > len(self.payload):
            raise CheckpointError(f"checkpoint truncated while reading {what}")
        chunk = self.payload[self.offset:self.offset + size]
        self.offset += size
        return chunk

    def unpack(self, fmt: str, what: str) -> tuple:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt), what))


def decode_checkpoint(payload: bytes) -> "OrderedDict[str, np.ndarray]":
    reader = _Reader(payload)
    if reader.take(4, "magic") != MAGIC:
        raise CheckpointError("not a checkpoint archive (bad magic)")
    version, count = reader.unpack("<II", "header")
    if version != VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}")

    tensors: "OrderedDict[str, np.ndarray]" = OrderedDict()
    for _ in range(count):
        (name_length,) = reader.unpack("<I", "name length")
        try:
            name = reader.take(name_length, "name").decode("utf-8")
        except UnicodeDecodeError:
            raise CheckpointError("tensor name is not valid UTF-8") from None
        if name in tensors:
            raise CheckpointError(f"duplicate tensor name '{name}'")
        (rank,) = reader.unpack("<I", f"rank of {name}")
        shape = reader.unpack(f"<{rank}Q", f"dimensions of {name}")
        size = int(np.prod(shape)) if rank else 1
        values = np.frombuffer(reader.take(4 * size, f"values of {name}"), dtype="<f4")
        tensors[name] = values.reshape(shape).astype(np.float32)
    if reader.offset != len(payload):
        raise CheckpointError(f"{len(payload) - reader.offset} trailing bytes after the last entry")
    return tensors


def save_checkpoint(tensors: Entries, path: Union[str, Path]) -> None:
    payload = encode_checkpoint(tensors)
    Path(path).write_bytes(payload)
    logger.info(f"Saved checkpoint {path} ({len(payload)} bytes)")


def load_checkpoint(path: Union[str, Path]) -> "OrderedDict[str, np.ndarray]":
    path = Path(path)
    if not path.exists():
        raise CheckpointError(f"checkpoint not found: {path}")
    return decode_checkpoint(path.read_bytes())


def save_metadata(metadata: Dict, path: Union[str, Path]) -> None:
    Path(path).write_bytes(orjson.dumps(metadata, option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS))


def load_metadata(path: Union[str, Path]) -> Dict:
    path = Path(path)
    if not path.exists():
        raise CheckpointError(f"checkpoint metadata not found: {path}")
    try:
        return orjson.loads(path.read_bytes())
    except orjson.JSONDecodeError as e:
        raise CheckpointError(f"unreadable metadata {path}: {e}") from None


def check_latent_dims(ae_tensors: Mapping[str, np.ndarray], clf_tensors: Mapping[str, np.ndarray],
                      ae_key: str = "latent_proj.weight", clf_key: str = "w1") -> int:
    """
    Compare latent sizes read from tensor shapes

    Raises:
        IncompatibleCheckpointError: the two archives disagree
    """
    for key, tensors in ((ae_key, ae_tensors), (clf_key, clf_tensors)):
        if key not in tensors:
            raise CheckpointError(f"checkpoint lacks tensor '{key}'")
    ae_dim = ae_tensors[ae_key].shape[0]
    clf_dim = clf_tensors[clf_key].shape[0]
    if ae_dim != clf_dim:
        raise IncompatibleCheckpointError(
            f"autoencoder latent_dim {ae_dim} differs from classifier latent_dim {clf_dim}"
        )
    return int(ae_dim)
