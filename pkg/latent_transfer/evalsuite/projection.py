"""
Two-dimensional PCA projection of latent sets, and latent exports

Component signs are fixed so the largest-magnitude loading of every
component is positive, making the projection independent of row order.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd

from ..errors import ContractError


@dataclass
class ProjectionResult:
    coords: np.ndarray              # [N x 2]
    explained_variance: np.ndarray  # [2]
    explained_ratio: np.ndarray     # [2]
    components: np.ndarray          # [2 x d]
    mean: np.ndarray                # [d]


def project_latents(latents: np.ndarray) -> ProjectionResult:
    """
    Mean-centre and project onto the top two principal components

    Raises:
        ContractError: fewer than 3 latents
    """
    latents = np.asarray(latents, dtype=np.float64)
    if latents.ndim != 2 or latents.shape[0] < 3:
        raise ContractError("projection needs at least 3 latent vectors")
    n, dim = latents.shape
    mean = latents.mean(axis=0)
    centered = latents - mean
    _, singular, vt = np.linalg.svd(centered, full_matrices=False)

    components = np.zeros((2, dim))
    variance = np.zeros(2)
    k = min(2, len(singular))
    components[:k] = vt[:k]
    variance[:k] = singular[:k] ** 2 / (n - 1)
    for row in components[:k]:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0

    total = float(np.sum(singular ** 2) / (n - 1))
    ratio = variance / total if total > 0 else np.zeros(2)
    coords = centered @ components.T
    if total == 0:
        coords = np.zeros((n, 2))
    return ProjectionResult(coords, variance, ratio, components, mean)


def _column(values: Optional[Sequence], n: int, default) -> list:
    return list(values) if values is not None else [default] * n


def export_latents(result: ProjectionResult, labels: Optional[Sequence[str]],
                   weights: Optional[Sequence[float]], path: Union[str, Path]) -> pd.DataFrame:
    """Write the `x,y,label,weight` CSV and return it as a DataFrame"""
    n = len(result.coords)
    frame = pd.DataFrame({
        "x": result.coords[:, 0],
        "y": result.coords[:, 1],
        "label": _column(labels, n, ""),
        "weight": _column(weights, n, 0.0),
    })
    frame.to_csv(path, index=False, encoding="utf-8")
    return frame


def export_raw_latents(latents: np.ndarray, labels: Optional[Sequence[str]],
                       weights: Optional[Sequence[float]], path: Union[str, Path]) -> None:
    """One line per latent: label, weight, then the latent values, space-separated"""
    latents = np.asarray(latents, dtype=np.float64)
    labels = _column(labels, len(latents), "")
    weights = _column(weights, len(latents), 0.0)
    with open(path, "w", encoding="utf-8") as handle:
        for label, weight, row in zip(labels, weights, latents):
            values = " ".join(repr(float(v)) for v in row)
            handle.write(f"{label} {float(weight)!r} {values}\n")
