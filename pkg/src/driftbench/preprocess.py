"""Feature scaling anchored on the calibration batch, plus per-batch centering.

Min-max parameters are learned from batch 1 only and applied unchanged to
every batch, so later batches can (and do) land far outside [0, 1].  Outputs
are deliberately not clipped.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .data_io import Batch, Dataset, Sample


@dataclass(frozen=True)
class NormalizationParams:
    """Per-feature extrema of the calibration batch."""

    min: np.ndarray
    max: np.ndarray
    source_batch_id: int

    def __post_init__(self):
        lo = np.asarray(self.min, dtype=float)
        hi = np.asarray(self.max, dtype=float)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValueError("min/max must be 1-D vectors of equal length")
        if np.any(lo > hi):
            raise ValueError("min must not exceed max")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "min", lo)
        object.__setattr__(self, "max", hi)


@dataclass(frozen=True)
class CenteringOffset:
    """Arithmetic mean removed from a batch by centering."""

    mean: np.ndarray
    batch_id: int


def fit_minmax(calibration: Batch) -> NormalizationParams:
    """Learn exact per-feature extrema from the calibration batch."""
    if len(calibration) == 0:
        raise ValueError("cannot fit normalization on an empty batch")
    X = calibration.feature_matrix()
    return NormalizationParams(X.min(axis=0), X.max(axis=0), calibration.batch_id)


def apply_minmax_matrix(params: NormalizationParams, X: np.ndarray) -> np.ndarray:
    """Map feature j to (x - min_j) / (max_j - min_j); zero-range features to 0."""
    X = np.asarray(X, dtype=float)
    if X.shape[-1] != params.min.shape[0]:
        raise ValueError(
            f"feature dimension {X.shape[-1]} does not match params ({params.min.shape[0]})"
        )
    span = params.max - params.min
    safe = np.where(span > 0, span, 1.0)
    out = (X - params.min) / safe
    return np.where(span > 0, out, 0.0)


def apply_minmax(params: NormalizationParams, samples: Sequence[Sample]) -> list[Sample]:
    """Rescale samples; values outside the calibration range are not clipped."""
    if not samples:
        return []
    X = np.stack([s.features for s in samples])
    Xn = apply_minmax_matrix(params, X)
    return [
        Sample(Xn[i], s.label, s.concentration, s.batch_id) for i, s in enumerate(samples)
    ]


def normalize_batch(params: NormalizationParams, batch: Batch) -> Batch:
    return Batch(batch.batch_id, tuple(apply_minmax(params, batch.samples)), batch.month_ids)


def normalize_dataset(dataset: Dataset, params: NormalizationParams | None = None) -> Dataset:
    """Rescale every batch with batch-1 extrema (fit here unless provided)."""
    if params is None:
        params = fit_minmax(dataset.batch(1))
    return Dataset({bid: normalize_batch(params, b) for bid, b in dataset.batches.items()})


def center_matrix(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Subtract the column mean; returns (centered, mean)."""
    X = np.asarray(X, dtype=float)
    if X.shape[0] == 0:
        raise ValueError("cannot center an empty matrix")
    mean = X.mean(axis=0)
    return X - mean, mean


def center(samples: Sequence[Sample]) -> tuple[list[Sample], CenteringOffset]:
    """Center samples on their own arithmetic mean."""
    if not samples:
        raise ValueError("cannot center an empty sample list")
    X = np.stack([s.features for s in samples])
    Xc, mean = center_matrix(X)
    out = [Sample(Xc[i], s.label, s.concentration, s.batch_id) for i, s in enumerate(samples)]
    return out, CenteringOffset(mean, samples[0].batch_id)
