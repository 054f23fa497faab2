"""Readers, writers, and generators for batched sensor datasets.

On-disk format is one sample per line: a leading ``label`` or
``label;concentration`` token followed by space-separated ``index:value``
pairs with 1-based, strictly increasing feature indices.  Batch membership
is carried by the file name (``batch3.dat`` is batch 3); the lines
themselves hold no batch information.
"""

from __future__ import annotations

import hashlib
import logging
import math
import os
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

logger = logging.getLogger(__name__)

N_FEATURES = 128
GAS_LABELS = frozenset({1, 2, 3, 4, 5, 6})
MAX_BATCHES = 10

# Months covered by each batch of the public gas-sensor drift dataset.
BATCH_MONTH_IDS = {
    1: (1, 2),
    2: (3, 4, 8, 9, 10),
    3: (11, 12, 13),
    4: (14, 15),
    5: (16,),
    6: (17, 18, 19, 20),
    7: (21,),
    8: (22, 23),
    9: (24, 30),
    10: (36,),
}

# Scale of the synthetic class means; pairwise mean distance is roughly
# CLASS_MEAN_SPREAD * sqrt(2) against unit within-class noise.
CLASS_MEAN_SPREAD = 3.0


class DataFormatError(ValueError):
    """Raised when an input file violates the sample-line grammar."""


@dataclass
class ParseStats:
    """Counters accumulated while parsing sample lines."""

    lines: int = 0
    zero_filled: int = 0
    samples_with_missing: int = 0


@dataclass(frozen=True)
class Sample:
    """One feature vector with its gas label and optional concentration."""

    features: np.ndarray
    label: int
    concentration: float | None
    batch_id: int

    def __post_init__(self):
        feats = np.asarray(self.features, dtype=float)
        if feats.ndim != 1:
            raise ValueError(f"features must be 1-D, got shape {feats.shape}")
        if not np.all(np.isfinite(feats)):
            raise ValueError("features must be finite")
        feats.setflags(write=False)
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "label", int(self.label))
        if self.label < 1:
            raise ValueError(f"label must be >= 1, got {self.label}")
        if self.concentration is not None:
            conc = float(self.concentration)
            if not math.isfinite(conc) or conc <= 0:
                raise ValueError(f"concentration must be positive, got {conc}")
            object.__setattr__(self, "concentration", conc)
        object.__setattr__(self, "batch_id", int(self.batch_id))


@dataclass(frozen=True)
class Batch:
    """Ordered samples sharing one batch id."""

    batch_id: int
    samples: tuple[Sample, ...]
    month_ids: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        object.__setattr__(self, "month_ids", tuple(self.month_ids))
        for s in self.samples:
            if s.batch_id != self.batch_id:
                raise ValueError(
                    f"sample batch_id {s.batch_id} does not match batch {self.batch_id}"
                )
        dims = {s.features.shape[0] for s in self.samples}
        if len(dims) > 1:
            raise ValueError(f"inconsistent feature dimensions in batch: {sorted(dims)}")

    def __len__(self) -> int:
        return len(self.samples)

    def feature_matrix(self) -> np.ndarray:
        """Stack sample features into an (n, D) array."""
        return np.stack([s.features for s in self.samples])

    def label_vector(self) -> np.ndarray:
        return np.array([s.label for s in self.samples], dtype=int)


@dataclass(frozen=True)
class Dataset:
    """Batches keyed by id; ids must form a contiguous run starting at 1."""

    batches: dict[int, Batch]

    def __post_init__(self):
        ids = sorted(self.batches)
        if not ids:
            raise ValueError("dataset has no batches")
        if ids != list(range(1, len(ids) + 1)):
            raise ValueError(f"batch ids must be contiguous from 1, got {ids}")
        for bid, batch in self.batches.items():
            if batch.batch_id != bid:
                raise ValueError(f"batch keyed {bid} carries id {batch.batch_id}")

    @property
    def batch_ids(self) -> list[int]:
        return sorted(self.batches)

    def batch(self, batch_id: int) -> Batch:
        return self.batches[batch_id]

    @property
    def n_samples(self) -> int:
        return sum(len(b) for b in self.batches.values())

    @property
    def feature_dim(self) -> int:
        return self.batches[1].samples[0].features.shape[0]


def _parse_head(token: str, at: str) -> tuple[int, float | None]:
    lab_s, sep, conc_s = token.partition(";")
    try:
        label = int(lab_s)
    except ValueError:
        raise DataFormatError(f"{at}malformed label token '{token}'") from None
    if label not in GAS_LABELS:
        raise DataFormatError(f"{at}label {label} outside {{1..6}} in token '{token}'")
    if not sep:
        return label, None
    try:
        conc = float(conc_s)
    except ValueError:
        raise DataFormatError(f"{at}unparseable concentration in token '{token}'") from None
    if not math.isfinite(conc) or conc <= 0:
        raise DataFormatError(f"{at}concentration must be positive in token '{token}'")
    return label, conc


def parse_sample_line(
    line: str,
    batch_id: int,
    line_no: int | None = None,
    stats: ParseStats | None = None,
) -> Sample:
    """Parse one data line into a Sample.

    Feature indices absent from the line are zero-filled and counted in
    ``stats`` rather than rejected; the canonical files are dense, so a
    nonzero counter flags an unusual writer.

    Raises:
        DataFormatError: malformed token, index out of range or not strictly
            increasing, unparseable number, or label outside {1..6}.  The
            message names the offending token and, when given, the line number.
    """
    at = f"line {line_no}: " if line_no is not None else ""
    tokens = line.split()
    if not tokens:
        raise DataFormatError(f"{at}empty line")
    label, concentration = _parse_head(tokens[0], at)
    values = np.zeros(N_FEATURES)
    prev = 0
    for tok in tokens[1:]:
        idx_s, sep, val_s = tok.partition(":")
        if not sep:
            raise DataFormatError(f"{at}malformed feature token '{tok}'")
        try:
            idx = int(idx_s)
        except ValueError:
            raise DataFormatError(f"{at}malformed feature index in token '{tok}'") from None
        if not 1 <= idx <= N_FEATURES:
            raise DataFormatError(
                f"{at}feature index {idx} outside [1, {N_FEATURES}] in token '{tok}'"
            )
        if idx <= prev:
            raise DataFormatError(
                f"{at}feature indices must be strictly increasing at token '{tok}'"
            )
        try:
            val = float(val_s)
        except ValueError:
            raise DataFormatError(f"{at}unparseable value in token '{tok}'") from None
        if not math.isfinite(val):
            raise DataFormatError(f"{at}non-finite value in token '{tok}'")
        values[idx - 1] = val
        prev = idx
    listed = len(tokens) - 1
    if stats is not None:
        stats.lines += 1
        if listed < N_FEATURES:
            stats.samples_with_missing += 1
            stats.zero_filled += N_FEATURES - listed
    return Sample(values, label, concentration, batch_id)


def format_sample_line(sample: Sample) -> str:
    """Serialize a Sample back to the line grammar (dense, round-trip exact)."""
    if sample.concentration is not None:
        head = f"{sample.label};{float(sample.concentration)!r}"
    else:
        head = str(sample.label)
    pairs = " ".join(f"{i + 1}:{float(v)!r}" for i, v in enumerate(sample.features))
    return f"{head} {pairs}"


def load_batch_file(path: Path | str, batch_id: int) -> tuple[Batch, ParseStats]:
    """Parse one batch file; line errors are aggregated into a single failure."""
    path = Path(path)
    stats = ParseStats()
    samples: list[Sample] = []
    errors: list[str] = []
    with open(path, "r") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                samples.append(parse_sample_line(line, batch_id, line_no, stats))
            except DataFormatError as exc:
                errors.append(str(exc))
    if errors:
        shown = "; ".join(errors[:5])
        more = f" (+{len(errors) - 5} more)" if len(errors) > 5 else ""
        raise DataFormatError(f"{path.name}: {len(errors)} malformed line(s): {shown}{more}")
    if not samples:
        raise DataFormatError(f"{path.name}: no samples")
    if stats.samples_with_missing:
        logger.warning(
            "%s: %d sample(s) had missing feature indices; %d value(s) zero-filled",
            path.name,
            stats.samples_with_missing,
            stats.zero_filled,
        )
    months = BATCH_MONTH_IDS.get(batch_id, ())
    return Batch(batch_id, tuple(samples), months), stats


def load_dataset(directory: Path | str) -> Dataset:
    """Load ``batch1.dat .. batchN.dat`` from a directory.

    Missing trailing batches are tolerated; a gap in the sequence or a
    missing ``batch1.dat`` (the calibration data) is fatal.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise DataFormatError(f"data directory not found: {directory}")
    present = {n for n in range(1, MAX_BATCHES + 1) if (directory / f"batch{n}.dat").exists()}
    if 1 not in present:
        raise DataFormatError(f"{directory}: batch1.dat (calibration batch) is required")
    last = max(present)
    missing = [n for n in range(1, last + 1) if n not in present]
    if missing:
        raise DataFormatError(
            f"{directory}: gap in batch sequence, missing "
            + ", ".join(f"batch{n}.dat" for n in missing)
        )
    batches = {}
    for n in range(1, last + 1):
        batch, _ = load_batch_file(directory / f"batch{n}.dat", n)
        batches[n] = batch
    return Dataset(batches)


def write_batch_file(path: Path | str, samples: Sequence[Sample]) -> None:
    """Write samples in the line grammar, atomically."""
    text = "\n".join(format_sample_line(s) for s in samples) + "\n"
    atomic_write_text(path, text)


def atomic_write_text(path: Path | str, text: str) -> None:
    """Write via a sibling temp file and rename, so readers never see partials."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


@dataclass(frozen=True)
class SyntheticConfig:
    """Shape of a generated drift dataset; a fixed seed pins every draw."""

    n_classes: int = 6
    dim: int = 16
    per_class: int = 50
    n_batches: int = 10
    drift_step: float = 0.5
    seed: int = 7

    def __post_init__(self):
        if self.n_classes < 2:
            raise ValueError(f"n_classes must be >= 2, got {self.n_classes}")
        if self.dim < 2:
            raise ValueError(f"dim must be >= 2, got {self.dim}")
        if self.per_class < 2:
            raise ValueError(f"per_class must be >= 2, got {self.per_class}")
        if self.n_batches < 1:
            raise ValueError(f"n_batches must be >= 1, got {self.n_batches}")


def generate_synthetic(config: SyntheticConfig) -> Dataset:
    """Generate Gaussian class clusters whose means translate batch by batch.

    Batch b is shifted by (b - 1) * drift_step along one fixed random unit
    direction, so the drift is a pure translation shared by every class.
    The draw sequence does not depend on drift_step, which makes datasets
    generated with different steps (same seed) exact translations of each
    other, batch for batch.
    """
    rng = np.random.default_rng(config.seed)
    direction = rng.standard_normal(config.dim)
    direction /= np.linalg.norm(direction)
    spread = CLASS_MEAN_SPREAD / math.sqrt(config.dim)
    class_means = rng.standard_normal((config.n_classes, config.dim)) * spread
    batches = {}
    for b in range(1, config.n_batches + 1):
        shift = (b - 1) * config.drift_step * direction
        samples = []
        for c in range(config.n_classes):
            points = class_means[c] + shift + rng.standard_normal((config.per_class, config.dim))
            samples.extend(Sample(row, c + 1, None, b) for row in points)
        batches[b] = Batch(b, tuple(samples))
    return Dataset(batches)


def dataset_checksum(dataset: Dataset) -> str:
    """SHA-256 over a canonical byte serialization of the dataset."""
    h = hashlib.sha256()
    for bid in dataset.batch_ids:
        batch = dataset.batch(bid)
        h.update(struct.pack("<ii", bid, len(batch)))
        for s in batch.samples:
            conc = s.concentration if s.concentration is not None else math.nan
            h.update(struct.pack("<id", s.label, conc))
            h.update(np.ascontiguousarray(s.features, dtype=np.float64).tobytes())
    return h.hexdigest()
