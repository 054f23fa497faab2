import os
from pathlib import Path

import numpy as np
import pytest

from driftbench.data_io import SyntheticConfig, generate_synthetic

CANONICAL_ENV = "DRIFTBENCH_DATA_DIR"


@pytest.fixture(scope="session")
def canonical_dir():
    """Directory with the real batch1.dat..batch10.dat files, if supplied."""
    path = os.environ.get(CANONICAL_ENV)
    if not path:
        pytest.skip(f"{CANONICAL_ENV} not set; canonical-dataset check skipped")
    path = Path(path)
    if not (path / "batch1.dat").exists():
        pytest.skip(f"{path} does not contain batch1.dat; canonical-dataset check skipped")
    return path


@pytest.fixture(scope="session")
def small_synth():
    """A compact drifting dataset shared by orchestration tests."""
    return generate_synthetic(
        SyntheticConfig(n_classes=4, dim=10, per_class=30, n_batches=4, drift_step=1.2, seed=23)
    )


def make_cluster_pair(rng, n=40, dim=6, separation=3.0, within_scale=1.0):
    """Two labeled Gaussian clusters split along the second axis."""
    offset = np.zeros(dim)
    offset[1] = separation / 2
    a = rng.normal(size=(n, dim)) * within_scale + offset
    b = rng.normal(size=(n, dim)) * within_scale - offset
    X = np.vstack([a, b])
    y = np.array([1] * n + [2] * n)
    return X, y
