"""Classification metrics: accuracy and multiclass-averaged F1."""

from __future__ import annotations

import numpy as np

F1_AVERAGES = ("macro", "weighted")


def _check_pair(predicted, actual) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(predicted)
    a = np.asarray(actual)
    if p.shape != a.shape or p.ndim != 1:
        raise ValueError(f"label vectors must be equal-length 1-D, got {p.shape} vs {a.shape}")
    if p.shape[0] == 0:
        raise ValueError("label vectors must be non-empty")
    return p, a


def accuracy(predicted, actual) -> float:
    """Fraction of exact matches."""
    p, a = _check_pair(predicted, actual)
    return float(np.count_nonzero(p == a)) / p.shape[0]


def f1_score(predicted, actual, average: str = "macro") -> float:
    """Averaged per-class F1 over classes occurring in either vector.

    Per-class precision/recall with a zero denominator count as 0.  "macro"
    weighs classes equally; "weighted" weighs by true-class support (classes
    absent from ``actual`` get weight 0).
    """
    if average not in F1_AVERAGES:
        raise ValueError(f"average must be one of {F1_AVERAGES}, got '{average}'")
    p, a = _check_pair(predicted, actual)
    classes = np.unique(np.concatenate([a, p]))
    f1 = np.zeros(classes.shape[0])
    support = np.zeros(classes.shape[0])
    for i, c in enumerate(classes):
        tp = np.count_nonzero((p == c) & (a == c))
        fp = np.count_nonzero((p == c) & (a != c))
        fn = np.count_nonzero((p != c) & (a == c))
        prec = tp / (tp + fp) if tp + fp else 0.0
        rec = tp / (tp + fn) if tp + fn else 0.0
        f1[i] = 2 * prec * rec / (prec + rec) if prec + rec else 0.0
        support[i] = tp + fn
    if average == "macro":
        return float(f1.mean())
    return float((f1 * support).sum() / support.sum())


def macro_f1(predicted, actual) -> float:
    """Unweighted mean of per-class F1 scores."""
    return f1_score(predicted, actual, "macro")
