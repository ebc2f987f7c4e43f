"""Classification metrics: accuracy, macro F1, and macro one-vs-rest AUC
computed by the trapezoidal rule over ROC points (tie groups collapsed, so
the result equals concordant-pair counting exactly)."""

from __future__ import annotations

import numpy as np


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def accuracy(logits: np.ndarray, labels: np.ndarray, subset) -> float:
    subset = np.asarray(subset, dtype=np.intp)
    if subset.size == 0:
        raise ValueError("accuracy: empty node subset")
    pred = np.argmax(logits[subset], axis=1)  # ties resolve to the lowest class
    return float(np.mean(pred == labels[subset]))


def macro_f1(logits: np.ndarray, labels: np.ndarray, subset) -> float:
    subset = np.asarray(subset, dtype=np.intp)
    if subset.size == 0:
        raise ValueError("macro_f1: empty node subset")
    y = labels[subset]
    pred = np.argmax(logits[subset], axis=1)
    scores = []
    for cls in range(logits.shape[1]):
        tp = np.sum((pred == cls) & (y == cls))
        fp = np.sum((pred == cls) & (y != cls))
        fn = np.sum((pred != cls) & (y == cls))
        if tp + fp + fn == 0:
            continue  # class absent from both truth and predictions
        scores.append(2.0 * tp / (2.0 * tp + fp + fn))
    return float(np.mean(scores))


def binary_auc(scores: np.ndarray, positives: np.ndarray) -> float:
    """Area under the ROC curve, trapezoidal over score thresholds.

    Equal scores share one threshold, which credits tied positive/negative
    pairs with 1/2 each.
    """
    scores = np.asarray(scores, dtype=np.float64)
    positives = np.asarray(positives, dtype=bool)
    n_pos = int(positives.sum())
    n_neg = positives.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("binary_auc: need at least one positive and one negative")
    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    p = positives[order]
    tps = np.cumsum(p)
    fps = np.cumsum(~p)
    boundary = np.append(np.diff(s) != 0.0, True)  # last index of each tie group
    tpr = np.concatenate(([0.0], tps[boundary] / n_pos))
    fpr = np.concatenate(([0.0], fps[boundary] / n_neg))
    return float(np.sum(0.5 * (tpr[1:] + tpr[:-1]) * np.diff(fpr)))


def macro_ovr_auc(logits: np.ndarray, labels: np.ndarray, subset
                  ) -> tuple[float, list[int]]:
    """One-vs-rest AUC averaged over classes with both positives and
    negatives in the subset; returns (auc, excluded class indices)."""
    subset = np.asarray(subset, dtype=np.intp)
    if subset.size == 0:
        raise ValueError("macro_ovr_auc: empty node subset")
    probs = softmax(logits[subset])
    y = labels[subset]
    values = []
    excluded = []
    for cls in range(logits.shape[1]):
        pos = y == cls
        if pos.all() or not pos.any():
            excluded.append(cls)
            continue
        values.append(binary_auc(probs[:, cls], pos))
    if not values:
        raise ValueError("macro_ovr_auc: no class has both positives and negatives")
    return float(np.mean(values)), excluded
