"""Composite training objective: softmax cross-entropy on labeled nodes plus
two regularizers on the attention mask.

The size term sums the attention weights and pulls every one toward zero
unless the classification loss pushes back; the entropy term sums
-m*log(m) over attention weights, penalizing uncommitted values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import autodiff as ad
from .autodiff import Value
from .errors import ConfigError
from .feature_mask import AttentionMask

LOG_EPS = 1e-12

CONVENTIONS = ("prose", "eq1")


@dataclass
class LossWeights:
    """alpha balances classification against the mask terms; alpha1 and
    alpha2 weight the entropy and size terms inside the mask loss."""

    alpha: float = 0.6
    alpha1: float = 0.006
    alpha2: float = 0.02

    def validate(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.alpha1 < 0 or self.alpha2 < 0:
            raise ConfigError(
                f"alpha1 and alpha2 must be nonnegative, got {self.alpha1}, {self.alpha2}"
            )


def cross_entropy(logits: Value, labels: np.ndarray, node_subset) -> Value:
    """Mean over node_subset of -log softmax(logits)[i, labels[i]], natural log.

    The row-max shift is detached; that leaves both the value and the
    gradient of log-sum-exp exact while preventing overflow.
    """
    subset = np.asarray(node_subset, dtype=np.intp).ravel()
    if subset.size == 0:
        raise ValueError("cross_entropy: node subset is empty")
    n, c = logits.data.shape
    labels = np.asarray(labels)
    if labels.min() < 0 or labels.max() >= c:
        raise ValueError(f"labels must lie in [0, {c}), got range "
                         f"[{labels.min()}, {labels.max()}]")

    row_max = logits.data.max(axis=1, keepdims=True)
    shifted = ad.sub(logits, ad.constant(np.tile(row_max, (1, c))))
    log_norm = ad.log(ad.row_sum(ad.exp(shifted)))  # >= log(1), guard-free
    log_probs = ad.sub(shifted, ad.broadcast_cols(log_norm, c))

    pick = np.zeros((n, c))
    pick[subset, labels[subset]] = 1.0 / subset.size
    return ad.neg(ad.sum(ad.mul(log_probs, ad.constant(pick))))


def mask_size_loss(mask: AttentionMask) -> Value:
    """Sum of the attention weights."""
    return ad.sum(mask.attention_value())


def mask_entropy_loss(mask: AttentionMask) -> Value:
    """Sum of -m * log(m + eps) over attention weights m."""
    m = mask.attention_value()
    return ad.sum(ad.neg(ad.mul(m, ad.log(ad.shift(m, LOG_EPS)))))


def total_loss(class_loss: Value, entropy_loss: Value, size_loss: Value,
               weights: LossWeights, convention: str = "prose") -> Value:
    """Blend the three scalar terms.

    "prose" puts alpha on the classification term:
        L = alpha * Lc + (1 - alpha) * (alpha1 * entropy + alpha2 * size)
    "eq1" swaps the two outer coefficients.
    """
    if convention not in CONVENTIONS:
        raise ConfigError(f"loss convention must be one of {CONVENTIONS}, got {convention!r}")
    mask_term = ad.add(ad.scale(entropy_loss, weights.alpha1),
                       ad.scale(size_loss, weights.alpha2))
    if convention == "prose":
        return ad.add(ad.scale(class_loss, weights.alpha),
                      ad.scale(mask_term, 1.0 - weights.alpha))
    return ad.add(ad.scale(class_loss, 1.0 - weights.alpha),
                  ad.scale(mask_term, weights.alpha))
