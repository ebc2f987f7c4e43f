"""A single learnable attention weight per input feature.

The mask is a 1xD parameter row; its sigmoid image in (0,1) multiplies every
row of the feature matrix, so one shared vector gates all nodes.
"""

from __future__ import annotations

import numpy as np

from . import autodiff as ad
from .autodiff import Parameter, Value
from .errors import ConfigError, ShapeError


class AttentionMask:
    def __init__(self, raw: Parameter):
        if raw.data.shape[0] != 1:
            raise ShapeError(f"mask must be 1xD, got {raw.data.shape}")
        self.raw = raw

    @property
    def width(self) -> int:
        return self.raw.data.shape[1]

    def attention_value(self) -> Value:
        """Sigmoid of the raw mask, on the tape."""
        return ad.sigmoid(self.raw)

    def attention(self) -> np.ndarray:
        """Detached attention vector of length D."""
        return ad._sigmoid(self.raw.data).ravel().copy()


def init_mask(d: int, mode: str = "constant", value: float = 0.0,
              mean: float = 0.0, std: float = 1.0, seed: int = 0) -> AttentionMask:
    """Create the mask with raw entries either all equal or Gaussian-drawn.

    The default constant(0) start puts every attention weight at 0.5.
    """
    if d < 1:
        raise ConfigError(f"mask width must be >= 1, got {d}")
    if mode == "constant":
        raw = np.full((1, d), float(value))
    elif mode == "gaussian":
        if std < 0:
            raise ConfigError(f"gaussian mask init needs std >= 0, got {std}")
        raw = np.random.default_rng(seed).normal(mean, std, size=(1, d))
    else:
        raise ConfigError(f"unknown mask init mode {mode!r}")
    return AttentionMask(Parameter(raw, "mask.raw"))


def apply_mask(x: Value, mask: AttentionMask) -> Value:
    """Row-broadcast elementwise product X'[i][j] = sigmoid(raw)[j] * X[i][j]."""
    n, d = x.data.shape
    if d != mask.width:
        raise ShapeError(f"mask width {mask.width} does not match feature count {d}")
    return ad.mul(x, ad.broadcast_rows(mask.attention_value(), n))


def attention_stats(mask: AttentionMask, k: int) -> tuple[float, float, list[int]]:
    """Mean attention of the k strongest features vs. all others.

    Returns (avg_top_k, avg_others, top_k_indices); indices are in descending
    attention order with ties broken toward the lower feature index. When
    k == D there are no "others" and the second value is NaN.
    """
    d = mask.width
    if not 1 <= k <= d:
        raise ValueError(f"k must be in [1, {d}], got {k}")
    att = mask.attention()
    order = np.argsort(-att, kind="stable")
    top = order[:k]
    rest = order[k:]
    avg_top = float(att[top].mean())
    avg_others = float(att[rest].mean()) if rest.size else float("nan")
    return avg_top, avg_others, [int(i) for i in top]
