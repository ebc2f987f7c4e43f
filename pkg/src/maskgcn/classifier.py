"""Graph-convolutional node classifier.

Two aggregation layers over the symmetric-normalized soft adjacency (with
self-loops added), each followed by ReLU, then a per-node linear head.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import autodiff as ad
from .autodiff import Parameter, Value
from .errors import ConfigError
from .latent_graph import LatentGraph, glorot_uniform


@dataclass
class ClassifierParams:
    conv1_w: Parameter
    conv2_w: Parameter
    fc_w: Parameter
    fc_b: Parameter

    def parameters(self) -> list[Parameter]:
        return [self.conv1_w, self.conv2_w, self.fc_w, self.fc_b]


def init_classifier(d_in: int, class_count: int, hidden1: int = 32,
                    hidden2: int = 16, seed: int = 0) -> ClassifierParams:
    ss = np.random.SeedSequence(seed)
    rngs = [np.random.default_rng(s) for s in ss.spawn(3)]
    return ClassifierParams(
        conv1_w=Parameter(glorot_uniform(rngs[0], d_in, hidden1), "clf.conv1_w"),
        conv2_w=Parameter(glorot_uniform(rngs[1], hidden1, hidden2), "clf.conv2_w"),
        fc_w=Parameter(glorot_uniform(rngs[2], hidden2, class_count), "clf.fc_w"),
        fc_b=Parameter(np.zeros((1, class_count)), "clf.fc_b"),
    )


def normalize_graph(graph: LatentGraph) -> Value:
    """Symmetric normalization D^{-1/2} (G + I) D^{-1/2} with self-loops.

    Degrees are at least 1 because of the added identity, so the inverse
    square root is always defined. Differentiable through the adjacency.
    """
    n = graph.size
    a_hat = ad.add(graph.weights, ad.constant(np.eye(n)))
    d_inv_sqrt = ad.rsqrt(ad.row_sum(a_hat))
    left = ad.broadcast_cols(d_inv_sqrt, n)
    right = ad.broadcast_rows(ad.transpose(d_inv_sqrt), n)
    return ad.mul(ad.mul(a_hat, left), right)


def forward(x_masked: Value, graph: LatentGraph, params: ClassifierParams,
            dropout: float = 0.0, rng: np.random.Generator | None = None) -> Value:
    """Logits for every node; gradients flow into the features, the mask,
    and the graph. Dropout (if any) is applied after each ReLU."""
    n, d = x_masked.data.shape
    if d != params.conv1_w.data.shape[0]:
        raise ConfigError(
            f"classifier expects {params.conv1_w.data.shape[0]} features, got {d}"
        )
    g_hat = normalize_graph(graph)
    h1 = ad.relu(ad.matmul(ad.matmul(g_hat, x_masked), params.conv1_w))
    h1 = _maybe_dropout(h1, dropout, rng)
    h2 = ad.relu(ad.matmul(ad.matmul(g_hat, h1), params.conv2_w))
    h2 = _maybe_dropout(h2, dropout, rng)
    return ad.add(ad.matmul(h2, params.fc_w), ad.broadcast_rows(params.fc_b, n))


def _maybe_dropout(h: Value, p: float, rng: np.random.Generator | None) -> Value:
    if p <= 0.0 or rng is None:
        return h
    keep = (rng.random(h.data.shape) >= p) / (1.0 - p)
    return ad.mul(h, ad.constant(keep))
