"""Graph learning: embed nodes with a small MLP, then turn pairwise embedding
distances into a dense soft adjacency through a learnable sigmoid threshold.

Edge weights follow g_ij = 1 / (1 + exp(t * d_ij + theta)) with a positive
temperature t (softplus-reparameterized) and a free threshold theta; both are
trained together with the embedding weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import autodiff as ad
from .autodiff import Parameter, Value
from .errors import ConfigError

# keeps the distance gradient finite when two embeddings coincide
DIST_EPS = 1e-9


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


@dataclass
class GraphLearnerParams:
    w1: Parameter
    b1: Parameter
    w2: Parameter
    b2: Parameter
    temperature_raw: Parameter  # softplus of this is the temperature, so t > 0
    threshold: Parameter

    def temperature(self) -> Value:
        return ad.softplus(self.temperature_raw)

    def parameters(self) -> list[Parameter]:
        return [self.w1, self.b1, self.w2, self.b2, self.temperature_raw, self.threshold]


def init_graph_learner(d_in: int, hidden: int = 16, embed_dim: int = 8,
                       seed: int = 0, temperature_init: float = 2.0) -> GraphLearnerParams:
    rng = np.random.default_rng(seed)
    raw_t = math.log(math.expm1(temperature_init))  # softplus inverse
    return GraphLearnerParams(
        w1=Parameter(glorot_uniform(rng, d_in, hidden), "graph.w1"),
        b1=Parameter(np.zeros((1, hidden)), "graph.b1"),
        w2=Parameter(glorot_uniform(rng, hidden, embed_dim), "graph.w2"),
        b2=Parameter(np.zeros((1, embed_dim)), "graph.b2"),
        temperature_raw=Parameter([[raw_t]], "graph.temperature_raw"),
        threshold=Parameter([[0.0]], "graph.threshold"),
    )


@dataclass
class LatentGraph:
    """Dense soft adjacency with entries in (0,1); symmetric, and every
    diagonal entry equals sigmoid(-threshold) because self-distance is
    forced to exactly zero."""

    weights: Value

    @property
    def size(self) -> int:
        return self.weights.data.shape[0]


def embed(x: Value, params: GraphLearnerParams) -> Value:
    """Two affine layers, ReLU after the first, linear output."""
    d_in = params.w1.data.shape[0]
    if x.data.shape[1] != d_in:
        raise ConfigError(
            f"embedding expects {d_in} input features, got {x.data.shape[1]}"
        )
    n = x.data.shape[0]
    h = ad.relu(ad.add(ad.matmul(x, params.w1), ad.broadcast_rows(params.b1, n)))
    return ad.add(ad.matmul(h, params.w2), ad.broadcast_rows(params.b2, n))


def soft_adjacency(xhat: Value, temperature: Value, threshold: Value) -> LatentGraph:
    """Edge weights sigmoid(-(t * d + theta)) over pairwise embedding distances.

    d is sqrt(squared distance + DIST_EPS) off the diagonal; the diagonal is
    masked to exactly zero so self-edges depend only on the threshold.
    """
    n = xhat.data.shape[0]
    d = ad.sqrt(ad.shift(ad.pairwise_sq_dist(xhat), DIST_EPS))
    hollow = ad.constant(1.0 - np.eye(n))
    d = ad.mul(d, hollow)
    activation = ad.shift_by(ad.scale_by(d, temperature), threshold)
    return LatentGraph(weights=ad.sigmoid(ad.neg(activation)))


def snapshot_graph(graph: LatentGraph) -> np.ndarray:
    """Detached copy of the adjacency, safe to export."""
    return graph.weights.data.copy()
