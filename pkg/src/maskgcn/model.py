"""The full model: attention mask -> latent graph -> graph-conv classifier."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import autodiff as ad
from . import classifier as clf
from .autodiff import Parameter, Value
from .config import TrainConfig
from .errors import ConfigError
from .feature_mask import AttentionMask, apply_mask, init_mask
from .latent_graph import (
    GraphLearnerParams,
    LatentGraph,
    embed,
    init_graph_learner,
    snapshot_graph,
    soft_adjacency,
)


@dataclass
class ForwardPass:
    logits: Value
    graph: LatentGraph
    masked: Value


class Model:
    """Owns all trainable parameters for one cohort and wires the forward pass.

    The mask always multiplies the classifier input; the graph learner sees
    either the masked or the raw features depending on ``glm_input``.
    """

    def __init__(self, mask: AttentionMask, graph_params: GraphLearnerParams,
                 clf_params: clf.ClassifierParams, glm_input: str = "masked"):
        self.mask = mask
        self.graph_params = graph_params
        self.clf_params = clf_params
        self.glm_input = glm_input
        names = [p.name for p in self.parameters()]
        if len(set(names)) != len(names):
            raise ConfigError(f"duplicate parameter names: {sorted(names)}")

    @classmethod
    def build(cls, d: int, class_count: int, config: TrainConfig,
              seed: int | None = None) -> "Model":
        seed = config.seed if seed is None else seed
        mask_seed, graph_seed, clf_seed = (
            int(s) for s in np.random.SeedSequence(seed).generate_state(3)
        )
        mask = init_mask(d, mode=config.mask_init, value=config.mask_init_value,
                         mean=config.mask_init_mean, std=config.mask_init_std,
                         seed=mask_seed)
        graph_params = init_graph_learner(d, hidden=config.glm_hidden,
                                          embed_dim=config.glm_embed, seed=graph_seed)
        clf_params = clf.init_classifier(d, class_count, hidden1=config.conv1_width,
                                         hidden2=config.conv2_width, seed=clf_seed)
        return cls(mask, graph_params, clf_params, glm_input=config.glm_input)

    def parameters(self) -> list[Parameter]:
        return ([self.mask.raw]
                + self.graph_params.parameters()
                + self.clf_params.parameters())

    def forward(self, features: np.ndarray, dropout: float = 0.0,
                rng: np.random.Generator | None = None) -> ForwardPass:
        x = ad.constant(features, op="features")
        masked = apply_mask(x, self.mask)
        graph_in = masked if self.glm_input == "masked" else x
        xhat = embed(graph_in, self.graph_params)
        graph = soft_adjacency(xhat, self.graph_params.temperature(),
                               self.graph_params.threshold)
        logits = clf.forward(masked, graph, self.clf_params, dropout=dropout, rng=rng)
        return ForwardPass(logits=logits, graph=graph, masked=masked)

    def attention(self) -> np.ndarray:
        return self.mask.attention()

    def adjacency_snapshot(self, features: np.ndarray) -> np.ndarray:
        return snapshot_graph(self.forward(features).graph)
