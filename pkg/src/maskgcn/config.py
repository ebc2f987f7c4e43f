"""Dataclass configs for training runs and the CLI, with strict validation."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field, fields

from .errors import ConfigError
from .losses import CONVENTIONS, LossWeights

GLM_INPUTS = ("masked", "raw")
MASK_INITS = ("constant", "gaussian")


@dataclass
class TrainConfig:
    epochs: int = 600
    learning_rate: float = 0.1
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    loss: LossWeights = field(default_factory=LossWeights)
    loss_convention: str = "prose"
    glm_hidden: int = 16
    glm_embed: int = 8
    conv1_width: int = 32
    conv2_width: int = 16
    glm_input: str = "masked"
    mask_init: str = "constant"
    mask_init_value: float = 0.0
    mask_init_mean: float = 0.0
    mask_init_std: float = 1.0
    dropout: float = 0.0
    weight_decay: float = 0.0
    attention_top_k: int = 4
    folds: int = 10
    stratified: bool = True
    seed: int = 0

    def validate(self) -> None:
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.learning_rate <= 0:
            raise ConfigError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.glm_input not in GLM_INPUTS:
            raise ConfigError(f"glm_input must be one of {GLM_INPUTS}, got {self.glm_input!r}")
        if self.loss_convention not in CONVENTIONS:
            raise ConfigError(
                f"loss_convention must be one of {CONVENTIONS}, got {self.loss_convention!r}"
            )
        if self.mask_init not in MASK_INITS:
            raise ConfigError(f"mask_init must be one of {MASK_INITS}, got {self.mask_init!r}")
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError(f"dropout must be in [0, 1), got {self.dropout}")
        if self.folds < 2:
            raise ConfigError(f"folds must be >= 2, got {self.folds}")
        if self.attention_top_k < 1:
            raise ConfigError(f"attention_top_k must be >= 1, got {self.attention_top_k}")
        for name in ("glm_hidden", "glm_embed", "conv1_width", "conv2_width"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        self.loss.validate()


@dataclass
class SynthSpec:
    n: int = 300
    d: int = 50
    k_informative: int = 4
    c: int = 3
    class_sep: float = 1.0
    noise_sigma: float = 0.5
    cluster_sep: float = 1.0

    def validate(self) -> None:
        if self.n < 1 or self.d < 1:
            raise ConfigError(f"synth spec needs n >= 1 and d >= 1, got n={self.n}, d={self.d}")
        if self.k_informative > self.d:
            raise ConfigError(
                f"synth spec has k_informative={self.k_informative} > d={self.d}"
            )
        if self.c < 2:
            raise ConfigError(f"synth spec needs c >= 2, got {self.c}")


@dataclass
class RunConfig:
    train: TrainConfig = field(default_factory=TrainConfig)
    dataset_path: str | None = None
    synth: SynthSpec | None = None
    label_column: str = "label"
    out_dir: str = "runs/out"
    jobs: int = 1
    alphas: list[float] = field(default_factory=lambda: [0.0, 0.2, 0.4, 0.6, 0.8, 1.0])
    top_k: int = 4
    mask_path: str | None = None

    def validate(self, need_data: bool = True) -> None:
        self.train.validate()
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")
        if need_data and self.dataset_path is None and self.synth is None:
            raise ConfigError("one of 'dataset' or 'synth' is required")
        if self.synth is not None:
            self.synth.validate()
        for a in self.alphas:
            if not 0.0 <= a <= 1.0:
                raise ConfigError(f"alphas must lie in [0, 1], got {a}")
        if self.top_k < 1:
            raise ConfigError(f"top_k must be >= 1, got {self.top_k}")


# keys accepted in a JSON config file (flat, except the "synth" object)
_TRAIN_KEYS = {f.name for f in fields(TrainConfig)} - {"loss"}
_LOSS_KEYS = {f.name for f in fields(LossWeights)}
_RUN_KEYS = {"dataset", "synth", "label_column", "out", "jobs", "alphas", "top_k", "mask"}


def config_from_dict(obj: dict) -> RunConfig:
    """Build a RunConfig from a flat JSON-style dict, rejecting unknown keys."""
    if not isinstance(obj, dict):
        raise ConfigError(f"config root must be an object, got {type(obj).__name__}")
    known = _TRAIN_KEYS | _LOSS_KEYS | _RUN_KEYS
    unknown = sorted(set(obj) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {unknown}")

    train_kwargs = {k: obj[k] for k in _TRAIN_KEYS if k in obj}
    loss_kwargs = {k: obj[k] for k in _LOSS_KEYS if k in obj}
    train = TrainConfig(loss=LossWeights(**loss_kwargs), **train_kwargs)

    synth = None
    if "synth" in obj and obj["synth"] is not None:
        synth = synth_spec_from(obj["synth"])

    run = RunConfig(train=train, synth=synth)
    if "dataset" in obj and obj["dataset"] is not None:
        run.dataset_path = str(obj["dataset"])
    for key, attr in (("label_column", "label_column"), ("out", "out_dir"),
                      ("jobs", "jobs"), ("alphas", "alphas"),
                      ("top_k", "top_k"), ("mask", "mask_path")):
        if key in obj and obj[key] is not None:
            setattr(run, attr, obj[key])
    return run


def synth_spec_from(value) -> SynthSpec:
    """Accept the literal "default", or an object with SynthSpec fields."""
    if value == "default":
        return SynthSpec()
    if isinstance(value, str):
        try:
            value = json.loads(value)
        except json.JSONDecodeError:
            raise ConfigError(
                f"synth must be \"default\" or a JSON object, got {value!r}"
            ) from None
    if not isinstance(value, dict):
        raise ConfigError(f"synth must be \"default\" or an object, got {value!r}")
    allowed = {f.name for f in fields(SynthSpec)} | {"seed"}
    unknown = sorted(set(value) - allowed)
    if unknown:
        raise ConfigError(f"unknown synth keys: {unknown}")
    value = {k: v for k, v in value.items() if k != "seed"}
    return SynthSpec(**value)


def load_config_file(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None


def config_to_dict(run: RunConfig) -> dict:
    """Flat, JSON-ready echo of a validated config (for run artifacts)."""
    out = {}
    for f in fields(TrainConfig):
        if f.name == "loss":
            continue
        out[f.name] = getattr(run.train, f.name)
    for f in fields(LossWeights):
        out[f.name] = getattr(run.train.loss, f.name)
    out["dataset"] = run.dataset_path
    out["synth"] = dataclasses.asdict(run.synth) if run.synth is not None else None
    out["label_column"] = run.label_column
    out["jobs"] = run.jobs
    return out
