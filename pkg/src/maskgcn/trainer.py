"""Full-batch transductive training with Adam, plus the k-fold harness.

Every epoch runs a forward pass over the whole cohort; the classification
loss is restricted to the training nodes while the mask regularizers act
globally. One optimizer step per epoch, fixed epoch count, no early stopping.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import autodiff as ad
from .autodiff import Parameter
from .config import TrainConfig
from .data import Dataset, FoldPlan, make_folds, standardize
from .errors import TrainingDivergedError
from .feature_mask import attention_stats
from .losses import cross_entropy, mask_entropy_loss, mask_size_loss, total_loss
from .metrics import accuracy, macro_f1, macro_ovr_auc
from .model import Model


class Adam:
    """First/second-moment adaptive steps with bias correction."""

    def __init__(self, params: list[Parameter], lr: float = 0.1,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8,
                 weight_decay: float = 0.0):
        self.params = list(params)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.weight_decay = weight_decay
        self.step_count = 0
        self.m = [np.zeros_like(p.data) for p in self.params]
        self.v = [np.zeros_like(p.data) for p in self.params]

    def zero_grad(self) -> None:
        for p in self.params:
            p.zero_grad()

    def step(self) -> None:
        self.step_count += 1
        b1, b2 = self.beta1, self.beta2
        for i, p in enumerate(self.params):
            g = p.grad
            if self.weight_decay != 0.0:
                g = g + self.weight_decay * p.data
            self.m[i] = b1 * self.m[i] + (1.0 - b1) * g
            self.v[i] = b2 * self.v[i] + (1.0 - b2) * g * g
            m_hat = self.m[i] / (1.0 - b1 ** self.step_count)
            v_hat = self.v[i] / (1.0 - b2 ** self.step_count)
            p.data -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


@dataclass
class MetricRecord:
    accuracy: float
    auc: float
    f1: float
    avg_top_k: float
    avg_others: float
    loss_trace: list[tuple[float, float, float, float]]  # total, ce, entropy, size
    wall_time: float
    auc_excluded_classes: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        # wall_time is nondeterministic and loss traces go to their own CSVs;
        # both stay out of the serialized record
        return {
            "accuracy": self.accuracy,
            "auc": self.auc,
            "f1": self.f1,
            "avg_top_k": self.avg_top_k,
            "avg_others": self.avg_others,
            "auc_excluded_classes": self.auc_excluded_classes,
        }


_SUMMARY_METRICS = ("accuracy", "auc", "f1", "avg_top_k", "avg_others")


@dataclass
class CvSummary:
    records: list[MetricRecord]
    plan: FoldPlan
    models: list[Model] = field(default_factory=list, repr=False)

    def metric_mean(self, name: str) -> float:
        return float(np.mean([getattr(r, name) for r in self.records]))

    def metric_std(self, name: str) -> float:
        values = [getattr(r, name) for r in self.records]
        if len(values) < 2:
            return 0.0
        return float(np.std(values, ddof=1))

    def to_dict(self) -> dict:
        return {
            "folds": [r.to_dict() for r in self.records],
            "mean": {m: self.metric_mean(m) for m in _SUMMARY_METRICS},
            "std": {m: self.metric_std(m) for m in _SUMMARY_METRICS},
            "fold_plan": {
                "seed": self.plan.seed,
                "k": self.plan.k,
                "assignments": [int(a) for a in self.plan.assignments],
            },
        }


def fold_model_seed(master_seed: int, fold: int, k: int) -> int:
    """Deterministic per-fold model seed derived from the master seed."""
    return int(np.random.SeedSequence(master_seed).generate_state(k)[fold])


def train_fold(dataset: Dataset, plan: FoldPlan, fold: int, config: TrainConfig,
               model_seed: int | None = None) -> tuple[Model, MetricRecord]:
    """Train one model with the given fold held out; evaluate on it."""
    start = time.perf_counter()
    train_idx = plan.train_indices(fold)
    test_idx = plan.test_indices(fold)
    std_ds, _, _ = standardize(dataset, train_idx)

    if model_seed is None:
        model_seed = fold_model_seed(config.seed, fold, plan.k)
    model = Model.build(std_ds.d, std_ds.class_count, config, seed=model_seed)
    opt = Adam(model.parameters(), lr=config.learning_rate, beta1=config.beta1,
               beta2=config.beta2, eps=config.adam_eps,
               weight_decay=config.weight_decay)
    dropout_rng = np.random.default_rng(model_seed) if config.dropout > 0 else None

    trace = []
    for epoch in range(config.epochs):
        fwd = model.forward(std_ds.features, dropout=config.dropout, rng=dropout_rng)
        ce = cross_entropy(fwd.logits, std_ds.labels, train_idx)
        mel = mask_entropy_loss(model.mask)
        msl = mask_size_loss(model.mask)
        loss = total_loss(ce, mel, msl, config.loss, convention=config.loss_convention)
        if not np.isfinite(loss.item()):
            raise TrainingDivergedError(epoch=epoch, fold=fold)
        trace.append((loss.item(), ce.item(), mel.item(), msl.item()))
        opt.zero_grad()
        ad.backward(loss)
        opt.step()

    eval_logits = model.forward(std_ds.features).logits.data
    auc, excluded = macro_ovr_auc(eval_logits, std_ds.labels, test_idx)
    k = min(config.attention_top_k, std_ds.d)
    avg_top, avg_others, _ = attention_stats(model.mask, k)
    record = MetricRecord(
        accuracy=accuracy(eval_logits, std_ds.labels, test_idx),
        auc=auc,
        f1=macro_f1(eval_logits, std_ds.labels, test_idx),
        avg_top_k=avg_top,
        avg_others=avg_others,
        loss_trace=trace,
        wall_time=time.perf_counter() - start,
        auc_excluded_classes=excluded,
    )
    return model, record


def cross_validate(dataset: Dataset, config: TrainConfig, folds: int | None = None,
                   jobs: int = 1, keep_models: bool = False) -> CvSummary:
    """One independent model per fold; aggregation is ordered by fold index."""
    k = folds if folds is not None else config.folds
    plan = make_folds(dataset.n, dataset.labels, k=k,
                      stratified=config.stratified, seed=config.seed)

    def run(fold: int):
        try:
            return train_fold(dataset, plan, fold, config)
        except TrainingDivergedError as exc:
            raise TrainingDivergedError(epoch=exc.epoch, fold=fold) from None

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run, range(k)))
    else:
        results = [run(fold) for fold in range(k)]

    records = [rec for _, rec in results]
    models = [m for m, _ in results] if keep_models else []
    return CvSummary(records=records, plan=plan, models=models)
