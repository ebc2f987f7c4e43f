"""Dataset ingestion, standardization, fold planning, feature selection, and
the planted-feature synthetic benchmark used for verification runs.

CSV format: UTF-8 with a header row, one row per node, one designated label
column, numeric feature cells; an empty cell is a missing value and gets the
column mean of the present values.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DataError


@dataclass(frozen=True, eq=False)
class Dataset:
    features: np.ndarray            # N x D float64
    labels: np.ndarray              # N ints in [0, class_count)
    feature_names: list[str]
    class_count: int
    label_values: list[str]         # original label tokens, by class index
    label_column: str = "label"

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True, eq=False)
class FoldPlan:
    k: int
    assignments: np.ndarray         # per-node fold index
    seed: int

    def test_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments != fold)

    def to_json(self) -> str:
        return json.dumps(
            {"seed": self.seed, "k": self.k, "assignments": [int(a) for a in self.assignments]}
        )

    @staticmethod
    def from_json(text: str) -> "FoldPlan":
        obj = json.loads(text)
        return FoldPlan(k=int(obj["k"]),
                        assignments=np.asarray(obj["assignments"], dtype=np.intp),
                        seed=int(obj["seed"]))


@dataclass(frozen=True)
class FeatureSelection:
    mode: str = "all"               # all | include | exclude
    names: tuple[str, ...] = field(default_factory=tuple)


def load_csv(path, label_column: str = "label") -> Dataset:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DataError(f"{path}: file is empty")
    header = rows[0]
    if label_column not in header:
        raise DataError(f"{path}: label column {label_column!r} not in header")
    label_idx = header.index(label_column)
    feature_names = [h for i, h in enumerate(header) if i != label_idx]
    if len(set(feature_names)) != len(feature_names):
        dupes = sorted({n for n in feature_names if feature_names.count(n) > 1})
        raise DataError(f"{path}: duplicate feature names {dupes}")

    n = len(rows) - 1
    if n == 0:
        raise DataError(f"{path}: no data rows")
    raw = np.full((n, len(feature_names)), np.nan)
    label_tokens: list[str] = []
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise DataError(f"{path}: row {r} has {len(row)} cells, expected {len(header)}")
        token = row[label_idx].strip()
        if token == "":
            raise DataError(f"{path}: row {r} is missing its label")
        label_tokens.append(token)
        col = 0
        for i, cell in enumerate(row):
            if i == label_idx:
                continue
            cell = cell.strip()
            if cell == "":
                col += 1
                continue
            try:
                raw[r - 2, col] = float(cell)
            except ValueError:
                raise DataError(
                    f"{path}: row {r}, column {header[i]!r}: cannot parse {cell!r}"
                ) from None
            col += 1

    # column-mean imputation for missing cells
    for j in range(raw.shape[1]):
        missing = np.isnan(raw[:, j])
        if missing.all():
            raise DataError(f"{path}: column {feature_names[j]!r} has no values")
        if missing.any():
            raw[missing, j] = raw[~missing, j].mean()

    distinct = sorted(set(label_tokens))
    to_index = {tok: i for i, tok in enumerate(distinct)}
    labels = np.array([to_index[t] for t in label_tokens], dtype=np.intp)
    return Dataset(features=raw, labels=labels, feature_names=feature_names,
                   class_count=len(distinct), label_values=distinct,
                   label_column=label_column)


def save_csv(dataset: Dataset, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(dataset.feature_names) + [dataset.label_column])
        for i in range(dataset.n):
            cells = [repr(float(v)) for v in dataset.features[i]]
            cells.append(dataset.label_values[dataset.labels[i]])
            writer.writerow(cells)


def standardize(dataset: Dataset, train_index=None) -> tuple[Dataset, np.ndarray, np.ndarray]:
    """Z-score each column with statistics from train_index rows only
    (population std); zero-variance columns become all-zero, std stays 0."""
    if train_index is None:
        train_index = np.arange(dataset.n)
    else:
        train_index = np.asarray(train_index, dtype=np.intp)
    ref = dataset.features[train_index]
    mean = ref.mean(axis=0)
    std = ref.std(axis=0)
    safe = np.where(std == 0.0, 1.0, std)
    feats = (dataset.features - mean) / safe
    feats[:, std == 0.0] = 0.0
    return replace(dataset, features=feats), mean, std


def make_folds(n: int, labels, k: int = 10, stratified: bool = True,
               seed: int = 0) -> FoldPlan:
    labels = np.asarray(labels)
    if k > n:
        raise ValueError(f"cannot make {k} folds from {n} nodes")
    if k < 2:
        raise ValueError(f"fold count must be at least 2, got {k}")
    rng = np.random.default_rng(seed)
    assignments = np.empty(n, dtype=np.intp)
    if stratified:
        counts = np.bincount(labels)
        if counts.min() < k:
            raise ValueError(
                f"stratified folding needs every class to have >= {k} members; "
                f"smallest class has {counts.min()}"
            )
        for cls in range(counts.size):
            members = np.flatnonzero(labels == cls)
            rng.shuffle(members)
            assignments[members] = np.arange(members.size) % k
    else:
        perm = rng.permutation(n)
        assignments[perm] = np.arange(n) % k
    return FoldPlan(k=k, assignments=assignments, seed=seed)


def synth_planted(n: int = 300, d: int = 50, k_informative: int = 4, c: int = 3,
                  class_sep: float = 1.0, noise_sigma: float = 0.5,
                  cluster_sep: float = 1.0, seed: int = 7
                  ) -> tuple[Dataset, list[int]]:
    """Synthetic cohort with known informative columns.

    Informative columns carry class-dependent means: a ladder spaced
    class_sep apart (sign alternating per column) plus a shared per-class
    offset of norm cluster_sep, then N(0, noise_sigma^2) noise. All other
    columns are pure N(0, 1). Returns the dataset and the sorted indices of
    the informative columns.
    """
    if k_informative > d:
        raise ValueError(f"k_informative={k_informative} exceeds d={d}")
    if c < 2:
        raise ValueError(f"need at least 2 classes, got {c}")
    rng = np.random.default_rng(seed)
    labels = np.arange(n, dtype=np.intp) % c
    rng.shuffle(labels)

    features = rng.standard_normal((n, d))
    ladder = (np.arange(c) - (c - 1) / 2.0)[:, None] * class_sep        # c x 1
    signs = (-1.0) ** np.arange(k_informative)
    offsets = rng.standard_normal((c, k_informative))
    norms = np.linalg.norm(offsets, axis=1, keepdims=True)
    offsets = cluster_sep * offsets / norms
    class_means = ladder * signs[None, :] + offsets                     # c x k

    positions = rng.permutation(d)[:k_informative]
    for j, col in enumerate(positions):
        noise = rng.normal(0.0, noise_sigma, n) if noise_sigma > 0 else np.zeros(n)
        features[:, col] = class_means[labels, j] + noise

    width = len(str(d - 1))
    names = [f"f{i:0{width}d}" for i in range(d)]
    dataset = Dataset(features=features, labels=labels, feature_names=names,
                      class_count=c, label_values=[str(i) for i in range(c)])
    return dataset, sorted(int(p) for p in positions)


def select_features(dataset: Dataset, selection: FeatureSelection) -> Dataset:
    """Column-filter the dataset, preserving the original column order."""
    if selection.mode == "all":
        return dataset
    unknown = [n for n in selection.names if n not in dataset.feature_names]
    if unknown:
        raise ValueError(f"unknown feature names: {unknown}")
    wanted = set(selection.names)
    if selection.mode == "include":
        keep = [i for i, n in enumerate(dataset.feature_names) if n in wanted]
    elif selection.mode == "exclude":
        keep = [i for i, n in enumerate(dataset.feature_names) if n not in wanted]
    else:
        raise ValueError(f"unknown selection mode {selection.mode!r}")
    if not keep:
        raise ValueError("selection removes every feature")
    return replace(dataset,
                   features=dataset.features[:, keep],
                   feature_names=[dataset.feature_names[i] for i in keep])
