"""Interpretability artifacts: per-feature attention paired with label
correlation, input-ablation comparisons, and adjacency snapshots with
class-block summaries."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .config import TrainConfig
from .data import Dataset, FeatureSelection, select_features
from .model import Model
from .trainer import CvSummary, cross_validate


@dataclass
class FeatureReportRow:
    feature_name: str
    attention: float
    pearson_r: float | None  # None when the correlation is undefined


def pearson(feature_column, labels) -> float | None:
    """Pearson r between a feature column and integer class labels; None when
    either side has zero variance (undefined, deliberately not coerced to 0)."""
    x = np.asarray(feature_column, dtype=np.float64).ravel()
    y = np.asarray(labels, dtype=np.float64).ravel()
    if x.size != y.size:
        raise ValueError(f"length mismatch: {x.size} values vs {y.size} labels")
    if x.size < 2:
        raise ValueError("need at least 2 observations")
    xc = x - x.mean()
    yc = y - y.mean()
    vx = np.sqrt(np.sum(xc * xc))
    vy = np.sqrt(np.sum(yc * yc))
    if vx == 0.0 or vy == 0.0:
        return None
    return float(np.sum(xc * yc) / (vx * vy))


def _rows_from_attention(attention: np.ndarray, dataset: Dataset) -> list[FeatureReportRow]:
    rows = [
        FeatureReportRow(
            feature_name=name,
            attention=float(attention[j]),
            pearson_r=pearson(dataset.features[:, j], dataset.labels),
        )
        for j, name in enumerate(dataset.feature_names)
    ]
    rows.sort(key=lambda r: (-r.attention, r.feature_name))
    return rows


def feature_report(model: Model, dataset: Dataset) -> list[FeatureReportRow]:
    """One row per feature: the model's attention and the feature's label
    correlation, sorted by attention descending (ties by name)."""
    return _rows_from_attention(model.attention(), dataset)


def averaged_feature_report(models: list[Model], dataset: Dataset) -> list[FeatureReportRow]:
    """Feature report with attention averaged across fold models."""
    attention = np.mean([m.attention() for m in models], axis=0)
    return _rows_from_attention(attention, dataset)


def write_feature_csv(rows: list[FeatureReportRow], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["feature", "attention", "pearson_r"])
        for row in rows:
            r = "" if row.pearson_r is None else repr(row.pearson_r)
            writer.writerow([row.feature_name, repr(row.attention), r])


def read_feature_csv(path) -> list[FeatureReportRow]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["feature", "attention", "pearson_r"]:
            raise ValueError(f"{path}: unexpected header {header}")
        rows = []
        for name, att, r in reader:
            rows.append(FeatureReportRow(name, float(att),
                                         None if r == "" else float(r)))
    return rows


def ablation_run(dataset: Dataset, selections: list[tuple[str, FeatureSelection]],
                 config: TrainConfig, folds: int | None = None,
                 jobs: int = 1) -> dict[str, CvSummary]:
    """Cross-validate once per feature selection, same seeds throughout."""
    results: dict[str, CvSummary] = {}
    for name, selection in selections:
        subset = select_features(dataset, selection)
        results[name] = cross_validate(subset, config, folds=folds, jobs=jobs)
    return results


def class_contiguous_order(labels: np.ndarray) -> np.ndarray:
    """Node permutation grouping same-class nodes together (stable within class)."""
    return np.argsort(labels, kind="stable")


def block_means(adjacency: np.ndarray, labels: np.ndarray) -> tuple[float, float]:
    """Mean edge weight within classes vs. across classes, self-pairs excluded."""
    labels = np.asarray(labels)
    same = labels[:, None] == labels[None, :]
    off_diag = ~np.eye(labels.size, dtype=bool)
    intra = float(adjacency[same & off_diag].mean())
    inter = float(adjacency[~same].mean())
    return intra, inter


def adjacency_export(model: Model, features: np.ndarray, labels: np.ndarray
                     ) -> tuple[np.ndarray, float, float]:
    """Snapshot the latent graph with nodes reordered class-contiguously;
    returns (matrix, intra-class mean, inter-class mean)."""
    snapshot = model.adjacency_snapshot(features)
    order = class_contiguous_order(labels)
    reordered = snapshot[np.ix_(order, order)]
    intra, inter = block_means(snapshot, labels)
    return reordered, intra, inter


def write_adjacency_csv(matrix: np.ndarray, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        for row in matrix:
            writer.writerow([repr(float(v)) for v in row])


def read_adjacency_csv(path) -> np.ndarray:
    with open(path, newline="", encoding="utf-8") as fh:
        return np.array([[float(c) for c in row] for row in csv.reader(fh)])
