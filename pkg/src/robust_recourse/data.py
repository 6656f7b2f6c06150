"""Dataset synthesis, CSV ingestion, normalization, and fold splitting.

The synthetic generator draws labels uniformly and then one Gaussian block
for the features, so two specs differing only in class means consume the
random stream identically; a zero mean shift reproduces the unshifted data
bit for bit.

Normalization is z-score with the statistics kept alongside the data, so
recourse vectors computed in normalized space can be mapped back to raw
units. Constant features normalize to zero and are flagged.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DataError",
    "SyntheticSpec",
    "NormStats",
    "Dataset",
    "FoldPlan",
    "generate_synthetic",
    "shifted_synthetic",
    "ingest_csv",
    "compute_norm_stats",
    "apply_norm",
    "invert_norm",
    "normalize",
    "kfold",
]


class DataError(ValueError):
    """Malformed input data or an infeasible split request."""


@dataclass(frozen=True)
class SyntheticSpec:
    n_points: int = 1000
    mu0: tuple = (-2.0, -2.0)
    mu1: tuple = (2.0, 2.0)
    sigma: float = 0.5
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_points < 2:
            raise ValueError("n_points must be at least 2")
        if len(self.mu0) != len(self.mu1):
            raise ValueError("class means must have equal dimension")
        if self.sigma <= 0.0:
            raise ValueError("sigma must be positive")


@dataclass(frozen=True)
class NormStats:
    """Per-feature mean and stddev; constant features are divided by 1 and flagged."""

    mean: np.ndarray
    stddev: np.ndarray
    constant: np.ndarray

    def to_dict(self) -> dict:
        return {
            "mean": self.mean.tolist(),
            "stddev": self.stddev.tolist(),
            "constant": self.constant.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NormStats":
        return cls(
            mean=np.asarray(d["mean"], dtype=float),
            stddev=np.asarray(d["stddev"], dtype=float),
            constant=np.asarray(d["constant"], dtype=bool),
        )


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple = ()
    norm_stats: NormStats | None = None

    def __post_init__(self) -> None:
        feats = np.asarray(self.features, dtype=float)
        labs = np.asarray(self.labels)
        if feats.ndim != 2:
            raise DataError("features must be a 2-D matrix")
        if labs.shape != (feats.shape[0],):
            raise DataError("labels must align with feature rows")
        if not np.isfinite(feats).all():
            raise DataError("features contain non-finite entries")
        if not np.isin(labs, (0, 1)).all():
            raise DataError("labels must be 0 or 1")
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labs.astype(int))
        if not self.feature_names:
            object.__setattr__(
                self, "feature_names", tuple(f"x{i}" for i in range(feats.shape[1]))
            )

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    def to_json(self) -> str:
        payload = {
            "features": self.features.tolist(),
            "labels": self.labels.tolist(),
            "feature_names": list(self.feature_names),
            "norm_stats": self.norm_stats.to_dict() if self.norm_stats else None,
        }
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str) -> "Dataset":
        d = json.loads(text)
        stats = NormStats.from_dict(d["norm_stats"]) if d.get("norm_stats") else None
        return cls(
            features=np.asarray(d["features"], dtype=float),
            labels=np.asarray(d["labels"], dtype=int),
            feature_names=tuple(d.get("feature_names", ())),
            norm_stats=stats,
        )


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignment: np.ndarray
    seed: int = 0

    def test_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignment != fold)


def generate_synthetic(spec: SyntheticSpec) -> Dataset:
    """Uniform labels, then Gaussian features around the labeled class mean."""
    rng = np.random.default_rng(spec.seed)
    n = spec.n_points
    mu = np.vstack([spec.mu0, spec.mu1])
    d = mu.shape[1]
    labels = rng.integers(0, 2, size=n)
    noise = rng.standard_normal((n, d)) * np.sqrt(spec.sigma)
    return Dataset(features=mu[labels] + noise, labels=labels)


def shifted_synthetic(spec: SyntheticSpec, alpha_shift: float) -> Dataset:
    """Same draw as generate_synthetic with the class-0 mean moved along axis 0."""
    mu0 = (spec.mu0[0] + alpha_shift,) + tuple(spec.mu0[1:])
    shifted = SyntheticSpec(
        n_points=spec.n_points, mu0=mu0, mu1=spec.mu1, sigma=spec.sigma, seed=spec.seed
    )
    return generate_synthetic(shifted)


def ingest_csv(path: str, label_column: str, positive_label: str) -> Dataset:
    """Read a headered CSV into a Dataset, mapping one label value to 1.

    Rows with unparsable feature cells are reported by 1-based data row
    number; any such row fails the ingest.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        rows = list(reader)
    if label_column not in header:
        raise DataError(f"{path}: no column named {label_column!r}")
    if not rows:
        raise DataError(f"{path}: no data rows")

    label_idx = header.index(label_column)
    feature_names = tuple(name for i, name in enumerate(header) if i != label_idx)

    bad_rows = []
    features = []
    raw_labels = []
    for row_no, row in enumerate(rows, start=1):
        if len(row) != len(header):
            bad_rows.append(row_no)
            continue
        try:
            features.append([float(cell) for i, cell in enumerate(row) if i != label_idx])
        except ValueError:
            bad_rows.append(row_no)
            continue
        raw_labels.append(row[label_idx].strip())
    if bad_rows:
        listed = ", ".join(str(r) for r in bad_rows[:20])
        raise DataError(f"{path}: unparsable rows: {listed}")

    if positive_label not in raw_labels:
        raise DataError(f"{path}: positive label {positive_label!r} never occurs")
    labels = np.array([1 if lab == positive_label else 0 for lab in raw_labels])
    return Dataset(features=np.array(features), labels=labels, feature_names=feature_names)


def compute_norm_stats(features: np.ndarray) -> NormStats:
    features = np.asarray(features, dtype=float)
    mean = features.mean(axis=0)
    stddev = features.std(axis=0)
    constant = stddev == 0.0
    return NormStats(mean=mean, stddev=np.where(constant, 1.0, stddev), constant=constant)


def apply_norm(stats: NormStats, features: np.ndarray) -> np.ndarray:
    out = (np.asarray(features, dtype=float) - stats.mean) / stats.stddev
    if out.ndim == 1:
        return np.where(stats.constant, 0.0, out)
    return np.where(stats.constant[None, :], 0.0, out)


def invert_norm(stats: NormStats, x: np.ndarray) -> np.ndarray:
    """Map normalized coordinates back to raw units (constant features to their mean)."""
    x = np.asarray(x, dtype=float)
    raw = x * stats.stddev + stats.mean
    if raw.ndim == 1:
        return np.where(stats.constant, stats.mean, raw)
    return np.where(stats.constant[None, :], stats.mean[None, :], raw)


def normalize(ds: Dataset) -> Dataset:
    """Z-score the dataset on its own statistics and keep them for inversion."""
    stats = compute_norm_stats(ds.features)
    return Dataset(
        features=apply_norm(stats, ds.features),
        labels=ds.labels,
        feature_names=ds.feature_names,
        norm_stats=stats,
    )


def kfold(n: int, k: int = 5, seed: int = 0) -> FoldPlan:
    """Shuffled balanced fold assignment; fold sizes differ by at most one."""
    if k < 1:
        raise DataError("k must be at least 1")
    if k > n:
        raise DataError(f"cannot split {n} rows into {k} folds")
    perm = np.random.default_rng(seed).permutation(n)
    assignment = np.empty(n, dtype=int)
    assignment[perm] = np.arange(n) % k
    return FoldPlan(k=k, assignment=assignment, seed=seed)
