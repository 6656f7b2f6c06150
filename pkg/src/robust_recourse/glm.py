"""Scoring and cost primitives for recourse on generalized linear classifiers.

A classifier is evaluated as g(h(x)) where h(x) = weights . x + intercept is a
linear score and g is a non-decreasing link mapping scores to probabilities.
A candidate recourse x' for an instance x0 is judged by a total cost: a loss
term measuring how far the score is from the desirable side of the decision
boundary, plus ``lam`` times a weighted L1 modification cost. Every solver,
baseline, and metric in this package is written against these helpers.

Sign convention: ``sign`` is two-valued with sign(0) = +1. The worst-case
model computations depend on this convention, so it is defined once here and
used everywhere.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

__all__ = [
    "DimensionMismatchError",
    "LinkKind",
    "LossKind",
    "ModelParams",
    "CostSpec",
    "RecourseQuery",
    "sign",
    "sigmoid",
    "logit",
    "score",
    "eval_loss",
    "loss_derivative",
    "weighted_l1",
    "eval_total_cost",
    "nonconvex_worst_case_example",
]


class DimensionMismatchError(ValueError):
    """A vector's length does not match the model or query dimension."""


class LinkKind(Enum):
    """Map from score to probability: logistic sigmoid or identity clamped to [0, 1]."""

    SIGMOID = "sigmoid"
    IDENTITY = "identity"


class LossKind(Enum):
    """Loss on the score toward the desirable label.

    BCE is log(1 + exp(-s)); SQUARED is (p - 1)^2 on the clamped-identity
    probability p = clip(s, 0, 1). Both are non-increasing in the score,
    which the worst-case computations rely on.
    """

    BCE = "bce"
    SQUARED = "squared"


def sign(v):
    """Two-valued sign: +1.0 for v >= 0, -1.0 otherwise. Elementwise on arrays."""
    out = np.where(np.asarray(v, dtype=float) >= 0.0, 1.0, -1.0)
    if np.ndim(v) == 0:
        return float(out)
    return out


def sigmoid(s):
    """Numerically stable logistic function, scalar or elementwise."""
    s_arr = np.asarray(s, dtype=float)
    out = np.exp(-np.logaddexp(0.0, -s_arr))
    if np.ndim(s) == 0:
        return float(out)
    return out


def logit(p: float) -> float:
    """Inverse of the sigmoid; p must lie in (0, 1)."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"logit requires p in (0, 1), got {p}")
    return math.log(p / (1.0 - p))


@dataclass(frozen=True)
class ModelParams:
    """Linear score parameters: h(x) = weights . x + intercept."""

    weights: np.ndarray
    intercept: float = 0.0

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "intercept", float(self.intercept))
        if w.ndim != 1 or w.size < 1:
            raise ValueError("weights must be a non-empty 1-D vector")
        if not (np.all(np.isfinite(w)) and math.isfinite(self.intercept)):
            raise ValueError("model parameters must be finite")

    @property
    def dim(self) -> int:
        return int(self.weights.size)

    def to_dict(self) -> dict:
        return {"weights": self.weights.tolist(), "intercept": self.intercept}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "ModelParams":
        return cls(np.asarray(d["weights"], dtype=float), float(d["intercept"]))

    @classmethod
    def from_json(cls, text: str) -> "ModelParams":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class CostSpec:
    """Per-feature positive cost weights for the L1 modification term."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        object.__setattr__(self, "weights", w)
        if w.size < 1 or not np.all(np.isfinite(w)) or np.any(w <= 0.0):
            raise ValueError("cost weights must be finite and strictly positive")

    @classmethod
    def unit(cls, dim: int) -> "CostSpec":
        return cls(np.ones(dim))


@dataclass(frozen=True)
class RecourseQuery:
    """One recourse problem: starting point, regularizer, loss, costs, mask."""

    x0: np.ndarray
    lam: float
    loss: LossKind = LossKind.BCE
    cost: CostSpec | None = None
    immutable_mask: np.ndarray | None = None

    def __post_init__(self):
        x0 = np.atleast_1d(np.asarray(self.x0, dtype=float))
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "lam", float(self.lam))
        if not np.all(np.isfinite(x0)):
            raise ValueError("x0 must be finite")
        if self.lam < 0.0:
            raise ValueError("lam must be nonnegative")
        if self.cost is None:
            object.__setattr__(self, "cost", CostSpec.unit(x0.size))
        if self.cost.weights.size != x0.size:
            raise DimensionMismatchError(
                f"cost has {self.cost.weights.size} weights, x0 has {x0.size} features"
            )
        if self.immutable_mask is None:
            object.__setattr__(self, "immutable_mask", np.zeros(x0.size, dtype=bool))
        else:
            mask = np.atleast_1d(np.asarray(self.immutable_mask, dtype=bool))
            if mask.size != x0.size:
                raise DimensionMismatchError(
                    f"mask has {mask.size} entries, x0 has {x0.size} features"
                )
            object.__setattr__(self, "immutable_mask", mask)

    @property
    def dim(self) -> int:
        return int(self.x0.size)


def score(params: ModelParams, x) -> float:
    """Linear score weights . x + intercept."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.size != params.dim:
        raise DimensionMismatchError(
            f"model has {params.dim} weights, input has {x.size} features"
        )
    return float(params.weights @ x + params.intercept)


def eval_loss(loss: LossKind, s):
    """Loss at score s toward the desirable label. Scalar or elementwise."""
    s_arr = np.asarray(s, dtype=float)
    if loss is LossKind.BCE:
        out = np.logaddexp(0.0, -s_arr)
    elif loss is LossKind.SQUARED:
        out = np.square(np.clip(s_arr, 0.0, 1.0) - 1.0)
    else:  # pragma: no cover - enum is closed
        raise ValueError(f"unknown loss {loss!r}")
    if np.ndim(s) == 0:
        return float(out)
    return out


def loss_derivative(loss: LossKind, s):
    """Derivative of eval_loss in the score (subgradient 0 at kinks)."""
    s_arr = np.asarray(s, dtype=float)
    if loss is LossKind.BCE:
        out = -sigmoid(-s_arr)
    elif loss is LossKind.SQUARED:
        out = np.where((s_arr > 0.0) & (s_arr < 1.0), 2.0 * (s_arr - 1.0), 0.0)
    else:  # pragma: no cover
        raise ValueError(f"unknown loss {loss!r}")
    if np.ndim(s) == 0:
        return float(out)
    return out


def weighted_l1(query: RecourseQuery, x_prime) -> float:
    """Weighted L1 modification cost of x' relative to the query's x0."""
    x_prime = np.atleast_1d(np.asarray(x_prime, dtype=float))
    if x_prime.size != query.dim:
        raise DimensionMismatchError(
            f"query has {query.dim} features, x' has {x_prime.size}"
        )
    return float(query.cost.weights @ np.abs(x_prime - query.x0))


def eval_total_cost(query: RecourseQuery, x_prime, params: ModelParams) -> float:
    """Loss at the score of x' plus lam times the weighted L1 cost."""
    return eval_loss(query.loss, score(params, x_prime)) + query.lam * weighted_l1(
        query, x_prime
    )


def nonconvex_worst_case_example(x: float) -> float:
    """Worst-case total cost of a documented 1-D instance; not convex.

    The instance starts at x0 = 1 with a squared-style loss, a model whose
    weight and intercept are both 0, a shift budget of 0.5 on each parameter
    (the input carries a constant +1 intercept feature), and lam = 1. Against
    the score-minimizing shifted model the total cost reduces to

        exp(1 - |x|) + |x - 1|.

    This function is not convex: its value at 0 (e + 1) exceeds the average
    of its values at -1 and 1 (which is 2), so the worst-case objective of a
    recourse problem need not be convex even for a linear model. Exact
    solvers therefore cannot rely on descent alone; see the solver module.
    """
    return math.exp(1.0 - abs(x)) + abs(x - 1.0)
