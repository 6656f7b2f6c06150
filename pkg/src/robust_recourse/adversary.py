"""Worst-case model computations inside an L-infinity parameter ball.

Three views of the adversary live here. ``best_response`` is the closed form:
against a fixed input the score-minimizing model shifts every weight by the
full budget, in the direction opposite the input's sign, and always lowers
the intercept (its multiplier is the constant +1). ``corner_oracle`` checks
the same thing by brute force over all sign patterns and is used to certify
the closed form. ``worst_case_shared_model`` finds a single model that
degrades a whole batch of recourses at once, via projected gradient ascent,
for validity experiments.

A Neighborhood may be built with ``perturb_intercept=False`` for problems
posed without an attackable intercept term; the intercept then stays fixed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .glm import DimensionMismatchError, LossKind, ModelParams, eval_loss, sigmoid, sign

__all__ = ["Neighborhood", "AscentConfig", "best_response", "corner_oracle", "worst_case_shared_model"]


@dataclass(frozen=True)
class Neighborhood:
    """Ball of models within ``alpha`` of ``base`` in every coordinate."""

    base: ModelParams
    alpha: float
    perturb_intercept: bool = True

    def __post_init__(self):
        object.__setattr__(self, "alpha", float(self.alpha))
        if self.alpha < 0.0:
            raise ValueError("alpha must be nonnegative")


@dataclass(frozen=True)
class AscentConfig:
    learning_rate: float = 0.001
    steps: int = 1000
    moment_decay: tuple = (0.9, 0.999)
    epsilon: float = 1e-8
    seed: int = 0


def best_response(neighborhood: Neighborhood, x) -> ModelParams:
    """Model in the ball minimizing the score of x, in closed form.

    Each weight moves by alpha against the sign of the matching input entry
    (sign(0) counts as positive); the intercept moves down by alpha when it
    participates in the ball.
    """
    base = neighborhood.base
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.size != base.dim:
        raise DimensionMismatchError(
            f"model has {base.dim} weights, input has {x.size} features"
        )
    weights = base.weights - neighborhood.alpha * sign(x)
    intercept = base.intercept
    if neighborhood.perturb_intercept:
        intercept -= neighborhood.alpha
    return ModelParams(weights, intercept)


def corner_oracle(neighborhood: Neighborhood, x) -> ModelParams:
    """Enumerate every +/-alpha corner of the ball, return a score minimizer.

    Ties are broken in favor of the lexicographically smallest sign pattern
    (weights first, then the intercept when it participates).
    """
    base = neighborhood.base
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.size != base.dim:
        raise DimensionMismatchError(
            f"model has {base.dim} weights, input has {x.size} features"
        )
    n_dims = base.dim + (1 if neighborhood.perturb_intercept else 0)
    if n_dims > 20:
        raise ValueError(f"corner enumeration needs 2^{n_dims} models; dimension too large")

    best = None
    best_value = np.inf
    for pattern in itertools.product((-1.0, 1.0), repeat=n_dims):
        weights = base.weights + neighborhood.alpha * np.asarray(pattern[: base.dim])
        intercept = base.intercept
        if neighborhood.perturb_intercept:
            intercept += neighborhood.alpha * pattern[-1]
        value = float(weights @ x + intercept)
        if value < best_value:  # first hit wins ties: patterns iterate in lex order
            best_value = value
            best = ModelParams(weights, intercept)
    return best


def worst_case_shared_model(
    neighborhood: Neighborhood, recourses, cfg: AscentConfig = AscentConfig()
) -> ModelParams:
    """One model in the ball that hurts a whole recourse set.

    Maximizes the mean BCE loss of the set toward the desirable label with
    adaptive-moment gradient ascent, projecting every coordinate back into
    the ball after each step. The iterate with the best objective seen is
    returned, so the result is never worse than the ball's base model.
    """
    points = np.atleast_2d(np.asarray(recourses, dtype=float))
    if points.size == 0:
        raise ValueError("recourse list is empty")
    base = neighborhood.base
    if points.shape[1] != base.dim:
        raise DimensionMismatchError(
            f"model has {base.dim} weights, recourses have {points.shape[1]} features"
        )

    theta0 = np.append(base.weights, base.intercept)
    lo = theta0 - neighborhood.alpha
    hi = theta0 + neighborhood.alpha
    if not neighborhood.perturb_intercept:
        lo[-1] = hi[-1] = theta0[-1]

    design = np.hstack([points, np.ones((points.shape[0], 1))])

    def objective(theta):
        return float(np.mean(eval_loss(LossKind.BCE, design @ theta)))

    beta1, beta2 = cfg.moment_decay
    theta = theta0.copy()
    m = np.zeros_like(theta)
    v = np.zeros_like(theta)
    best_theta = theta.copy()
    best_value = objective(theta)

    for step in range(1, cfg.steps + 1):
        scores = design @ theta
        # ascent direction: d/dtheta mean log(1 + exp(-s)) = -mean sigmoid(-s) x
        grad = -(design.T @ sigmoid(-scores)) / points.shape[0]
        m = beta1 * m + (1.0 - beta1) * grad
        v = beta2 * v + (1.0 - beta2) * grad * grad
        m_hat = m / (1.0 - beta1**step)
        v_hat = v / (1.0 - beta2**step)
        theta = theta + cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.epsilon)
        theta = np.clip(theta, lo, hi)
        value = objective(theta)
        if value > best_value:
            best_value = value
            best_theta = theta.copy()

    return ModelParams(best_theta[:-1], best_theta[-1])
