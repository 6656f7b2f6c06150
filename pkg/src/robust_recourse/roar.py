"""Gradient-descent baseline for robust recourse.

Alternates an exact inner maximization (the closed-form worst-case model for
the current point) with one subgradient step on the total cost. Unlike the
exact coordinate solver this only finds local optima: trajectories that
would need to cross a sign region can stall, which is precisely the gap the
comparison studies measure.

The cost term's subgradient uses ``numpy.sign`` (0 at the kink), so from an
exact tie the step ignores the cost; the best iterate seen, judged by
worst-case total cost, is returned rather than the last one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .adversary import Neighborhood, best_response
from .glm import (
    CostSpec,
    LossKind,
    RecourseQuery,
    eval_loss,
    eval_total_cost,
    loss_derivative,
    score,
    weighted_l1,
)
from .solver import RecoursePlan

__all__ = ["RoarConfig", "roar_recourse", "roar_recourse_batch"]


@dataclass(frozen=True)
class RoarConfig:
    learning_rate: float = 0.01
    max_iters: int = 2000
    tolerance: float = 1e-7
    seed: int = 0

    def __post_init__(self) -> None:
        if self.learning_rate <= 0.0:
            raise ValueError("learning_rate must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")


def roar_recourse(
    query: RecourseQuery,
    neighborhood: Neighborhood,
    cfg: RoarConfig | None = None,
) -> RecoursePlan:
    """Alternating maximization / subgradient descent on the worst-case cost."""
    cfg = cfg or RoarConfig()
    x = query.x0.copy()
    free = ~query.immutable_mask

    best_x = x.copy()
    best_val = eval_total_cost(query, x, best_response(neighborhood, x))
    for _ in range(cfg.max_iters):
        worst = best_response(neighborhood, x)
        s = score(worst, x)
        grad = loss_derivative(query.loss, s) * worst.weights
        grad = grad + query.lam * query.cost.weights * np.sign(x - query.x0)
        step = np.where(free, cfg.learning_rate * grad, 0.0)
        x = x - step
        val = eval_total_cost(query, x, best_response(neighborhood, x))
        if val < best_val:
            best_val = val
            best_x = x.copy()
        if np.max(np.abs(step)) <= cfg.tolerance:
            break

    return RecoursePlan(
        x_prime=best_x,
        l1_cost=weighted_l1(query, best_x),
        worst_case_total=best_val,
        trace=(),
    )


def roar_recourse_batch(
    x0s: np.ndarray,
    lam: float,
    neighborhood: Neighborhood,
    cfg: RoarConfig | None = None,
    loss: LossKind = LossKind.BCE,
    cost: CostSpec | None = None,
) -> np.ndarray:
    """Vectorized baseline over many starting points sharing one query shape.

    Returns the matrix of best-seen iterates, one row per start. Rows whose
    step drops below tolerance are frozen while the rest continue.
    """
    cfg = cfg or RoarConfig()
    x0s = np.asarray(x0s, dtype=float)
    m, d = x0s.shape
    base = neighborhood.base
    if base.dim != d:
        raise ValueError(f"model has {base.dim} weights, starts have {d} columns")
    cost_w = (cost or CostSpec.unit(d)).weights
    b_eff = base.intercept - (neighborhood.alpha if neighborhood.perturb_intercept else 0.0)

    def wc_scores(pts: np.ndarray) -> np.ndarray:
        # sign convention +1 at zero, matching best_response
        signs = np.where(pts >= 0.0, 1.0, -1.0)
        weights = base.weights - neighborhood.alpha * signs
        return (pts * weights).sum(axis=1) + b_eff

    def totals(pts: np.ndarray) -> np.ndarray:
        return eval_loss(loss, wc_scores(pts)) + lam * (np.abs(pts - x0s) @ cost_w)

    x = x0s.copy()
    best_x = x0s.copy()
    best_val = totals(x0s)
    alive = np.ones(m, dtype=bool)
    for _ in range(cfg.max_iters):
        if not alive.any():
            break
        signs = np.where(x >= 0.0, 1.0, -1.0)
        weights = base.weights - neighborhood.alpha * signs
        s = (x * weights).sum(axis=1) + b_eff
        grad = loss_derivative(loss, s)[:, None] * weights
        grad = grad + lam * cost_w * np.sign(x - x0s)
        step = np.where(alive[:, None], cfg.learning_rate * grad, 0.0)
        x = x - step
        val = totals(x)
        improved = val < best_val
        best_val = np.where(improved, val, best_val)
        best_x[improved] = x[improved]
        alive &= np.abs(step).max(axis=1) > cfg.tolerance
    return best_x
