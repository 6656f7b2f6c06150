"""Blended recourse under a trust parameter, and the scalar metrics.

The blended solver trades off two objectives: total cost under the worst
model in the ball (weight ``beta``) and total cost under a single predicted
model (weight ``1 - beta``). The endpoints delegate to the exact solvers;
interior values use a coordinate grid search, since mixing the two
adversaries breaks the exact solver's selection rule.

Metrics:

* ``robustness``: excess worst-case total cost over the optimal robust plan.
* ``consistency``: excess total cost under the prediction over the optimal
  consistent plan.
* ``smoothness``: realized regret when the recourse was computed from one
  prediction but a different model materializes.
* ``validity``: fraction of recourse points classified desirable.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .adversary import Neighborhood, best_response
from .glm import (
    ModelParams,
    RecourseQuery,
    eval_loss,
    eval_total_cost,
    score,
    weighted_l1,
)
from .models import BlackBoxScorer, GlmScorer, predict_label
from .solver import RecoursePlan, SolverConfig, consistent_recourse, optimal_robust_recourse

__all__ = [
    "TradeoffQuery",
    "TradeoffPoint",
    "default_step_grid",
    "blended_recourse",
    "robustness",
    "consistency",
    "smoothness",
    "validity",
    "pareto_frontier",
]


@dataclass(frozen=True)
class TradeoffQuery:
    """A recourse query plus a model ball, a prediction inside it, and a trust level."""

    query: RecourseQuery
    neighborhood: Neighborhood
    prediction: ModelParams
    beta: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must lie in [0, 1], got {self.beta}")
        base = self.neighborhood.base
        if self.prediction.dim != base.dim:
            raise ValueError("prediction and base model have different dimensions")
        slack = self.neighborhood.alpha + 1e-9
        dw = float(np.max(np.abs(self.prediction.weights - base.weights)))
        db = abs(self.prediction.intercept - base.intercept)
        db_slack = slack if self.neighborhood.perturb_intercept else 1e-9
        if dw > slack or db > db_slack:
            raise ValueError("prediction lies outside the model ball")


@dataclass(frozen=True)
class TradeoffPoint:
    beta: float
    robustness: float
    consistency: float
    l1_cost: float
    valid: bool | None = None


def default_step_grid() -> np.ndarray:
    """Signed candidate moves for the blended coordinate search."""
    mags = 0.01 * 2.0 ** np.arange(13)
    return np.concatenate([-mags[::-1], mags])


def _blended_value(tq: TradeoffQuery, x: np.ndarray) -> float:
    q, n = tq.query, tq.neighborhood
    ws = float(
        x @ n.base.weights
        - n.alpha * np.abs(x).sum()
        + n.base.intercept
        - (n.alpha if n.perturb_intercept else 0.0)
    )
    ps = score(tq.prediction, x)
    blend = tq.beta * eval_loss(q.loss, ws) + (1.0 - tq.beta) * eval_loss(q.loss, ps)
    return float(blend + q.lam * weighted_l1(q, x))


def blended_recourse(
    tq: TradeoffQuery,
    steps: np.ndarray | None = None,
    cfg: SolverConfig | None = None,
) -> RecoursePlan:
    """Minimize beta-weighted worst-case plus prediction total cost.

    beta = 1 and beta = 0 reduce to the robust and consistent objectives and
    are solved exactly. Otherwise: starting from x0, each round scans every
    mutable coordinate against the step grid and applies the single best
    move; stops when no move improves by more than 1e-9, or after 4 d rounds.
    """
    q, n = tq.query, tq.neighborhood
    if tq.beta == 1.0:
        return optimal_robust_recourse(q, n, cfg)
    if tq.beta == 0.0:
        plan = consistent_recourse(q, tq.prediction, cfg)
        worst = eval_total_cost(q, plan.x_prime, best_response(n, plan.x_prime))
        return dataclasses.replace(plan, worst_case_total=worst)

    steps = default_step_grid() if steps is None else np.asarray(steps, dtype=float)
    d = q.dim
    b_eff = n.base.intercept - (n.alpha if n.perturb_intercept else 0.0)

    def descend(x_start: np.ndarray) -> tuple[np.ndarray, float, list]:
        x = x_start.copy()
        current = _blended_value(tq, x)
        moves = []
        for _ in range(4 * d):
            best_gain, best_j, best_delta = 0.0, -1, 0.0
            dot0 = float(x @ n.base.weights)
            pdot = score(tq.prediction, x)
            abs_sum = float(np.abs(x).sum())
            cost_sum = weighted_l1(q, x)
            for j in range(d):
                if q.immutable_mask[j]:
                    continue
                xj_new = x[j] + steps
                ws = (
                    dot0
                    + n.base.weights[j] * (xj_new - x[j])
                    - n.alpha * (abs_sum - abs(x[j]) + np.abs(xj_new))
                    + b_eff
                )
                ps = pdot + tq.prediction.weights[j] * (xj_new - x[j])
                cost = cost_sum - q.cost.weights[j] * abs(x[j] - q.x0[j])
                cost += q.cost.weights[j] * np.abs(xj_new - q.x0[j])
                vals = (
                    tq.beta * eval_loss(q.loss, ws)
                    + (1.0 - tq.beta) * eval_loss(q.loss, ps)
                    + q.lam * cost
                )
                k = int(np.argmin(vals))
                gain = current - float(vals[k])
                if gain > best_gain:
                    best_gain, best_j, best_delta = gain, j, float(steps[k])
            if best_j < 0 or best_gain <= 1e-9:
                break
            x[best_j] += best_delta
            current -= best_gain
            moves.append((best_j, best_delta, False))
        return x, current, moves

    x, current, trace = descend(q.x0)
    # The step grid can stall short of a valley an exact endpoint solution
    # sits in; restart from either endpoint that already does better.
    for endpoint in (
        optimal_robust_recourse(q, n, cfg),
        consistent_recourse(q, tq.prediction, cfg),
    ):
        if _blended_value(tq, endpoint.x_prime) < current - 1e-12:
            x2, val2, moves2 = descend(endpoint.x_prime)
            if val2 < current - 1e-12:
                x, current = x2, val2
                trace = list(endpoint.trace) + moves2

    worst = eval_total_cost(q, x, best_response(n, x))
    return RecoursePlan(
        x_prime=x,
        l1_cost=weighted_l1(q, x),
        worst_case_total=worst,
        trace=tuple(trace),
    )


def robustness(
    query: RecourseQuery,
    neighborhood: Neighborhood,
    x_prime: np.ndarray,
    baseline: RecoursePlan | None = None,
    cfg: SolverConfig | None = None,
) -> float:
    """Worst-case total cost of x_prime minus that of the optimal robust plan.

    Pass ``baseline`` to reuse a precomputed robust plan across many points.
    """
    if baseline is None:
        baseline = optimal_robust_recourse(query, neighborhood, cfg)
    worst = eval_total_cost(query, np.asarray(x_prime, dtype=float), best_response(neighborhood, x_prime))
    return worst - baseline.worst_case_total


def consistency(
    query: RecourseQuery,
    prediction: ModelParams,
    x_prime: np.ndarray,
    baseline: RecoursePlan | None = None,
    cfg: SolverConfig | None = None,
) -> float:
    """Total cost of x_prime under the prediction minus the optimal value."""
    if baseline is None:
        baseline = consistent_recourse(query, prediction, cfg)
    return eval_total_cost(query, np.asarray(x_prime, dtype=float), prediction) - baseline.worst_case_total


def smoothness(
    query: RecourseQuery,
    neighborhood: Neighborhood,
    prediction_used: ModelParams,
    correct_prediction: ModelParams,
    beta: float,
    steps: np.ndarray | None = None,
    cfg: SolverConfig | None = None,
) -> float:
    """Regret under the model that materialized, given the prediction used.

    Zero when the prediction was correct and fully trusted (beta = 0);
    independent of the prediction at beta = 1.
    """
    tq = TradeoffQuery(query, neighborhood, prediction_used, beta)
    plan = blended_recourse(tq, steps, cfg)
    realized = eval_total_cost(query, plan.x_prime, correct_prediction)
    best = consistent_recourse(query, correct_prediction, cfg)
    return realized - best.worst_case_total


def validity(model: BlackBoxScorer | ModelParams, recourses: list) -> float:
    """Fraction of recourse points receiving the desirable label."""
    if not recourses:
        raise ValueError("validity needs at least one recourse point")
    scorer = GlmScorer(model) if isinstance(model, ModelParams) else model
    hits = sum(predict_label(scorer, np.asarray(x, dtype=float)) for x in recourses)
    return hits / len(recourses)


def pareto_frontier(
    tq: TradeoffQuery,
    betas: list,
    steps: np.ndarray | None = None,
    cfg: SolverConfig | None = None,
    label_model: ModelParams | None = None,
) -> list[TradeoffPoint]:
    """One TradeoffPoint per beta, with shared baselines for the two metrics."""
    robust_plan = optimal_robust_recourse(tq.query, tq.neighborhood, cfg)
    consistent_plan = consistent_recourse(tq.query, tq.prediction, cfg)
    points = []
    for beta in betas:
        plan = blended_recourse(dataclasses.replace(tq, beta=float(beta)), steps, cfg)
        valid = None
        if label_model is not None:
            valid = predict_label(GlmScorer(label_model), plan.x_prime) == 1
        points.append(
            TradeoffPoint(
                beta=float(beta),
                robustness=robustness(tq.query, tq.neighborhood, plan.x_prime, robust_plan),
                consistency=consistency(tq.query, tq.prediction, plan.x_prime, consistent_plan),
                l1_cost=plan.l1_cost,
                valid=valid,
            )
        )
    return points
