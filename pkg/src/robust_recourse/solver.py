"""Exact recourse solvers and a brute-force certification oracle.

``optimal_robust_recourse`` minimizes the worst-case total cost over an
L-infinity ball of models by greedy coordinate moves: it keeps the running
worst-case model in closed form, always moves the coordinate with the
largest cost-adjusted weight magnitude, and solves each one-dimensional
subproblem exactly. A per-coordinate region flag tracks which orthant the
coordinate currently occupies so that a move through zero hands off cleanly
to the flipped worst-case weight instead of oscillating at the boundary;
coordinates whose flipped weight cannot keep helping are retired. Every
applied move is recorded in the returned plan's trace.

``consistent_recourse`` is the same procedure with a zero-radius ball, which
minimizes the total cost under a single predicted model exactly.

``minimax_oracle`` certifies the solver on small instances by exhaustive
grid search over inputs, with the inner maximum taken over every corner of
the model ball. Optional refinement passes re-grid around the incumbent with
a ten times finer step; they assume the worst-case objective is convex in
the input, which holds for the BCE loss (it is a maximum of convex
functions) but not for the clamped squared loss.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .adversary import Neighborhood, best_response
from .glm import (
    DimensionMismatchError,
    LossKind,
    ModelParams,
    RecourseQuery,
    eval_loss,
    eval_total_cost,
    logit,
    sigmoid,
    sign,
    weighted_l1,
)

__all__ = [
    "SolverConfig",
    "GridSpec",
    "TraceStep",
    "RecoursePlan",
    "solve_coordinate_step",
    "optimal_robust_recourse",
    "consistent_recourse",
    "minimax_oracle",
]

# Score treated as "fully on the desirable side" when lam = 0 leaves the
# improvement direction unbounded; BCE loss there is below 1e-13.
SCORE_CAP = 30.0


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for the exact solvers.

    ``max_passes`` bounds the coordinate loop and defaults to 2 d + 2 when
    unset: at most one boundary crossing plus one interior move per
    coordinate, a final zero-length check, and one spare.
    """

    step_tolerance: float = 1e-10
    max_passes: int | None = None
    use_closed_form_logistic: bool = True

    def __post_init__(self) -> None:
        if self.step_tolerance <= 0.0:
            raise ValueError("step_tolerance must be positive")
        if self.max_passes is not None and self.max_passes < 1:
            raise ValueError("max_passes must be at least 1")


@dataclass(frozen=True)
class GridSpec:
    """Search grid for the certification oracle.

    The base grid spans ``x0 +/- half_range`` at ``step`` spacing (when step
    is None: 0.01 in one dimension, 0.05 otherwise). Each refinement level
    re-grids 51 points per axis across incumbent +/- 2.5 steps, shrinking
    the step tenfold.
    """

    half_range: float = 5.0
    step: float | None = None
    refine_levels: int = 0

    def __post_init__(self) -> None:
        if self.half_range <= 0.0:
            raise ValueError("half_range must be positive")
        if self.step is not None and self.step <= 0.0:
            raise ValueError("step must be positive")
        if self.refine_levels < 0:
            raise ValueError("refine_levels must be nonnegative")

    def resolved_step(self, dim: int) -> float:
        if self.step is not None:
            return float(self.step)
        return 0.01 if dim == 1 else 0.05


class TraceStep(NamedTuple):
    index: int
    delta: float
    adversary_updated: bool


@dataclass(frozen=True)
class RecoursePlan:
    """Solver output: the recourse, its costs, and the moves that built it."""

    x_prime: np.ndarray
    l1_cost: float
    worst_case_total: float
    trace: tuple
    saturated: bool = False

    def to_dict(self) -> dict:
        return {
            "x_prime": self.x_prime.tolist(),
            "l1_cost": self.l1_cost,
            "worst_case_total": self.worst_case_total,
            "saturated": self.saturated,
            "trace": [[int(i), float(d), bool(u)] for i, d, u in self.trace],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def solve_coordinate_step(
    lam: float,
    s0: float,
    slope: float,
    loss: LossKind = LossKind.BCE,
    cfg: SolverConfig | None = None,
) -> tuple[float, bool]:
    """Best nonnegative move along one coordinate, in unit-cost steps.

    Minimizes eval_loss(loss, s0 + slope * t) + lam * t over t >= 0, where
    ``slope`` is the coordinate's weight magnitude divided by its cost
    weight, so one unit of t costs exactly lam. Returns (t, saturated);
    saturated means the loss had no finite minimizer (lam too small for BCE)
    and t was chosen to push the score to SCORE_CAP.
    """
    cfg = cfg or SolverConfig()
    if slope <= 0.0:
        return 0.0, False

    if loss is LossKind.BCE:
        if s0 >= SCORE_CAP:
            return 0.0, False
        # Marginal loss reduction at t=0 is slope * sigmoid(-s0); below lam
        # the cost term wins immediately.
        if lam >= slope * sigmoid(-s0):
            return 0.0, False
        if lam <= 0.0 or lam / slope < sigmoid(-SCORE_CAP):
            return (SCORE_CAP - s0) / slope, True
        if cfg.use_closed_form_logistic:
            target = logit(1.0 - lam / slope)
            return max(0.0, (target - s0) / slope), False
        return _bisect_bce(lam, s0, slope, cfg.step_tolerance)

    if loss is LossKind.SQUARED:
        # Piecewise: flat loss 1 below score 0, parabola on (0, 1), flat 0
        # beyond. Not convex through the lower kink, so compare candidates.
        if s0 >= 1.0:
            return 0.0, False
        candidates = [0.0]
        t_full = (1.0 - s0) / slope  # reach score 1, loss 0
        candidates.append(t_full)
        s_station = 1.0 - lam / (2.0 * slope)
        if max(s0, 0.0) < s_station < 1.0:
            candidates.append((s_station - s0) / slope)
        best_t = 0.0
        best_val = eval_loss(loss, s0)
        for t in candidates:
            if t <= 0.0:
                continue
            val = eval_loss(loss, s0 + slope * t) + lam * t
            if val < best_val - 1e-15:
                best_val = val
                best_t = t
        return best_t, False

    raise ValueError(f"unknown loss {loss!r}")  # pragma: no cover


def _bisect_bce(lam: float, s0: float, slope: float, tol: float) -> tuple[float, bool]:
    """Root of the step derivative lam - slope * sigmoid(-(s0 + slope t))."""

    def deriv(t: float) -> float:
        return lam - slope * sigmoid(-(s0 + slope * t))

    hi = 1.0
    t_cap = (SCORE_CAP - s0) / slope
    while deriv(hi) < 0.0:
        hi *= 2.0
        if hi >= t_cap:
            if deriv(t_cap) < 0.0:
                return t_cap, True
            hi = t_cap
            break
    lo = 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if deriv(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi), False


def optimal_robust_recourse(
    query: RecourseQuery,
    neighborhood: Neighborhood,
    cfg: SolverConfig | None = None,
) -> RecoursePlan:
    """Recourse minimizing the worst-case total cost over the model ball.

    Greedy coordinate scheme: track the worst-case model for the current
    point in closed form, repeatedly pick the active coordinate with the
    largest weight magnitude per unit cost, and apply its exact
    one-dimensional optimum. A move that would push a coordinate through
    zero is clamped there; the coordinate stays active, with its region flag
    flipped, only when the worst-case weight of the far orthant keeps
    pointing in the travel direction.
    """
    cfg = cfg or SolverConfig()
    base = neighborhood.base
    alpha = neighborhood.alpha
    d = query.dim
    if base.dim != d:
        raise DimensionMismatchError(f"model has {base.dim} weights, query has {d} features")

    x = query.x0.copy()
    cost_w = query.cost.weights
    intercept = base.intercept - (alpha if neighborhood.perturb_intercept else 0.0)

    # Worst-case weights for the orthant each coordinate currently occupies.
    adv = base.weights - alpha * sign(x)
    active = ~query.immutable_mask
    for i in range(d):
        if not active[i]:
            continue
        if x[i] == 0.0:
            if abs(base.weights[i]) > alpha:
                # Zero start: the coordinate will move with the sign of its
                # base weight, so the adversary shrinks that weight.
                adv[i] = base.weights[i] - alpha * sign(base.weights[i])
            else:
                active[i] = False  # adversary can cancel any move outright

    max_passes = cfg.max_passes if cfg.max_passes is not None else 2 * d + 2
    trace: list[TraceStep] = []
    saturated = False

    for _ in range(max_passes):
        if not active.any():
            break
        slopes = np.where(active, np.abs(adv) / cost_w, -np.inf)
        j = int(np.argmax(slopes))  # ties resolve to the lowest index
        slope = float(slopes[j])
        if slope <= 0.0:
            break
        s_cur = float(x @ adv + intercept)
        t, sat = solve_coordinate_step(query.lam, s_cur, slope, query.loss, cfg)
        if t <= cfg.step_tolerance:
            # All other active slopes are no larger, so their steps from this
            # score are zero too; sub-tolerance steps are rounding noise.
            break
        direction = sign(adv[j])
        move = t / cost_w[j]
        toward_zero = x[j] * direction < 0.0
        if toward_zero and move > abs(x[j]):
            # Crossing: stop at zero and hand off to the far orthant.
            delta = -x[j]
            x[j] = 0.0
            flipped = base.weights[j] + alpha * sign(query.x0[j])
            if flipped != 0.0 and sign(flipped) == direction:
                adv[j] = flipped
            else:
                active[j] = False  # far-orthant weight points backward
            trace.append(TraceStep(j, float(delta), True))
        else:
            x[j] += direction * move
            saturated = saturated or sat
            trace.append(TraceStep(j, float(direction * move), False))
            # An interior optimum kills every remaining coordinate: their
            # slopes are no larger, so their best step from here is zero.

    worst = best_response(neighborhood, x)
    return RecoursePlan(
        x_prime=x,
        l1_cost=weighted_l1(query, x),
        worst_case_total=eval_total_cost(query, x, worst),
        trace=tuple(trace),
        saturated=saturated,
    )


def consistent_recourse(
    query: RecourseQuery,
    prediction: ModelParams,
    cfg: SolverConfig | None = None,
) -> RecoursePlan:
    """Minimize the total cost under one predicted model exactly.

    This is the robust solver with a zero-radius ball: crossings keep the
    same model weight, so a coordinate simply continues through zero.
    """
    return optimal_robust_recourse(query, Neighborhood(prediction, 0.0), cfg)


def minimax_oracle(
    query: RecourseQuery,
    neighborhood: Neighborhood,
    grid: GridSpec | None = None,
) -> tuple[np.ndarray, float]:
    """Exhaustive-search reference value for the robust objective.

    Scans an axis-aligned grid of candidate inputs; the inner maximum is
    taken over all corner models of the ball, which is exact because both
    losses are non-increasing in the score and the score is linear in the
    model. Only for low-dimensional certification runs.
    """
    grid = grid or GridSpec()
    d = query.dim
    if d > 3:
        raise ValueError("oracle supports at most 3 mutable dimensions")
    if neighborhood.base.dim != d:
        raise DimensionMismatchError(
            f"model has {neighborhood.base.dim} weights, query has {d} features"
        )

    free = [i for i in range(d) if not query.immutable_mask[i]]
    step = grid.resolved_step(len(free) or 1)

    corner_w, corner_b = _corner_models(neighborhood)

    def axis(i: int, lo: float, hi: float, n_pts: int) -> np.ndarray:
        pts = np.linspace(lo, hi, n_pts)
        # The objective has kinks at 0 and at the start point; snap them onto
        # the axis so the scan can land exactly on kink optima.
        extra = [v for v in (0.0, float(query.x0[i])) if lo <= v <= hi]
        return np.unique(np.concatenate([pts, extra])) if extra else pts

    n_pts = max(2, int(round(2.0 * grid.half_range / step)) + 1)
    axes = [
        axis(i, float(query.x0[i]) - grid.half_range, float(query.x0[i]) + grid.half_range, n_pts)
        for i in free
    ]
    x_best, val_best = _grid_scan(query, corner_w, corner_b, free, axes)
    h = step
    for _ in range(grid.refine_levels):
        axes = [axis(i, float(x_best[i]) - 2.5 * h, float(x_best[i]) + 2.5 * h, 51) for i in free]
        x_cand, val_cand = _grid_scan(query, corner_w, corner_b, free, axes)
        if val_cand < val_best:
            x_best, val_best = x_cand, val_cand
        h /= 10.0
    return x_best, val_best


def _corner_models(neighborhood: Neighborhood) -> tuple[np.ndarray, np.ndarray]:
    """All +/-alpha corners as a weight matrix and intercept vector."""
    base = neighborhood.base
    d = base.dim
    n_dims = d + (1 if neighborhood.perturb_intercept else 0)
    patterns = np.array(
        [[1.0 if (k >> bit) & 1 else -1.0 for bit in range(n_dims)] for k in range(2**n_dims)]
    )
    weights = base.weights + neighborhood.alpha * patterns[:, :d]
    if neighborhood.perturb_intercept:
        intercepts = base.intercept + neighborhood.alpha * patterns[:, -1]
    else:
        intercepts = np.full(len(patterns), base.intercept)
    return weights, intercepts


def _grid_scan(query, corner_w, corner_b, free, axes) -> tuple[np.ndarray, float]:
    mesh = np.meshgrid(*axes, indexing="ij") if axes else []
    n_pts = mesh[0].size if mesh else 1
    pts = np.tile(query.x0, (n_pts, 1))
    for col, m in zip(free, mesh):
        pts[:, col] = m.ravel()

    best_val = math.inf
    best_x = query.x0.copy()
    chunk = 200_000
    for start in range(0, n_pts, chunk):
        block = pts[start : start + chunk]
        scores = block @ corner_w.T + corner_b
        worst_loss = eval_loss(query.loss, scores).max(axis=1)
        costs = query.lam * (np.abs(block - query.x0) @ query.cost.weights)
        totals = worst_loss + costs
        k = int(np.argmin(totals))
        if totals[k] < best_val:
            best_val = float(totals[k])
            best_x = block[k].copy()
    return best_x, best_val
