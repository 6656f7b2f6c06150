import numpy as np
import pytest

from robust_recourse.adversary import Neighborhood
from robust_recourse.glm import ModelParams, RecourseQuery
from robust_recourse.roar import RoarConfig, roar_recourse, roar_recourse_batch
from robust_recourse.solver import optimal_robust_recourse
from robust_recourse.tradeoff import robustness


def _query(x0, lam, **kw):
    return RecourseQuery(x0=np.asarray(x0, dtype=float), lam=lam, **kw)


def _nbhd(weights, alpha, intercept=0.0, **kw):
    return Neighborhood(ModelParams(weights=np.asarray(weights, dtype=float), intercept=intercept), alpha, **kw)


def test_large_lam_stays_put():
    # Every worst-case weight is below lam, so each step's cost subgradient
    # dominates and the best iterate is the start itself.
    n = _nbhd([1.0, -0.5], 0.3)
    plan = roar_recourse(_query([0.4, -0.2], 2.0), n)
    np.testing.assert_array_equal(plan.x_prime, [0.4, -0.2])
    assert plan.l1_cost == 0.0


def test_worked_instance_converges():
    plan = roar_recourse(
        _query([0.0], 0.1),
        _nbhd([1.0], 0.5, perturb_intercept=False),
        RoarConfig(max_iters=20000),
    )
    assert plan.x_prime[0] == pytest.approx(2.772588722239781, abs=1e-2)
    assert plan.worst_case_total == pytest.approx(0.5004024235381879, abs=1e-4)


def test_never_beats_exact_solver():
    rng = np.random.default_rng(30)
    for _ in range(50):
        d = int(rng.integers(1, 4))
        q = _query(rng.uniform(-2, 2, d), float(rng.uniform(0.05, 0.8)))
        n = _nbhd(rng.uniform(-2, 2, d), float(rng.uniform(0.0, 0.6)), intercept=float(rng.uniform(-1, 1)))
        plan = roar_recourse(q, n)
        gap = robustness(q, n, plan.x_prime)
        assert gap >= -1e-9
        assert plan.worst_case_total >= optimal_robust_recourse(q, n).worst_case_total - 1e-9


def test_immutable_respected():
    q = _query([1.0, 0.0], 0.05, immutable_mask=[True, False])
    plan = roar_recourse(q, _nbhd([1.0, 1.0], 0.2))
    assert plan.x_prime[0] == 1.0


def test_batch_matches_single():
    rng = np.random.default_rng(31)
    n = _nbhd(rng.uniform(-1.5, 1.5, 3), 0.3, intercept=0.2)
    starts = rng.uniform(-2, 2, (8, 3))
    lam = 0.15
    cfg = RoarConfig(max_iters=500)
    got = roar_recourse_batch(starts, lam, n, cfg)
    for row, x0 in zip(got, starts):
        single = roar_recourse(_query(x0, lam), n, cfg)
        np.testing.assert_allclose(row, single.x_prime, atol=1e-12)


def test_batch_shape_validation():
    with pytest.raises(ValueError):
        roar_recourse_batch(np.zeros((4, 2)), 0.1, _nbhd([1.0, 1.0, 1.0], 0.1))


def test_config_validation():
    with pytest.raises(ValueError):
        RoarConfig(learning_rate=0.0)
    with pytest.raises(ValueError):
        RoarConfig(max_iters=0)
