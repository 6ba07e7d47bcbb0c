import math

import numpy as np
import pytest

from radloc.costs import BaselineCost, ConvexCost, Quadratic2, assemble_quadratic
from radloc.errors import CollinearAnchors, DegenerateCost, NonFinite
from radloc.scenario import SPURIOUS_INITIAL, SPURIOUS_POINT, Scenario
from radloc.solver import (
    TRAJECTORY_FULL,
    TRAJECTORY_STRIDE,
    SolverConfig,
    auto_step,
    default_grad_tol,
    descend,
    descend_batch,
    is_spurious,
    solve_direct,
)

from conftest import random_scenario


def test_convex_descent_reaches_source(spurious):
    res = descend(ConvexCost.from_scenario(spurious), SolverConfig(mu=0.001, initial=SPURIOUS_INITIAL))
    assert res.converged
    assert np.hypot(*res.estimate) <= 1e-3
    assert res.grad_norm <= res.grad_tol


def test_baseline_descent_stalls_at_spurious_point(spurious):
    res = descend(BaselineCost.from_scenario(spurious), SolverConfig(mu=0.001, initial=SPURIOUS_INITIAL))
    assert res.converged
    assert np.hypot(*(res.estimate - SPURIOUS_POINT)) <= 1e-3
    assert is_spurious(res.converged, res.estimate, [0, 0], res.grad_tol)


def test_start_at_source_takes_zero_iterations(spurious):
    res = descend(ConvexCost.from_scenario(spurious), SolverConfig(initial=[0, 0]))
    assert res.iterations == 0 and res.converged


def test_max_iters_cap(spurious):
    res = descend(ConvexCost.from_scenario(spurious), SolverConfig(initial=[3, 2], max_iters=5))
    assert res.iterations == 5 and not res.converged


def test_solver_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(mu=0)
    with pytest.raises(ValueError):
        SolverConfig(max_iters=0)
    with pytest.raises(ValueError):
        SolverConfig(grad_tol=-1)


def test_default_tolerance_is_relative_to_rhs(spurious):
    c = ConvexCost.from_scenario(Scenario.noise_free([[0, 0], [100, 0], [0, 100]], [30, 40]))
    b = assemble_quadratic(c).rhs
    assert default_grad_tol(c) == pytest.approx(1e-8 * (1 + np.hypot(*b)))


def test_nonfinite_raised_for_huge_step(spurious):
    with pytest.raises(NonFinite):
        descend(BaselineCost.from_scenario(spurious), SolverConfig(mu=10.0, initial=[30, 20]))


def test_trajectory_decimation(spurious):
    res = descend(ConvexCost.from_scenario(spurious), SolverConfig(initial=[3, 2], record_trajectory=True))
    it = res.trajectory_iters
    assert it[0] == 0 and it[-1] == res.iterations
    assert np.array_equal(it[: TRAJECTORY_FULL + 1], np.arange(TRAJECTORY_FULL + 1))
    tail = it[TRAJECTORY_FULL + 1 : -1]
    assert np.all(tail % TRAJECTORY_STRIDE == 0)
    np.testing.assert_array_equal(res.trajectory[-1], res.estimate)


def test_auto_step_examples(spurious):
    q = assemble_quadratic(ConvexCost.from_scenario(spurious))
    assert auto_step(q, 0.9) == pytest.approx(1.8 / (6 + 2 * math.sqrt(5)), rel=1e-12)
    assert auto_step(q) == pytest.approx(0.17188, abs=1e-5)
    assert auto_step(Quadratic2(np.eye(2), np.zeros(2)), 1.0) == 2.0
    with pytest.raises(DegenerateCost):
        auto_step(Quadratic2(np.zeros((2, 2)), np.zeros(2)))


def test_solve_direct(spurious):
    q = assemble_quadratic(ConvexCost.from_scenario(spurious))
    np.testing.assert_allclose(solve_direct(q), [0, 0], atol=1e-12)
    rng = np.random.default_rng(1)
    for _ in range(100):
        sc = random_scenario(rng)
        np.testing.assert_allclose(solve_direct(assemble_quadratic(ConvexCost.from_scenario(sc))), sc.source, atol=1e-9)


def test_solve_direct_collinear():
    sc = Scenario.noise_free([[0, 0], [1, 0], [5, 0]], [2, 3])
    with pytest.raises(CollinearAnchors):
        solve_direct(assemble_quadratic(ConvexCost.from_scenario(sc)))


def test_monotone_descent_with_auto_step():
    rng = np.random.default_rng(21)
    for _ in range(100):
        sc = random_scenario(rng)
        c = ConvexCost.from_scenario(sc)
        res = descend(c, SolverConfig(mu=auto_step(assemble_quadratic(c)), initial=rng.uniform(-100, 100, 2),
                                      max_iters=2000, record_trajectory=True))
        vals = c.value(res.trajectory)
        assert np.all(np.diff(vals) <= 1e-12 * vals[:-1] + 1e-300)


def test_descent_is_deterministic(spurious):
    cfg = SolverConfig(initial=[3, 2], record_trajectory=True)
    a = descend(BaselineCost.from_scenario(spurious), cfg)
    b = descend(BaselineCost.from_scenario(spurious), cfg)
    assert np.array_equal(a.estimate, b.estimate) and a.iterations == b.iterations
    assert np.array_equal(a.trajectory, b.trajectory)


def test_batch_entries_independent_of_batch_composition():
    rng = np.random.default_rng(8)
    anchors = np.array([[-2.0, -1.0], [-1.0, -3.0], [-1.0, 1.0], [1.0, 0.0]])
    src = rng.uniform(-10, 10, (12, 2))
    y0 = rng.uniform(-10, 10, (12, 2))
    d = np.hypot(src[:, None, 0] - anchors[:, 0], src[:, None, 1] - anchors[:, 1])
    cost = BaselineCost.from_ranges(anchors, d)
    full = descend_batch(cost, y0, 0.001, None, 20000)
    for j in (0, 5, 11):
        one = descend_batch(cost.subset([j]), y0[[j]], 0.001, None, 20000)
        assert np.array_equal(one.estimates[0], full.estimates[j])
        assert one.iterations[0] == full.iterations[j]


def test_batch_flags_nonfinite_entries_only():
    anchors = np.array([[1.0, 1.0], [1.0, 3.0], [3.0, 1.0]])
    d = np.hypot(*anchors.T)
    cost = BaselineCost.from_ranges(anchors, np.stack([d, d]))
    res = descend_batch(cost, np.array([[3.0, 2.0], [300.0, 200.0]]), 0.001, None, 10000)
    assert not res.nonfinite[0] and res.converged[0]
    assert res.nonfinite[1] and np.all(np.isfinite(res.estimates[1]))


def test_descend_accepts_plain_gradient_object():
    class Bowl:
        def value(self, y):
            y = np.asarray(y)
            return 0.5 * (y * y).sum(-1)

        def gradient(self, y):
            return np.asarray(y, dtype=float)

    res = descend(Bowl(), SolverConfig(mu=0.5, initial=[4, -2], grad_tol=1e-12))
    assert res.converged and np.hypot(*res.estimate) <= 1e-12
