import numpy as np
import pytest

from pfol import geometry
from pfol.fw_solver import iteration_bound, solve_with_gap
from pfol.geometry import ball, box, l1_ball
from pfol.objective import fresh
from pfol.rng import Rng


def random_objective(rng, n, alpha=1.0, terms=5, T0=1.0):
    obj = fresh(alpha, T0, rng.ball(n))
    for _ in range(terms):
        obj = obj.accumulate(rng.gaussians(n), rng.ball(n), 0.5 + float(rng.uniforms(1)[0]))
    return obj


def test_immediate_stop_costs_one_lmo():
    x1 = np.array([0.2, -0.1])
    obj = fresh(1.0, 2.0, x1)  # minimized at the interior point x1
    report = solve_with_gap(obj, ball(2), 1e-9, x1, max_iter=100)
    assert report.converged
    assert report.iterations == 1
    assert report.lmo_calls == 1
    assert report.final_gap <= 1e-9
    assert np.array_equal(report.x_out, x1)


def test_descends_centered_quadratic_to_origin():
    obj = fresh(2.0, 1.0, np.zeros(2))  # F(x) = ||x||^2
    report = solve_with_gap(obj, ball(2), 1e-6, np.array([1.0, 0.0]), max_iter=10000)
    assert report.converged
    assert np.linalg.norm(report.x_out) < 1e-3


@pytest.mark.parametrize(
    "set_,floor",
    [(ball(3, radius=1.2), 1e-6), (box((1.0, 0.6, 1.5)), 1e-3), (l1_ball(3), 1e-3)],
    ids=["ball", "box", "l1"],
)
def test_gap_certificate_on_random_instances(set_, floor):
    # optima on box and l1 faces make the gap shrink only as O(1/t), so the
    # threshold there is scaled to the starting suboptimality
    rng = Rng(13)
    for _ in range(100):
        obj = random_objective(rng, 3, terms=6)
        x0 = geometry.project(set_, 2.0 * rng.gaussians(3))
        eps = max(floor, 0.01 * obj.suboptimality(set_, x0))
        report = solve_with_gap(obj, set_, eps, x0, max_iter=500000)
        assert report.converged
        assert report.final_gap <= eps
        assert geometry.contains(set_, report.x_out, tol=1e-9)
        # the gap certifies true suboptimality
        assert obj.suboptimality(set_, report.x_out) <= eps + 1e-12
        assert report.lmo_calls == report.iterations


def test_reference_path_matches_kernel():
    rng = Rng(14)
    set_ = ball(3)
    obj = random_objective(rng, 3)
    x0 = geometry.project(set_, rng.gaussians(3))
    fast = solve_with_gap(obj, set_, 1e-6, x0, max_iter=100000)
    slow, values = solve_with_gap(obj, set_, 1e-6, x0, max_iter=100000, record_path=True)
    assert fast.iterations == slow.iterations
    assert np.allclose(fast.x_out, slow.x_out, atol=1e-12)
    assert fast.final_gap == pytest.approx(slow.final_gap, rel=1e-9, abs=1e-15)


def test_objective_values_descend_monotonically():
    rng = Rng(15)
    obj = random_objective(rng, 4, terms=6)
    set_ = l1_ball(4)
    x0 = geometry.project(set_, rng.gaussians(4))
    _, values = solve_with_gap(obj, set_, 1e-7, x0, max_iter=100000, record_path=True)
    values = np.asarray(values)
    assert np.all(np.diff(values) <= 1e-12)


def test_iterations_respect_smoothness_bound():
    # the objective is (alpha W)-smooth, so beta = alpha W / 2
    rng = Rng(16)
    set_ = ball(3)
    for _ in range(100):
        obj = random_objective(rng, 3, terms=4)
        x0 = geometry.project(set_, 2.0 * rng.gaussians(3))
        h1 = obj.suboptimality(set_, x0)
        eps = max(1e-6, 0.01 * h1)
        cap = iteration_bound(0.5 * obj.alpha * obj.W, set_.outer_radius, h1, eps)
        report = solve_with_gap(obj, set_, eps, x0, max_iter=int(10 * cap) + 10)
        assert report.converged
        assert report.iterations <= max(cap, 1.0)


def test_max_iter_overrun_is_flagged():
    # generic off-center instance: two line-search steps cannot land exactly
    obj = random_objective(Rng(40), 3, terms=6)
    report = solve_with_gap(obj, ball(3), 1e-16, geometry.project(ball(3), np.ones(3)), max_iter=2)
    assert not report.converged
    assert report.iterations == 2
    assert report.final_gap > 1e-16


def test_input_validation():
    obj = fresh(1.0, 1.0, np.zeros(2))
    with pytest.raises(ValueError):
        solve_with_gap(obj, ball(2), 0.0, np.zeros(2), max_iter=10)
    with pytest.raises(ValueError):
        solve_with_gap(obj, ball(2), 1e-6, np.zeros(2), max_iter=0)
    with pytest.raises(ValueError):
        solve_with_gap(obj, ball(2), 1e-6, np.array([2.0, 0.0]), max_iter=10)


def test_iteration_bound_literal():
    # beta=1, R=1, h1=1, eps=1/2: max(4*4*(1/2)/(1/4), 2*(1/2)/(1/2)) = 32
    assert iteration_bound(1.0, 1.0, 1.0, 0.5) == 32.0


def test_iteration_bound_zero_when_start_good_enough():
    assert iteration_bound(1.0, 1.0, 0.5, 0.5) == 0.0
    assert iteration_bound(1.0, 1.0, 0.25, 0.5) == 0.0


def test_iteration_bound_epsilon_scaling():
    # first branch scales as eps^-2: halving eps multiplies the bound by ~4
    b1 = iteration_bound(1.0, 1.0, 10.0, 1e-3)
    b2 = iteration_bound(1.0, 1.0, 10.0, 5e-4)
    assert b2 / b1 == pytest.approx(4.0, rel=1e-3)


def test_iteration_bound_validation():
    with pytest.raises(ValueError):
        iteration_bound(1.0, 1.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        iteration_bound(1.0, 1.0, -1.0, 0.5)
    with pytest.raises(ValueError):
        iteration_bound(0.0, 1.0, 1.0, 0.5)
