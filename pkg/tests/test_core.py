import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from observer_lab import Signal, TimeGrid, Trajectory, adjugate, det, integrate, integrate_lti, rk4_step
from observer_lab.errors import IntegrationError


def harmonic(t, x):
    return np.array([x[1], -9.0 * x[0]])


def test_rk4_zero_field_fixes_state():
    out = rk4_step(lambda t, x: np.zeros_like(x), 0.0, [1.0, 2.0], 0.01)
    assert out.tolist() == [1.0, 2.0]


def test_rk4_constant_field_is_exact():
    assert rk4_step(lambda t, x: np.ones(1), 0.0, [0.0], 0.5).tolist() == [0.5]


def test_rk4_harmonic_half_period():
    # h close to 1e-3 that lands exactly on pi/3
    steps = 1047
    grid = TimeGrid(0.0, (math.pi / 3) / steps, steps + 1)
    x = integrate(harmonic, grid, [1.0, 0.0]).values[-1]
    np.testing.assert_allclose(x, [-1.0, 0.0], atol=1e-8)


def test_integrate_harmonic_global_error():
    grid = TimeGrid.span(0.0, 20.0, 1e-3)
    t = grid.times
    traj = integrate(harmonic, grid, [1.0, 0.0])
    exact = np.column_stack([np.cos(3 * t), -3 * np.sin(3 * t)])
    assert np.max(np.abs(traj.values - exact)) < 1e-6


def test_integrate_lti_matches_closed_form():
    grid = TimeGrid.span(0.0, 20.0, 1e-3)
    t = grid.times
    traj = integrate_lti([[0.0, 1.0], [-9.0, 0.0]], [1.0, 0.0], grid)
    exact = np.column_stack([np.cos(3 * t), -3 * np.sin(3 * t)])
    assert np.max(np.abs(traj.values - exact)) < 1e-6


def test_integrate_exponential():
    grid = TimeGrid.span(0.0, 1.0, 1e-3)
    x = integrate(lambda t, x: x, grid, [1.0]).values[-1, 0]
    assert abs(x - math.e) < 1e-10


def test_integrate_constant_and_deterministic():
    grid = TimeGrid(0.0, 0.1, 50)
    a = integrate(lambda t, x: 0 * x, grid, [3.0])
    assert np.all(a.values == 3.0)
    f = lambda t, x: np.array([np.sin(t) * x[0]])
    assert np.array_equal(integrate(f, grid, [1.0]).values, integrate(f, grid, [1.0]).values)


def test_nonfinite_derivative_names_time_and_sample():
    grid = TimeGrid(0.0, 0.5, 10)

    def f(t, x):
        return np.array([np.inf if t >= 1.0 else 1.0])

    with pytest.raises(IntegrationError) as info:
        integrate(f, grid, [0.0])
    assert info.value.index == 1
    assert "t=1.0" in str(info.value)


def test_integrate_lti_overflow_reports_sample():
    grid = TimeGrid(0.0, 1.0, 2000)
    with pytest.raises(IntegrationError) as info:
        integrate_lti([[500.0]], [1.0], grid)
    assert info.value.index is not None and info.value.index > 0


def test_grid_has_no_accumulated_drift():
    grid = TimeGrid(0.1, 1e-3, 60001)
    k = np.arange(grid.count)
    assert np.array_equal(grid.times, 0.1 + k * 1e-3)
    assert grid.time(60000) == 0.1 + 60000 * 1e-3


def test_grid_validation():
    with pytest.raises(ValueError):
        TimeGrid(0.0, 0.0, 5)
    with pytest.raises(ValueError):
        TimeGrid(0.0, 0.1, 0)
    with pytest.raises(ValueError):
        TimeGrid.span(0.0, 1.0, 0.3)
    assert TimeGrid.span(0.0, 60.0, 1e-3).count == 60001


def test_signal_requires_matching_grid():
    a = Signal(TimeGrid(0.0, 0.1, 3), [1.0, 2.0, 3.0])
    b = Signal(TimeGrid(0.0, 0.2, 3), [1.0, 2.0, 3.0])
    assert (a + a).values.tolist() == [2.0, 4.0, 6.0]
    with pytest.raises(ValueError):
        a + b
    with pytest.raises(ValueError):
        Signal(TimeGrid(0.0, 0.1, 3), [1.0, 2.0])


def test_trajectory_shape_checks():
    g = TimeGrid(0.0, 0.1, 3)
    assert Trajectory(g, np.zeros((3, 2))).dim == 2
    with pytest.raises(ValueError):
        Trajectory(g, np.zeros((4, 2)))


def test_det_examples():
    assert det(np.eye(2)) == 1.0
    assert det([[0.0, 1 / 3], [-3.0, 0.0]]) == pytest.approx(1.0, abs=1e-15)
    assert det([[2.0, 1.0], [1.0, 1.0]]) == 1.0


def test_adjugate_examples():
    assert np.array_equal(adjugate(np.eye(3)), np.eye(3))
    assert adjugate([[1.0, 2.0], [3.0, 4.0]]).tolist() == [[4.0, -2.0], [-3.0, 1.0]]


def test_square_only():
    with pytest.raises(ValueError):
        det(np.ones((2, 3)))
    with pytest.raises(ValueError):
        adjugate(np.ones((3, 2)))


def test_random_3x3_adjugate_identity():
    rng = np.random.default_rng(7)
    M = rng.normal(size=(3, 3))
    lhs = adjugate(M) @ M
    assert np.max(np.abs(lhs - det(M) * np.eye(3))) <= 1e-12 * max(1.0, abs(det(M)))


def test_det_matches_lapack_on_stacks():
    rng = np.random.default_rng(3)
    for n in (1, 2, 3, 4):
        M = rng.normal(size=(20, n, n))
        np.testing.assert_allclose(det(M), np.linalg.det(M), rtol=1e-10, atol=1e-12)


@settings(max_examples=150, deadline=None)
@given(
    st.integers(1, 4).flatmap(
        lambda n: arrays(np.float64, (n, n), elements=st.floats(-100, 100, allow_nan=False))
    )
)
def test_adjugate_defining_identity(M):
    n = M.shape[0]
    lhs = adjugate(M) @ M
    scale = max(1.0, np.max(np.abs(M)) ** 3) if n > 1 else max(1.0, np.max(np.abs(M)))
    assert np.max(np.abs(lhs - det(M) * np.eye(n))) <= 1e-10 * scale
