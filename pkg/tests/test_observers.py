import math
import warnings

import numpy as np
import pytest

from observer_lab import (
    LtiPlant,
    LuenbergerConfig,
    SignalSpec,
    TimeGrid,
    Trajectory,
    gpebo_propagate,
    gpebo_reconstruct,
    integrate,
    luenberger_observe,
    simulate_plant,
)
from observer_lab.core import Signal, det
from observer_lab.observers import fundamental_matrix, implied_theta

PAPER = LtiPlant([[0.0, 1.0], [-9.0, 0.0]], [0.0, 1.0], [5.0, 0.0])
L = [2.0, 3.2]
SINE = SignalSpec("sinusoid", amplitude=0.3, omega=1.0)


def _run(delta, t_end=20.0):
    grid = TimeGrid.span(0.0, t_end, 1e-3)
    return simulate_plant(PAPER, [1.0, 2.0], SignalSpec("unit-step"), delta, grid)


def closed_form_phi(t):
    c, s = np.cos(3 * t), np.sin(3 * t)
    return np.stack([np.stack([c, s / 3], -1), np.stack([-3 * s, c], -1)], -2)


def test_fundamental_matrix_at_pi_over_6():
    steps = 524
    grid = TimeGrid(0.0, (math.pi / 6) / steps, steps + 1)
    Phi = fundamental_matrix(PAPER.A, grid)
    np.testing.assert_allclose(Phi[-1], [[0.0, 1 / 3], [-3.0, 0.0]], atol=1e-8)


def test_fundamental_matrix_starts_at_identity():
    rng = np.random.default_rng(5)
    A = rng.normal(size=(3, 3))
    Phi = fundamental_matrix(A, TimeGrid(0.0, 1e-2, 10))
    assert np.array_equal(Phi[0], np.eye(3))


def test_liouville_and_closed_form():
    grid = TimeGrid.span(0.0, 20.0, 1e-3)
    gp = gpebo_propagate(PAPER, Signal(grid, np.ones(grid.count)), [0.0, 0.0])
    assert np.max(np.abs(det(gp.phi_fund) - 1.0)) < 1e-6
    assert np.max(np.abs(gp.phi_fund - closed_form_phi(grid.times))) < 1e-6


def test_liouville_nonzero_trace():
    A = np.array([[-0.5, 1.0], [0.2, -0.3]])
    grid = TimeGrid.span(0.0, 5.0, 1e-3)
    Phi = fundamental_matrix(A, grid)
    np.testing.assert_allclose(det(Phi), np.exp(np.trace(A) * grid.times), rtol=1e-9)


def test_columnwise_equals_full_matrix_integration():
    rng = np.random.default_rng(11)
    A = rng.normal(size=(3, 3))
    grid = TimeGrid(0.0, 1e-2, 200)
    full = integrate(lambda t, v: (A @ v.reshape(3, 3)).ravel(), grid, np.eye(3).ravel())
    cols = fundamental_matrix(A, grid)
    np.testing.assert_allclose(cols.reshape(grid.count, 9), full.values, rtol=0, atol=1e-12)


def test_luenberger_equilibrium():
    run = _run(SignalSpec("zero"))
    xhat = luenberger_observe(PAPER, LuenbergerConfig(L, [1.0, 2.0]), run.y, run.u)
    assert np.max(np.abs(xhat.values - run.x.values)) < 1e-9


def test_luenberger_converges_noise_free():
    run = _run(SignalSpec("zero"))
    cfg = LuenbergerConfig(L, [0.0, 0.0])
    eig = cfg.closed_loop_eigenvalues(PAPER)
    np.testing.assert_allclose(eig, [-5.0, -5.0], atol=1e-6)
    err = run.x.values - luenberger_observe(PAPER, cfg, run.y, run.u).values
    assert np.max(np.abs(err[run.grid.times >= 10.0])) < 1e-9
    assert np.abs(err[0]).tolist() == [1.0, 2.0]


def test_luenberger_noise_steady_amplitude():
    # e' = (A - L C^T) e - L delta; steady amplitude from the complex gain at w = 1
    run = _run(SINE, t_end=40.0)
    cfg = LuenbergerConfig(L, [0.0, 0.0])
    err = run.x.values - luenberger_observe(PAPER, cfg, run.y, run.u).values
    M = cfg.closed_loop(PAPER)
    G = np.linalg.solve(1j * np.eye(2) - M, -np.asarray(L))
    tail = run.grid.times >= 20.0
    peak = np.max(np.abs(err[tail]), axis=0)
    np.testing.assert_allclose(peak, 0.3 * np.abs(G), rtol=1e-4)
    assert np.all(peak > 0)


def test_unstable_gain_warns():
    cfg = LuenbergerConfig([-1.0, 0.0], [0.0, 0.0])
    with pytest.warns(RuntimeWarning):
        cfg.closed_loop_eigenvalues(PAPER)


def test_luenberger_dimension_mismatch():
    run = _run(SignalSpec("zero"), t_end=1.0)
    with pytest.raises(ValueError):
        luenberger_observe(PAPER, LuenbergerConfig([1.0], [0.0, 0.0]), run.y, run.u)


@pytest.mark.parametrize("delta", [SignalSpec("zero"), SINE])
def test_reconstruction_exact_with_true_theta(delta):
    run = _run(delta, t_end=60.0)
    gp = gpebo_propagate(PAPER, run.u, [0.0, 0.0]).with_hint([1.0, 2.0])
    assert gp.theta_true_hint.tolist() == [1.0, 2.0]
    theta = Trajectory(run.grid, np.tile(gp.theta_true_hint, (run.grid.count, 1)))
    xhat = gpebo_reconstruct(gp, theta)
    assert np.max(np.abs(xhat.values - run.x.values)) < 1e-6


def test_reconstruction_linear_in_theta():
    run = _run(SignalSpec("zero"), t_end=5.0)
    gp = gpebo_propagate(PAPER, run.u, [0.0, 0.0])
    n = run.grid.count
    zero = gpebo_reconstruct(gp, Trajectory(run.grid, np.zeros((n, 2))))
    assert np.array_equal(zero.values, gp.xi.values)
    offset = np.array([0.1, -0.2])
    true = gpebo_reconstruct(gp, Trajectory(run.grid, np.tile([1.0, 2.0], (n, 1))))
    off = gpebo_reconstruct(gp, Trajectory(run.grid, np.tile([1.0, 2.0] + offset, (n, 1))))
    np.testing.assert_allclose(true.values - off.values, -(gp.phi_fund @ offset), atol=1e-12)


def test_implied_theta_inverts_reconstruction():
    run = _run(SignalSpec("zero"), t_end=5.0)
    gp = gpebo_propagate(PAPER, run.u, [0.0, 0.0])
    th = np.random.default_rng(2).normal(size=(run.grid.count, 2))
    xhat = gpebo_reconstruct(gp, Trajectory(run.grid, th))
    np.testing.assert_allclose(implied_theta(gp, xhat).values, th, atol=1e-9)


def test_reconstruct_grid_mismatch():
    run = _run(SignalSpec("zero"), t_end=1.0)
    gp = gpebo_propagate(PAPER, run.u, [0.0, 0.0])
    with pytest.raises(ValueError):
        gpebo_reconstruct(gp, Trajectory(TimeGrid(0.0, 1e-3, 5), np.zeros((5, 2))))
