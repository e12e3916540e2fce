import math

import numpy as np
import pytest

from observer_lab import LtiPlant, SignalSpec, TimeGrid, eval_signal, observability_rank, simulate_plant

PAPER = dict(A=[[0.0, 1.0], [-9.0, 0.0]], B=[0.0, 1.0], C=[5.0, 0.0])


def test_unit_step_is_all_ones():
    s = eval_signal(SignalSpec("unit-step"), TimeGrid.span(0.0, 1.0, 0.1))
    assert np.all(s.values == 1.0)


def test_sinusoid_peak():
    s = eval_signal(SignalSpec("sinusoid", amplitude=0.3, omega=1.0), TimeGrid(math.pi / 2, 1.0, 1))
    assert s.values[0] == pytest.approx(0.3, abs=1e-15)


def test_white_noise_is_seeded():
    g = TimeGrid(0.0, 1e-3, 1000)
    a = eval_signal(SignalSpec("gaussian-white", std=0.1, seed=42), g)
    b = eval_signal(SignalSpec("gaussian-white", std=0.1, seed=42), g)
    c = eval_signal(SignalSpec("gaussian-white", std=0.1, seed=43), g)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)
    assert a.hold == "zoh"


def test_signal_spec_validation():
    with pytest.raises(ValueError):
        SignalSpec("sinusoid", amplitude=-1.0)
    with pytest.raises(ValueError):
        SignalSpec("chirp")
    with pytest.raises(ValueError):
        eval_signal(SignalSpec("custom-samples", samples=[1.0, 2.0]), TimeGrid(0.0, 1.0, 3))


def test_paper_plant_closed_form():
    grid = TimeGrid.span(0.0, 20.0, 1e-3)
    run = simulate_plant(LtiPlant(**PAPER), [1.0, 2.0], SignalSpec("unit-step"), SignalSpec("zero"), grid)
    t = grid.times
    x1 = 1 / 9 + (8 / 9) * np.cos(3 * t) + (2 / 3) * np.sin(3 * t)
    x2 = -(8 / 3) * np.sin(3 * t) + 2 * np.cos(3 * t)
    assert np.max(np.abs(run.x.values[:, 0] - x1)) < 1e-8
    assert np.max(np.abs(run.x.values[:, 1] - x2)) < 1e-8
    assert run.y.values[0] == 5.0


def test_frozen_plant():
    grid = TimeGrid(0.0, 0.01, 100)
    plant = LtiPlant(np.zeros((2, 2)), [0.0, 0.0], [1.0, 3.0])
    run = simulate_plant(plant, [0.5, -1.0], SignalSpec("unit-step"), SignalSpec("zero"), grid)
    assert np.all(run.x.values == [0.5, -1.0])
    assert np.all(run.y.values == 0.5 - 3.0)
    assert not run.observable


def test_output_reproduces_disturbance():
    grid = TimeGrid.span(0.0, 10.0, 1e-3)
    plant = LtiPlant(**PAPER)
    run = simulate_plant(plant, [1.0, 2.0], SignalSpec("unit-step"),
                         SignalSpec("sinusoid", amplitude=0.3, omega=1.0), grid)
    cx = run.x.values @ plant.C
    assert np.array_equal(run.y.values, cx + run.delta.values)
    np.testing.assert_allclose(run.y.values - cx, 0.3 * np.sin(grid.times), atol=1e-14)
    assert np.all(np.isfinite(run.x.values))


def test_x0_length_checked():
    with pytest.raises(ValueError):
        simulate_plant(LtiPlant(**PAPER), [1.0], SignalSpec("zero"), SignalSpec("zero"), TimeGrid(0, 1, 2))


def test_observability_rank():
    assert observability_rank(LtiPlant(**PAPER)) == 2
    assert observability_rank(LtiPlant(PAPER["A"], PAPER["B"], [0.0, 0.0])) == 0
    assert observability_rank(LtiPlant([[-1.0]], [1.0], [2.0])) == 1
    assert LtiPlant(**PAPER).observable


def test_plant_dimension_checks():
    with pytest.raises(ValueError):
        LtiPlant(np.zeros((2, 3)), [0, 0], [1, 0])
    with pytest.raises(ValueError):
        LtiPlant(np.zeros((2, 2)), [0, 0, 0], [1, 0])
