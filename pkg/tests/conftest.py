import numpy as np
import pytest

from observer_lab import (
    FilterSpec,
    SignalSpec,
    build_regression,
    drem_extend,
    drem_mix,
    gpebo_propagate,
    paper_scenario,
    run_scenario,
    simulate_plant,
)

ACCEPTANCE_LINES = []

PAPER_THETA = np.array([1.0, 2.0])
NO_NOISE = SignalSpec("zero")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def paper_pipeline(delta=None, t_end=60.0):
    """Plant run, GPEBO state and mixed regression of the published scenario."""
    s = paper_scenario(t_end=t_end)
    if delta is not None:
        s = s.with_disturbance(delta)
    plant = s.plant
    run = simulate_plant(plant, s.x0, s.u, s.delta, s.grid)
    gp = gpebo_propagate(plant, run.u, s.xi0).with_hint(s.x0)
    reg = build_regression(run, gp, plant.C)
    mixed = drem_mix(drem_extend(reg, [FilterSpec(1.0)], delta=run.delta))
    return s, run, gp, reg, mixed


@pytest.fixture(scope="session")
def noisy_pipeline():
    return paper_pipeline()


@pytest.fixture(scope="session")
def clean_pipeline():
    return paper_pipeline(NO_NOISE)


@pytest.fixture(scope="session")
def paper_result():
    return run_scenario(paper_scenario())


@pytest.fixture(scope="session")
def clean_result():
    return run_scenario(paper_scenario(delta=NO_NOISE))
