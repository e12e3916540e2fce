"""Adaptive state observer for LTI plants with bounded measurement noise.

GPEBO turns state estimation into identification of the initial condition,
DREM splits the regression into scalar channels, and an exponential
reparametrization with second-order noise truncation attenuates the
measurement disturbance.
"""
from .core import Signal, TimeGrid, Trajectory, adjugate, det, integrate, integrate_lti, rk4_step
from .errors import ConfigError, IntegrationError, ObserverLabError, StageError
from .experiment import ExperimentResult, cubic_defect_sweep, run_scenario
from .kernels import BACKEND
from .noise_robust import (
    CubicRegression,
    SmoothedChannel,
    ThetaEstimate,
    build_cubic_regression,
    estimate_theta_cubic,
    exp_transform,
    smooth_channel,
)
from .observers import (
    GpeboState,
    LuenbergerConfig,
    gpebo_propagate,
    gpebo_reconstruct,
    luenberger_observe,
)
from .plant import LtiPlant, PlantRun, SignalSpec, eval_signal, observability_rank, simulate_plant
from .regression import (
    FilterSpec,
    LinearRegression,
    MixedRegression,
    apply_filter,
    build_regression,
    drem_extend,
    drem_mix,
    gradient_estimate,
)
from .scenario import Scenario, load_scenario, paper_scenario

__version__ = "0.1.0"
