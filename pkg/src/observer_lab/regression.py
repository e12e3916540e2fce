"""Linear regression from the GPEBO copy system, DREM extension/mixing, gradient estimator."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import Signal, TimeGrid, adjugate, det, integrate_lti
from .errors import IntegrationError
from .observers import GpeboState
from .plant import PlantRun

log = logging.getLogger(__name__)

# explicit-scheme stability target for gamma * phi^2 * h_sub
SUBSTEP_TARGET = 0.1
MAX_SUBSTEPS = 200_000


@dataclass(frozen=True)
class LinearRegression:
    """``z = phi_row . theta + delta`` sampled on ``z.grid``; ``phi_row`` is (count, n)."""

    z: Signal
    phi_row: np.ndarray
    delta_bound: float | None = None

    def __post_init__(self):
        phi = np.array(self.phi_row, dtype=float)
        if phi.ndim == 1:
            phi = phi.reshape(-1, 1)
        if phi.shape[0] != self.z.grid.count:
            raise ValueError("regressor and measurement have different sample counts")
        phi.setflags(write=False)
        object.__setattr__(self, "phi_row", phi)

    @property
    def grid(self) -> TimeGrid:
        return self.z.grid

    @property
    def n(self) -> int:
        return self.phi_row.shape[1]


@dataclass(frozen=True)
class FilterSpec:
    """Unity-DC first-order lag ``a / (p + a)``."""

    pole: float

    def __post_init__(self):
        if not (math.isfinite(self.pole) and self.pole > 0):
            raise ValueError(f"filter pole must be positive, got {self.pole}")


def build_regression(run: PlantRun, gpebo: GpeboState, C) -> LinearRegression:
    if run.grid != gpebo.grid:
        raise ValueError("plant run and GPEBO state live on different grids")
    C = np.asarray(C, dtype=float).reshape(-1)
    z = run.y.values - gpebo.xi.values @ C
    phi = np.einsum("i,kij->kj", C, gpebo.phi_fund)
    return LinearRegression(Signal(run.grid, z), phi)


def apply_filter(f: FilterSpec, s: Signal, initial_state: float = 0.0) -> tuple[Signal, Signal]:
    """Filtered signal ``w' = a (s - w)`` and its exact derivative ``a (s - w)``."""
    a = f.pole
    w = integrate_lti([[-a]], [initial_state], s.grid, [([a], s)]).values[:, 0]
    return Signal(s.grid, w), Signal(s.grid, a * (s.values - w))


def _filter_columns(f: FilterSpec, grid: TimeGrid, cols: np.ndarray, hold: str) -> np.ndarray:
    return np.column_stack([apply_filter(f, Signal(grid, c, hold))[0].values for c in cols.T])


@dataclass(frozen=True)
class ExtendedRegression:
    """Stacked ``z_bar = Phi_bar theta + delta_bar``; z_bar (count, n), Phi_bar (count, n, n)."""

    grid: TimeGrid
    z_bar: np.ndarray
    Phi_bar: np.ndarray
    delta_bar: np.ndarray | None = None


def drem_extend(reg: LinearRegression, filters, delta: Signal | None = None) -> ExtendedRegression:
    """Stack the regression with ``n - 1`` lag-filtered copies.

    ``delta``, when given (simulation only), is pushed through the same filters
    so the mixed disturbance can be reported. All filtered sequences share the
    hold of ``z`` so the extension stays linear in the samples.
    """
    filters = list(filters)
    n = reg.n
    if len(filters) != n - 1:
        raise ValueError(f"DREM on {n} unknowns needs {n - 1} filters, got {len(filters)}")
    grid = reg.grid
    hold = reg.z.hold
    z_rows = [reg.z.values]
    phi_rows = [reg.phi_row]
    d_rows = [delta.values] if delta is not None else None
    for f in filters:
        z_rows.append(apply_filter(f, reg.z)[0].values)
        phi_rows.append(_filter_columns(f, grid, reg.phi_row, hold))
        if d_rows is not None:
            d_rows.append(apply_filter(f, Signal(grid, delta.values, hold))[0].values)
    return ExtendedRegression(
        grid=grid,
        z_bar=np.column_stack(z_rows),
        Phi_bar=np.stack(phi_rows, axis=1),
        delta_bar=None if d_rows is None else np.column_stack(d_rows),
    )


@dataclass(frozen=True)
class MixedRegression:
    """Per-parameter scalar regressions ``m_bar[:, i] = phi_bar * theta_i + delta1[:, i]``."""

    grid: TimeGrid
    m_bar: np.ndarray
    phi_bar: np.ndarray
    delta1: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.m_bar.shape[1]

    def channel(self, i: int) -> tuple[Signal, Signal]:
        return Signal(self.grid, self.m_bar[:, i]), Signal(self.grid, self.phi_bar)

    @property
    def assumption2_max(self) -> np.ndarray | None:
        """``max_t |delta1_i(t)|`` per channel, when the disturbance is known."""
        if self.delta1 is None:
            return None
        return np.max(np.abs(self.delta1), axis=0)

    @property
    def assumption2_ok(self) -> np.ndarray | None:
        mx = self.assumption2_max
        return None if mx is None else mx < 1.0

    def excitation(self) -> float:
        """``integral phi_bar^2 dt`` (trapezoid)."""
        return trapezoid(self.phi_bar**2, self.grid.h)


def trapezoid(values, h) -> float:
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        return 0.0
    return float(h * (v.sum() - 0.5 * (v[0] + v[-1])))


def drem_mix(ext: ExtendedRegression) -> MixedRegression:
    adj = adjugate(ext.Phi_bar)
    m_bar = np.einsum("kij,kj->ki", adj, ext.z_bar)
    phi_bar = np.asarray(det(ext.Phi_bar), dtype=float).reshape(-1)
    delta1 = None
    if ext.delta_bar is not None:
        delta1 = np.einsum("kij,kj->ki", adj, ext.delta_bar)
    return MixedRegression(ext.grid, m_bar, phi_bar, delta1)


def substep_count(phi: Signal, gamma: float, cap: int = MAX_SUBSTEPS) -> tuple[int, bool]:
    """Substeps per grid step keeping ``gamma * max|phi|^2 * h_sub <= 0.1``."""
    peak = float(np.max(np.abs(phi.values))) if len(phi) else 0.0
    need = max(1, math.ceil(gamma * peak * peak * phi.grid.h / SUBSTEP_TARGET))
    return min(need, cap), need > cap


def gradient_estimate(
    m: Signal, phi: Signal, gamma: float, theta0: float = 0.0, max_substeps: int = MAX_SUBSTEPS
) -> Signal:
    """Scalar gradient flow ``thetahat' = -gamma phi (phi thetahat - m)``."""
    if not gamma > 0:
        raise ValueError(f"adaptation gain must be positive, got {gamma}")
    if m.grid != phi.grid:
        raise ValueError("measurement and regressor live on different grids")
    nsub, capped = substep_count(phi, gamma, max_substeps)
    if capped:
        log.warning(
            "gradient flow substeps capped at %d (gamma=%g, max|phi|=%g); integration may be unstable",
            nsub, gamma, float(np.max(np.abs(phi.values))),
        )
    theta = kernels.gradient_flow(
        np.ascontiguousarray(m.values), np.ascontiguousarray(phi.values),
        float(gamma), m.grid.h, float(theta0), int(nsub),
    )
    if not np.all(np.isfinite(theta)):
        k = int(np.argmax(~np.isfinite(theta)))
        raise IntegrationError(f"gradient flow diverged at sample {k}", t=m.grid.time(k), index=k)
    return Signal(m.grid, theta)
