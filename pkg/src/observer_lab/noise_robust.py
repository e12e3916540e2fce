"""Noise-attenuating reparametrization of a mixed scalar regression.

Each mixed channel ``m_bar = phi_bar*theta + delta1`` is smoothed by a lag
``k/(p+k)``, exponentiated, ``g = exp(m)``, and the noise factor of ``g`` is
truncated at second order. Eliminating the disturbance then gives a regression
linear in ``Theta = (theta, theta^2, theta^3)``::

    zeta = psi1*theta + psi2*theta^2 + psi3*theta^3

which is exact when the disturbance is zero and carries an O(delta^3) defect
otherwise. ``Theta`` is identified by a second DREM stage (two lags, 3x3
mixing) followed by independent scalar gradient flows.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .core import Signal
from .regression import (
    FilterSpec,
    LinearRegression,
    MixedRegression,
    apply_filter,
    drem_extend,
    drem_mix,
    gradient_estimate,
)

log = logging.getLogger(__name__)

EXP_GUARD = 300.0


@dataclass(frozen=True)
class SmoothedChannel:
    m: Signal
    m_dot: Signal
    phi_f: Signal
    phi_f_dot: Signal
    k: float
    delta1_f: Signal | None = None

    @property
    def grid(self):
        return self.m.grid


def smooth_channel(mixed: MixedRegression, i: int, k: float) -> SmoothedChannel:
    """Lag-filter channel ``i`` and its regressor; derivatives come from the filter state."""
    lag = FilterSpec(k)
    m_bar, phi_bar = mixed.channel(i)
    m, m_dot = apply_filter(lag, m_bar)
    phi_f, phi_f_dot = apply_filter(lag, phi_bar)
    d1 = None
    if mixed.delta1 is not None:
        d1 = apply_filter(lag, Signal(mixed.grid, mixed.delta1[:, i]))[0]
    return SmoothedChannel(m, m_dot, phi_f, phi_f_dot, float(k), d1)


def exp_transform(ch: SmoothedChannel) -> tuple[Signal, Signal]:
    peak = float(np.max(np.abs(ch.m.values)))
    if peak > EXP_GUARD:
        raise OverflowError(f"max|m| = {peak:g} exceeds the exponential guard {EXP_GUARD:g}")
    g = np.exp(ch.m.values)
    return Signal(ch.grid, g), Signal(ch.grid, ch.m_dot.values * g)


@dataclass(frozen=True)
class CubicRegression:
    zeta: Signal
    psi1: Signal
    psi2: Signal
    psi3: Signal
    g: Signal
    g_dot: Signal

    @property
    def grid(self):
        return self.zeta.grid

    @property
    def psi(self) -> np.ndarray:
        """Regressor rows, shape (count, 3)."""
        return np.column_stack([self.psi1.values, self.psi2.values, self.psi3.values])

    def defect(self, theta: float) -> np.ndarray:
        """``zeta - Psi^T (theta, theta^2, theta^3)``."""
        return self.zeta.values - self.psi @ np.array([theta, theta**2, theta**3])


def build_cubic_regression(
    ch: SmoothedChannel, g: Signal, g_dot: Signal, printed_psi1: bool = False
) -> CubicRegression:
    """Assemble ``zeta`` and ``psi1..psi3`` pointwise.

    ``printed_psi1=True`` adds the two extra terms ``g*phi_dot - phi*g`` of the
    published psi1; that variant breaks the noise-free identity and exists only
    for comparison.
    """
    m, md = ch.m.values, ch.m_dot.values
    p, pd = ch.phi_f.values, ch.phi_f_dot.values
    G, Gd = g.values, g_dot.values

    zeta = Gd + m * Gd + 0.5 * m * m * Gd - G * md - G * m * md
    psi1 = p * Gd + p * m * Gd + 0.5 * m * m * pd * G - p * G * md
    if printed_psi1:
        psi1 = psi1 + G * pd - p * G
    psi2 = -0.5 * p * p * Gd - m * p * pd * G
    psi3 = 0.5 * p * p * pd * G

    grid = ch.grid
    return CubicRegression(
        Signal(grid, zeta), Signal(grid, psi1), Signal(grid, psi2), Signal(grid, psi3), g, g_dot
    )


@dataclass(frozen=True)
class ThetaEstimate:
    Theta_hat: np.ndarray
    theta_hat: Signal
    consistency: Signal
    mixed_regressor_peak: float
    excitation: float

    @property
    def grid(self):
        return self.theta_hat.grid


def estimate_theta_cubic(
    cr: CubicRegression, drem_filters, gamma: float, Theta0=(0.0, 0.0, 0.0)
) -> ThetaEstimate:
    """Identify ``Theta`` by a 3x3 DREM stage and per-component gradient flows.

    The released estimate is the first component (the one linear in theta);
    ``consistency = |Theta_2 - Theta_1^2|`` is a self-check.
    """
    filters = list(drem_filters)
    if len(filters) != 2:
        raise ValueError(f"cubic regression needs exactly 2 DREM filters, got {len(filters)}")
    reg = LinearRegression(cr.zeta, cr.psi)
    mixed = drem_mix(drem_extend(reg, filters))
    peak = float(np.max(np.abs(mixed.phi_bar)))
    log.info("cubic DREM: max|det Psi_bar| = %.3e, gamma = %.3g", peak, gamma)

    est = []
    for j in range(3):
        m_j, phi = mixed.channel(j)
        est.append(gradient_estimate(m_j, phi, gamma, Theta0[j]).values)
    Theta = np.column_stack(est)
    Theta.setflags(write=False)
    grid = cr.grid
    return ThetaEstimate(
        Theta_hat=Theta,
        theta_hat=Signal(grid, Theta[:, 0]),
        consistency=Signal(grid, np.abs(Theta[:, 1] - Theta[:, 0] ** 2)),
        mixed_regressor_peak=peak,
        excitation=mixed.excitation(),
    )


def cubic_pipeline(mixed: MixedRegression, i: int, k: float) -> CubicRegression:
    """Smooth channel ``i``, exponentiate and assemble its cubic regression."""
    ch = smooth_channel(mixed, i, k)
    g, g_dot = exp_transform(ch)
    return build_cubic_regression(ch, g, g_dot)


def surrogate_exponential(ch: SmoothedChannel, theta: float) -> tuple[Signal, Signal]:
    """Truncated-noise surrogate ``(1 + d + d^2/2) exp(phi*theta)`` and its derivative.

    ``d`` is the smoothed channel disturbance ``m - phi*theta`` (simulation-side).
    Substituting this for ``g`` makes the cubic identity exact for any ``d``.
    """
    p, pd = ch.phi_f.values, ch.phi_f_dot.values
    d = ch.m.values - p * theta
    dd = ch.m_dot.values - pd * theta
    e = np.exp(p * theta)
    g = (1.0 + d + 0.5 * d * d) * e
    g_dot = (dd + d * dd) * e + (1.0 + d + 0.5 * d * d) * pd * theta * e
    return Signal(ch.grid, g), Signal(ch.grid, g_dot)
