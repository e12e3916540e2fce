"""Luenberger baseline observer and the GPEBO copy-system parametrization."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import Signal, Trajectory, integrate_lti
from .plant import LtiPlant


@dataclass(frozen=True)
class LuenbergerConfig:
    L: np.ndarray
    xhat0: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "L", np.array(self.L, dtype=float).reshape(-1))
        object.__setattr__(self, "xhat0", np.array(self.xhat0, dtype=float).reshape(-1))

    def closed_loop(self, plant: LtiPlant) -> np.ndarray:
        """``A - L C^T``."""
        if self.L.size != plant.n or self.xhat0.size != plant.n:
            raise ValueError(
                f"observer gain/initial state must have length {plant.n}, "
                f"got {self.L.size}/{self.xhat0.size}"
            )
        return plant.A - np.outer(self.L, plant.C)

    def closed_loop_eigenvalues(self, plant: LtiPlant) -> np.ndarray:
        eig = np.linalg.eigvals(self.closed_loop(plant))
        if np.any(eig.real >= 0):
            warnings.warn(
                f"A - L C^T is not Hurwitz (eigenvalues {eig}); observer error will not decay",
                RuntimeWarning,
                stacklevel=2,
            )
        return eig


def luenberger_observe(plant: LtiPlant, cfg: LuenbergerConfig, y: Signal, u: Signal) -> Trajectory:
    """Full-order observer ``xhat' = A xhat + B u + L (y - C^T xhat)``."""
    if y.grid != u.grid:
        raise ValueError("y and u must share a grid")
    cfg.closed_loop_eigenvalues(plant)
    return integrate_lti(cfg.closed_loop(plant), cfg.xhat0, y.grid, [(plant.B, u), (cfg.L, y)])


@dataclass(frozen=True)
class GpeboState:
    """Copy-system state ``xi`` and fundamental matrix samples ``phi_fund`` (count, n, n).

    ``theta_true_hint`` is ``x(0) - xi(0)`` when known from a simulation; the
    estimators never read it.
    """

    xi: Trajectory
    phi_fund: np.ndarray
    theta_true_hint: np.ndarray | None = None

    @property
    def grid(self):
        return self.xi.grid

    def with_hint(self, x0) -> "GpeboState":
        hint = np.asarray(x0, dtype=float) - self.xi.values[0]
        return GpeboState(self.xi, self.phi_fund, hint)


def fundamental_matrix(A, grid) -> np.ndarray:
    """Samples of ``Phi' = A Phi``, ``Phi(0) = I``, integrated column by column."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    n = A.shape[0]
    cols = [integrate_lti(A, e, grid).values for e in np.eye(n)]
    return np.stack(cols, axis=2)


def gpebo_propagate(plant: LtiPlant, u: Signal, xi0) -> GpeboState:
    xi0 = np.asarray(xi0, dtype=float).reshape(-1)
    if xi0.size != plant.n:
        raise ValueError(f"xi0 has length {xi0.size}, plant order is {plant.n}")
    xi = integrate_lti(plant.A, xi0, u.grid, [(plant.B, u)])
    Phi = fundamental_matrix(plant.A, u.grid)
    Phi.setflags(write=False)
    return GpeboState(xi=xi, phi_fund=Phi)


def gpebo_reconstruct(gpebo: GpeboState, theta_hat: Trajectory) -> Trajectory:
    """``xhat = xi + Phi thetahat`` sample by sample."""
    if theta_hat.grid != gpebo.grid:
        raise ValueError("theta_hat and GPEBO state live on different grids")
    if theta_hat.dim != gpebo.xi.dim:
        raise ValueError(f"theta_hat has dimension {theta_hat.dim}, expected {gpebo.xi.dim}")
    xhat = gpebo.xi.values + np.einsum("kij,kj->ki", gpebo.phi_fund, theta_hat.values)
    return Trajectory(gpebo.grid, xhat)


def implied_theta(gpebo: GpeboState, xhat: Trajectory) -> Trajectory:
    """Initial-condition estimate equivalent to a state estimate: ``Phi^-1 (xhat - xi)``."""
    if xhat.grid != gpebo.grid:
        raise ValueError("state estimate and GPEBO state live on different grids")
    theta = np.linalg.solve(gpebo.phi_fund, (xhat.values - gpebo.xi.values)[..., None])[..., 0]
    return Trajectory(gpebo.grid, theta)
