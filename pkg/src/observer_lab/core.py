"""Time grids, sampled signals, RK4 integration and small-matrix algebra."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import kernels
from .errors import IntegrationError

__all__ = [
    "TimeGrid",
    "Signal",
    "Trajectory",
    "rk4_step",
    "integrate",
    "integrate_lti",
    "stage_values",
    "det",
    "adjugate",
]


HOLD_MODES = ("cubic", "linear", "zoh")


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid ``t_k = t0 + k*h`` for ``k = 0 .. count-1``."""

    t0: float
    h: float
    count: int

    def __post_init__(self):
        if not (math.isfinite(self.h) and self.h > 0):
            raise ValueError(f"grid step must be positive, got h={self.h}")
        if int(self.count) != self.count or self.count < 1:
            raise ValueError(f"grid count must be a positive integer, got {self.count}")
        object.__setattr__(self, "count", int(self.count))
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "h", float(self.h))

    @classmethod
    def span(cls, t0: float, t1: float, h: float) -> "TimeGrid":
        """Grid covering ``[t0, t1]``; ``t1 - t0`` must be a whole number of steps."""
        steps = (t1 - t0) / h
        n = int(round(steps))
        if abs(steps - n) > 1e-9 * max(1.0, abs(steps)):
            raise ValueError(f"horizon {t1 - t0} is not a multiple of h={h}")
        return cls(t0, h, n + 1)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + np.arange(self.count) * self.h

    def time(self, k: int) -> float:
        return self.t0 + k * self.h

    @property
    def t_end(self) -> float:
        return self.time(self.count - 1)

    def tail_mask(self, fraction: float = 0.2) -> np.ndarray:
        """Samples in the final ``fraction`` of the horizon."""
        cut = self.t0 + (1.0 - fraction) * (self.t_end - self.t0)
        return self.times >= cut


@dataclass(frozen=True)
class Signal:
    """Scalar samples on a grid.

    ``hold`` sets how the signal is read between samples when it drives an
    ODE: ``"cubic"`` (four-point interpolation, O(h^4) at step midpoints),
    ``"linear"`` or ``"zoh"`` (left sample held across the step).
    """

    grid: TimeGrid
    values: np.ndarray
    hold: str = "cubic"

    def __post_init__(self):
        v = _frozen(self.values)
        if v.shape != (self.grid.count,):
            raise ValueError(f"signal has {v.size} samples, grid has {self.grid.count}")
        if self.hold not in HOLD_MODES:
            raise ValueError(f"unknown hold mode {self.hold!r}")
        object.__setattr__(self, "values", v)

    def _check(self, other):
        if isinstance(other, Signal):
            if other.grid != self.grid:
                raise ValueError("signals live on different grids")
            return other.values
        return other

    def __add__(self, other):
        return Signal(self.grid, self.values + self._check(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Signal(self.grid, self.values - self._check(other))

    def __rsub__(self, other):
        return Signal(self.grid, self._check(other) - self.values)

    def __mul__(self, other):
        return Signal(self.grid, self.values * self._check(other))

    __rmul__ = __mul__

    def __neg__(self):
        return Signal(self.grid, -self.values, self.hold)

    def __len__(self):
        return self.grid.count

    @classmethod
    def zeros(cls, grid: TimeGrid) -> "Signal":
        return cls(grid, np.zeros(grid.count))


@dataclass(frozen=True)
class Trajectory:
    """Vector samples on a grid, stored as a ``(count, dim)`` array."""

    grid: TimeGrid
    values: np.ndarray
    dim: int = field(init=False)

    def __post_init__(self):
        v = _frozen(self.values)
        if v.ndim == 1:
            v = _frozen(v.reshape(-1, 1))
        if v.ndim != 2 or v.shape[0] != self.grid.count:
            raise ValueError(
                f"trajectory shape {v.shape} incompatible with grid of {self.grid.count} samples"
            )
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "dim", v.shape[1])

    def component(self, i: int) -> Signal:
        return Signal(self.grid, self.values[:, i])

    def __getitem__(self, k):
        return self.values[k]

    def __len__(self):
        return self.grid.count


def rk4_step(f: Callable, t: float, state, h: float) -> np.ndarray:
    """One classical Runge-Kutta step of ``x' = f(t, x)``."""
    if not h > 0:
        raise ValueError(f"step must be positive, got h={h}")
    x = np.asarray(state, dtype=float)
    k1 = _eval(f, t, x)
    k2 = _eval(f, t + 0.5 * h, x + 0.5 * h * k1)
    k3 = _eval(f, t + 0.5 * h, x + 0.5 * h * k2)
    k4 = _eval(f, t + h, x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _eval(f, t, x):
    d = np.asarray(f(t, x), dtype=float)
    if d.shape != x.shape:
        raise ValueError(f"vector field returned shape {d.shape}, state has shape {x.shape}")
    if not np.all(np.isfinite(d)):
        raise IntegrationError(f"non-finite derivative at t={t!r}", t=t)
    return d


def integrate(f: Callable, grid: TimeGrid, x0) -> Trajectory:
    """Integrate ``x' = f(t, x)`` with fixed-step RK4 over ``grid``."""
    x = np.atleast_1d(np.asarray(x0, dtype=float))
    out = np.empty((grid.count, x.size))
    out[0] = x
    for k in range(grid.count - 1):
        try:
            x = rk4_step(f, grid.time(k), x, grid.h)
        except IntegrationError as exc:
            raise IntegrationError(f"{exc} (step from sample {k})", t=exc.t, index=k) from exc
        out[k + 1] = x
    return Trajectory(grid, out)


def stage_values(s: Signal) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Values of ``s`` at the start, midpoint and end of every grid step."""
    v = s.values
    left = v[:-1]
    if s.hold == "zoh":
        return left, left, left
    right = v[1:]
    if s.hold == "linear" or v.size < 4:
        return left, 0.5 * (left + right), right
    mid = np.empty(v.size - 1)
    mid[1:-1] = (-v[:-3] + 9.0 * v[1:-2] + 9.0 * v[2:-1] - v[3:]) / 16.0
    mid[0] = (5.0 * v[0] + 15.0 * v[1] - 5.0 * v[2] + v[3]) / 16.0
    mid[-1] = (v[-4] - 5.0 * v[-3] + 15.0 * v[-2] + 5.0 * v[-1]) / 16.0
    return left, mid, right


def integrate_lti(M, x0, grid: TimeGrid, forcing=()) -> Trajectory:
    """RK4 for ``x' = M x + sum_j b_j s_j(t)`` on the kernel backend.

    ``forcing`` is a sequence of ``(b, signal)`` pairs with ``b`` a length-n
    vector; each signal is evaluated per its hold mode inside the steps.
    """
    M = np.ascontiguousarray(np.atleast_2d(np.asarray(M, dtype=float)))
    x0 = np.ascontiguousarray(np.atleast_1d(np.asarray(x0, dtype=float)))
    n = x0.size
    if M.shape != (n, n):
        raise ValueError(f"system matrix shape {M.shape} does not match state length {n}")
    steps = grid.count - 1
    F0 = np.zeros((steps, n))
    Fm = np.zeros((steps, n))
    F1 = np.zeros((steps, n))
    for b, s in forcing:
        if s.grid != grid:
            raise ValueError("forcing signal lives on a different grid")
        b = np.asarray(b, dtype=float).reshape(n)
        l, c, r = stage_values(s)
        F0 += np.outer(l, b)
        Fm += np.outer(c, b)
        F1 += np.outer(r, b)
    X = kernels.lti_rk4(M, F0, Fm, F1, x0, grid.h)
    bad = ~np.all(np.isfinite(X), axis=1)
    if bad.any():
        k = int(np.argmax(bad))
        raise IntegrationError(
            f"non-finite state at sample {k} (t={grid.time(k)!r})", t=grid.time(k), index=k
        )
    return Trajectory(grid, X)


def _square(M) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim < 2 or M.shape[-1] != M.shape[-2]:
        raise ValueError(f"square matrix required, got shape {M.shape}")
    return M


def _minor(M, i, j):
    return np.delete(np.delete(M, i, axis=-2), j, axis=-1)


def det(M) -> np.ndarray | float:
    """Determinant by cofactor expansion along the first row.

    Accepts a single matrix or a stack ``(..., n, n)``.
    """
    M = _square(M)
    n = M.shape[-1]
    if n == 1:
        out = M[..., 0, 0].copy()
    elif n == 2:
        out = M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]
    else:
        out = np.zeros(M.shape[:-2])
        for j in range(n):
            out = out + (-1) ** j * M[..., 0, j] * det(_minor(M, 0, j))
    return float(out) if np.ndim(out) == 0 else out


def adjugate(M) -> np.ndarray:
    """Classical adjoint, ``adj(M) @ M == det(M) * I``; stacks allowed."""
    M = _square(M)
    n = M.shape[-1]
    if n == 1:
        return np.ones_like(M)
    adj = np.empty_like(M)
    for i in range(n):
        for j in range(n):
            adj[..., j, i] = (-1) ** (i + j) * np.asarray(det(_minor(M, i, j)))
    return adj
