"""LTI plant with scalar output and additive measurement disturbance."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Signal, TimeGrid, Trajectory, integrate_lti

SIGNAL_KINDS = ("unit-step", "sinusoid", "constant", "zero", "gaussian-white", "custom-samples")


@dataclass(frozen=True)
class LtiPlant:
    """``x' = A x + B u``, ``y = C^T x + delta`` with single input and output."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    n: int = field(init=False)
    observable: bool = field(init=False)

    def __post_init__(self):
        A = np.atleast_2d(np.array(self.A, dtype=float))
        B = np.array(self.B, dtype=float).reshape(-1)
        C = np.array(self.C, dtype=float).reshape(-1)
        n = A.shape[0]
        if A.shape != (n, n):
            raise ValueError(f"A must be square, got shape {A.shape}")
        if B.size != n:
            raise ValueError(f"B has length {B.size}, expected {n}")
        if C.size != n:
            raise ValueError(f"C has length {C.size}, expected {n}")
        for a in (A, B, C):
            a.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "observable", observability_rank(self) == n)

    def require_observable(self):
        if not self.observable:
            raise ValueError(
                f"pair (A, C) is not observable (rank {observability_rank(self)} < {self.n})"
            )


def observability_matrix(plant: LtiPlant) -> np.ndarray:
    """Columns ``C, A^T C, ..., (A^T)^(n-1) C``."""
    cols = [plant.C]
    for _ in range(plant.n - 1):
        cols.append(plant.A.T @ cols[-1])
    return np.column_stack(cols)


def observability_rank(plant: LtiPlant, rtol: float = 1e-10) -> int:
    sv = np.linalg.svd(observability_matrix(plant), compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > rtol * sv[0]))


@dataclass(frozen=True)
class SignalSpec:
    """Declarative scalar signal.

    Parameters by kind: ``sinusoid`` takes ``amplitude``, ``omega`` (rad/s)
    and ``phase``; ``constant`` takes ``value``; ``gaussian-white`` takes
    ``std`` and ``seed``; ``custom-samples`` takes ``samples``.
    """

    kind: str
    amplitude: float = 0.0
    omega: float = 0.0
    phase: float = 0.0
    value: float = 0.0
    std: float = 0.0
    seed: int = 0
    samples: tuple = ()

    def __post_init__(self):
        if self.kind not in SIGNAL_KINDS:
            raise ValueError(f"unknown signal kind {self.kind!r}; expected one of {SIGNAL_KINDS}")
        if self.kind == "sinusoid" and self.amplitude < 0:
            raise ValueError("sinusoid amplitude must be non-negative")
        if self.kind == "gaussian-white" and self.std < 0:
            raise ValueError("noise std must be non-negative")
        object.__setattr__(self, "samples", tuple(float(v) for v in self.samples))

    def scaled(self, factor: float) -> "SignalSpec":
        """Same signal with its magnitude multiplied by ``factor >= 0``."""
        from dataclasses import replace

        if factor < 0:
            raise ValueError("scale factor must be non-negative")
        return replace(
            self,
            amplitude=self.amplitude * factor,
            value=self.value * factor,
            std=self.std * factor,
            samples=tuple(v * factor for v in self.samples),
        )


def eval_signal(spec: SignalSpec, grid: TimeGrid) -> Signal:
    """Sample ``spec`` on ``grid``.

    Deterministic signals are read linearly between samples; white noise is
    held constant across each step.
    """
    t = grid.times
    kind = spec.kind
    if kind == "unit-step":
        v = (t >= 0).astype(float)
    elif kind == "sinusoid":
        v = spec.amplitude * np.sin(spec.omega * t + spec.phase)
    elif kind == "constant":
        v = np.full(grid.count, float(spec.value))
    elif kind == "zero":
        v = np.zeros(grid.count)
    elif kind == "gaussian-white":
        rng = np.random.default_rng(spec.seed)
        return Signal(grid, rng.normal(0.0, spec.std, grid.count), hold="zoh")
    else:
        if len(spec.samples) != grid.count:
            raise ValueError(
                f"custom signal has {len(spec.samples)} samples, grid has {grid.count}"
            )
        v = np.array(spec.samples)
    return Signal(grid, v, hold="linear")


@dataclass(frozen=True)
class PlantRun:
    x: Trajectory
    y: Signal
    u: Signal
    delta: Signal
    observable: bool = True

    @property
    def grid(self) -> TimeGrid:
        return self.x.grid


def simulate_plant(plant: LtiPlant, x0, u: SignalSpec, delta: SignalSpec, grid: TimeGrid) -> PlantRun:
    """Integrate the plant and assemble the measured output.

    The disturbance only enters the output; unobservable plants are simulated
    but flagged in the returned run.
    """
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if x0.size != plant.n:
        raise ValueError(f"x0 has length {x0.size}, plant order is {plant.n}")
    us = eval_signal(u, grid)
    ds = eval_signal(delta, grid)
    x = integrate_lti(plant.A, x0, grid, [(plant.B, us)])
    # measured output is smooth unless the disturbance is sampled noise
    y = Signal(grid, x.values @ plant.C + ds.values, hold="zoh" if ds.hold == "zoh" else "cubic")
    return PlantRun(x=x, y=y, u=us, delta=ds, observable=plant.observable)
