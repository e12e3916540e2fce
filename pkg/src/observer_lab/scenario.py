"""Scenario definition, TOML config loading and validation."""
from __future__ import annotations

import hashlib
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import TimeGrid
from .errors import ConfigError
from .plant import SIGNAL_KINDS, LtiPlant, SignalSpec

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

DEFAULT_T0 = 0.0
DEFAULT_T_END = 60.0
DEFAULT_H = 1e-3
DEFAULT_OUT = "observer_lab_out"


@dataclass(frozen=True)
class Scenario:
    A: tuple
    B: tuple
    C: tuple
    x0: tuple
    xi0: tuple
    u: SignalSpec
    delta: SignalSpec
    L: tuple
    xhat0: tuple
    drem_poles: tuple
    baseline_gamma: float
    smoothing_pole: float
    cubic_poles: tuple
    cubic_gamma: tuple
    t0: float = DEFAULT_T0
    t_end: float = DEFAULT_T_END
    h: float = DEFAULT_H
    output_dir: str = DEFAULT_OUT
    source: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def n(self) -> int:
        return len(self.x0)

    @property
    def plant(self) -> LtiPlant:
        return LtiPlant(np.array(self.A), np.array(self.B), np.array(self.C))

    @property
    def grid(self) -> TimeGrid:
        return TimeGrid.span(self.t0, self.t_end, self.h)

    @property
    def theta_true(self) -> np.ndarray:
        return np.asarray(self.x0, dtype=float) - np.asarray(self.xi0, dtype=float)

    def with_disturbance(self, delta: SignalSpec) -> "Scenario":
        from dataclasses import replace

        return replace(self, delta=delta)

    def to_dict(self) -> dict:
        """Canonical config mapping; round-trips through ``scenario_from_dict``."""
        return {
            "plant": {"A": [list(r) for r in self.A], "B": list(self.B), "C": list(self.C),
                      "x0": list(self.x0)},
            "input": _spec_dict(self.u),
            "disturbance": _spec_dict(self.delta),
            "grid": {"t0": self.t0, "t_end": self.t_end, "h": self.h},
            "gpebo": {"xi0": list(self.xi0)},
            "luenberger": {"L": list(self.L), "xhat0": list(self.xhat0)},
            "baseline": {"drem_poles": list(self.drem_poles), "gamma": self.baseline_gamma},
            "cubic": {"smoothing_pole": self.smoothing_pole, "drem_poles": list(self.cubic_poles),
                      "gamma": list(self.cubic_gamma)},
            "output": {"dir": self.output_dir},
        }

    def config_hash(self) -> str:
        d = self.to_dict()
        d.pop("output")
        blob = json.dumps(d, sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()


def _spec_dict(s: SignalSpec) -> dict:
    d = {"kind": s.kind}
    if s.kind == "sinusoid":
        d.update(amplitude=s.amplitude, omega=s.omega, phase=s.phase)
    elif s.kind == "constant":
        d["value"] = s.value
    elif s.kind == "gaussian-white":
        d.update(std=s.std, seed=s.seed)
    elif s.kind == "custom-samples":
        d["samples"] = list(s.samples)
    return d


# -- validation -------------------------------------------------------------

_SECTIONS = {
    "plant": ({"A", "B", "C", "x0"}, set()),
    "input": ({"kind"}, {"amplitude", "omega", "phase", "value", "std", "seed", "samples"}),
    "disturbance": ({"kind"}, {"amplitude", "omega", "phase", "value", "std", "seed", "samples"}),
    "grid": (set(), {"t0", "t_end", "h"}),
    "gpebo": ({"xi0"}, set()),
    "luenberger": ({"L", "xhat0"}, set()),
    "baseline": ({"drem_poles", "gamma"}, set()),
    "cubic": ({"smoothing_pole", "drem_poles", "gamma"}, set()),
    "output": (set(), {"dir"}),
}
_OPTIONAL_SECTIONS = {"grid", "output"}

_SIGNAL_PARAMS = {
    "unit-step": (set(), set()),
    "zero": (set(), set()),
    "constant": ({"value"}, set()),
    "sinusoid": ({"amplitude", "omega"}, {"phase"}),
    "gaussian-white": ({"std", "seed"}, set()),
    "custom-samples": ({"samples"}, set()),
}


def _real(path, v, positive=False, nonneg=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(path, f"expected a number, got {v!r}")
    v = float(v)
    if not math.isfinite(v):
        raise ConfigError(path, "must be finite")
    if positive and v <= 0:
        raise ConfigError(path, f"must be positive, got {v}")
    if nonneg and v < 0:
        raise ConfigError(path, f"must be non-negative, got {v}")
    return v


def _vector(path, v, length=None, positive=False):
    if not isinstance(v, (list, tuple)):
        raise ConfigError(path, f"expected a list of numbers, got {v!r}")
    if length is not None and len(v) != length:
        raise ConfigError(path, f"expected length {length}, got {len(v)}")
    return tuple(_real(f"{path}[{i}]", x, positive=positive) for i, x in enumerate(v))


def _signal(path, d) -> SignalSpec:
    kind = d["kind"]
    if kind not in SIGNAL_KINDS:
        raise ConfigError(f"{path}.kind", f"unknown kind {kind!r}; expected one of {SIGNAL_KINDS}")
    req, opt = _SIGNAL_PARAMS[kind]
    keys = set(d) - {"kind"}
    for k in sorted(req - keys):
        raise ConfigError(f"{path}.{k}", f"required for kind {kind!r}")
    for k in sorted(keys - req - opt):
        raise ConfigError(f"{path}.{k}", f"not a parameter of kind {kind!r}")
    kw = {}
    if kind == "sinusoid":
        kw["amplitude"] = _real(f"{path}.amplitude", d["amplitude"], nonneg=True)
        kw["omega"] = _real(f"{path}.omega", d["omega"])
        kw["phase"] = _real(f"{path}.phase", d.get("phase", 0.0))
    elif kind == "constant":
        kw["value"] = _real(f"{path}.value", d["value"])
    elif kind == "gaussian-white":
        kw["std"] = _real(f"{path}.std", d["std"], nonneg=True)
        seed = d["seed"]
        if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
            raise ConfigError(f"{path}.seed", f"expected a non-negative integer, got {seed!r}")
        kw["seed"] = seed
    elif kind == "custom-samples":
        kw["samples"] = _vector(f"{path}.samples", d["samples"])
    return SignalSpec(kind, **kw)


def scenario_from_dict(cfg: dict) -> Scenario:
    """Validate a parsed config mapping; raises ``ConfigError`` naming the field."""
    if not isinstance(cfg, dict):
        raise ConfigError("<root>", "config must be a table")
    for name in sorted(set(cfg) - set(_SECTIONS)):
        raise ConfigError(name, "unknown section")
    for name, (req, opt) in _SECTIONS.items():
        sec = cfg.get(name)
        if sec is None:
            if name in _OPTIONAL_SECTIONS:
                continue
            raise ConfigError(name, "missing section")
        if not isinstance(sec, dict):
            raise ConfigError(name, "must be a table")
        for k in sorted(req - set(sec)):
            raise ConfigError(f"{name}.{k}", "missing required key")
        if name not in ("input", "disturbance"):
            for k in sorted(set(sec) - req - opt):
                raise ConfigError(f"{name}.{k}", "unknown key")

    p = cfg["plant"]
    A = p["A"]
    if not isinstance(A, (list, tuple)) or not A:
        raise ConfigError("plant.A", "expected a non-empty list of rows")
    n = len(A)
    A = tuple(_vector(f"plant.A[{i}]", row, n) for i, row in enumerate(A))
    B = _vector("plant.B", p["B"], n)
    C = _vector("plant.C", p["C"], n)
    x0 = _vector("plant.x0", p["x0"], n)
    plant = LtiPlant(np.array(A), np.array(B), np.array(C))
    if not plant.observable:
        raise ConfigError("plant.C", "pair (A, C) is not observable; estimation is undefined")

    grid = cfg.get("grid", {})
    t0 = _real("grid.t0", grid.get("t0", DEFAULT_T0))
    t_end = _real("grid.t_end", grid.get("t_end", DEFAULT_T_END))
    h = _real("grid.h", grid.get("h", DEFAULT_H), positive=True)
    if t_end <= t0:
        raise ConfigError("grid.t_end", f"horizon must be positive (t_end={t_end} <= t0={t0})")
    try:
        tg = TimeGrid.span(t0, t_end, h)
    except ValueError as exc:
        raise ConfigError("grid.h", str(exc)) from None
    if tg.count < 2:
        raise ConfigError("grid.t_end", "grid must contain at least two samples")

    u = _signal("input", cfg["input"])
    delta = _signal("disturbance", cfg["disturbance"])
    for name, s in (("input", u), ("disturbance", delta)):
        if s.kind == "custom-samples" and len(s.samples) != tg.count:
            raise ConfigError(f"{name}.samples", f"expected {tg.count} samples, got {len(s.samples)}")

    drem_poles = _vector("baseline.drem_poles", cfg["baseline"]["drem_poles"], n - 1, positive=True)
    cubic_poles = _vector("cubic.drem_poles", cfg["cubic"]["drem_poles"], 2, positive=True)
    out = cfg.get("output", {}).get("dir", DEFAULT_OUT)
    if not isinstance(out, str) or not out:
        raise ConfigError("output.dir", "expected a non-empty string")

    return Scenario(
        A=A, B=B, C=C, x0=x0,
        xi0=_vector("gpebo.xi0", cfg["gpebo"]["xi0"], n),
        u=u, delta=delta,
        L=_vector("luenberger.L", cfg["luenberger"]["L"], n),
        xhat0=_vector("luenberger.xhat0", cfg["luenberger"]["xhat0"], n),
        drem_poles=drem_poles,
        baseline_gamma=_real("baseline.gamma", cfg["baseline"]["gamma"], positive=True),
        smoothing_pole=_real("cubic.smoothing_pole", cfg["cubic"]["smoothing_pole"], positive=True),
        cubic_poles=cubic_poles,
        cubic_gamma=_vector("cubic.gamma", cfg["cubic"]["gamma"], n, positive=True),
        t0=t0, t_end=t_end, h=h, output_dir=out, source=cfg,
    )


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            cfg = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("<file>", f"{path}: {exc}") from None
    return scenario_from_dict(cfg)


PAPER_CONFIG = Path(__file__).with_name("data") / "paper.toml"


def paper_scenario(**overrides) -> Scenario:
    """The published comparison: harmonic plant, step input, 0.3 sin(t) on the output."""
    from dataclasses import replace

    s = Scenario(
        A=((0.0, 1.0), (-9.0, 0.0)),
        B=(0.0, 1.0),
        C=(5.0, 0.0),
        x0=(1.0, 2.0),
        xi0=(0.0, 0.0),
        u=SignalSpec("unit-step"),
        delta=SignalSpec("sinusoid", amplitude=0.3, omega=1.0),
        L=(2.0, 3.2),
        xhat0=(0.0, 0.0),
        drem_poles=(1.0,),
        baseline_gamma=1.0,
        smoothing_pole=1.0,
        cubic_poles=(2.0, 6.0),
        cubic_gamma=(1e11, 1e13),
        output_dir="observer_lab_out/paper",
    )
    return replace(s, **overrides) if overrides else s
