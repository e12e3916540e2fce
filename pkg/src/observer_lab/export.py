"""CSV and SVG export of experiment results."""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .experiment import SCHEME_LABELS, ExperimentResult

COLORS = ("#1f77b4", "#d62728", "#2ca02c")
MAX_POINTS = 1500


def figure_ids(r: ExperimentResult) -> list[str]:
    ids = [f"theta{i + 1}" for i in range(r.n)]
    return ids + [f"e{i + 1}" for i in range(r.n)]


def figure_series(r: ExperimentResult, which: str) -> dict:
    """Per-scheme columns behind figure ``which`` (``theta<i>`` or ``e<i>``, 1-based)."""
    for prefix, source in (("theta", r.theta_hat), ("e", r.errors)):
        if which.startswith(prefix) and which[len(prefix):].isdigit():
            i = int(which[len(prefix):]) - 1
            if 0 <= i < r.n:
                return {s: source[s][:, i] for s in r.schemes}
    raise ValueError(f"unknown figure id {which!r}; expected one of {figure_ids(r)}")


def _fmt(v: float) -> str:
    return "%.17g" % v


def write_csv(path, t, columns: dict) -> Path:
    path = Path(path)
    names = list(columns)
    lines = [",".join(["t", *names])]
    cols = [np.asarray(columns[k]) for k in names]
    for k in range(len(t)):
        lines.append(",".join([_fmt(t[k]), *(_fmt(c[k]) for c in cols)]))
    try:
        path.write_text("\n".join(lines) + "\n", encoding="ascii")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def read_csv(path) -> tuple[list[str], np.ndarray]:
    """Header and float matrix of a CSV written by ``write_csv``."""
    with open(path, encoding="ascii") as fh:
        header = fh.readline().rstrip("\n").split(",")
        data = np.array([[float(x) for x in line.split(",")] for line in fh if line.strip()])
    return header, data


def export_csv(r: ExperimentResult, path) -> list[Path]:
    """One ``<figure>.csv`` per figure id, columns ``t, scheme1, scheme2, scheme3``."""
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    t = r.grid.times
    return [write_csv(out / f"{fid}.csv", t, figure_series(r, fid)) for fid in figure_ids(r)]


def export_metrics(r: ExperimentResult, path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    doc = {"metrics": r.metrics, "provenance": r.provenance, "theta_true": r.theta_true.tolist()}
    target = out / "metrics.json"
    target.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="ascii")
    return target


def _ticks(lo, hi, count=5):
    if hi == lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step) * step
    ticks = []
    v = first
    while v <= hi + 1e-12 * step:
        ticks.append(0.0 if abs(v) < 1e-12 * step else v)
        v += step
    return ticks


def _svg_text(x, y, s, anchor="middle", size=12):
    return f'<text x="{x:.2f}" y="{y:.2f}" font-size="{size}" text-anchor="{anchor}">{s}</text>'


def render_svg(t, series: dict, title: str, ylabel: str, labels=None) -> str:
    if len(t) < 2 or not series:
        raise ValueError("nothing to plot: result is empty")
    t = np.asarray(t, dtype=float)
    stride = max(1, math.ceil(len(t) / MAX_POINTS))
    idx = np.arange(0, len(t), stride)
    if idx[-1] != len(t) - 1:
        idx = np.append(idx, len(t) - 1)
    ys = {k: np.asarray(v, dtype=float)[idx] for k, v in series.items()}
    allv = np.concatenate(list(ys.values()))
    if not np.all(np.isfinite(allv)):
        raise ValueError("cannot plot non-finite values")
    ylo, yhi = float(allv.min()), float(allv.max())
    if yhi - ylo < 1e-12:
        ylo, yhi = ylo - 1.0, yhi + 1.0
    pad = 0.05 * (yhi - ylo)
    ylo, yhi = ylo - pad, yhi + pad
    tlo, thi = float(t[0]), float(t[-1])

    W, H = 800, 480
    left, right, top, bottom = 80, 190, 40, 60
    pw, ph = W - left - right, H - top - bottom

    def sx(v):
        return left + (v - tlo) / (thi - tlo) * pw

    def sy(v):
        return top + (yhi - v) / (yhi - ylo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
        _svg_text(left + pw / 2, 24, title, size=15),
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for v in _ticks(tlo, thi):
        x = sx(v)
        out.append(f'<line x1="{x:.2f}" y1="{top + ph}" x2="{x:.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(_svg_text(x, top + ph + 20, f"{v:g}"))
    for v in _ticks(ylo, yhi):
        y = sy(v)
        out.append(f'<line x1="{left - 5}" y1="{y:.2f}" x2="{left}" y2="{y:.2f}" stroke="black"/>')
        out.append(f'<line x1="{left}" y1="{y:.2f}" x2="{left + pw}" y2="{y:.2f}" stroke="#dddddd"/>')
        out.append(_svg_text(left - 8, y + 4, f"{v:.4g}", anchor="end"))
    out.append(_svg_text(left + pw / 2, H - 18, "t, s"))
    out.append(
        f'<text x="20" y="{top + ph / 2:.2f}" font-size="12" text-anchor="middle" '
        f'transform="rotate(-90 20 {top + ph / 2:.2f})">{ylabel}</text>'
    )
    tt = t[idx]
    for j, (name, v) in enumerate(ys.items()):
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(tt, v))
        color = COLORS[j % len(COLORS)]
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{pts}"/>')
        ly = top + 20 + 22 * j
        lx = left + pw + 15
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 25}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        label = (labels or {}).get(name, name)
        out.append(_svg_text(lx + 32, ly + 4, f"{name}: {label}", anchor="start", size=11))
    out.append("</svg>")
    return "\n".join(out) + "\n"


def export_svg(r: ExperimentResult, which: str, path) -> Path:
    """Write ``<path>/<which>.svg``; one polyline per scheme."""
    series = figure_series(r, which)
    if which.startswith("theta"):
        title = f"Estimate of theta_{which[5:]}"
        ylabel = f"theta_{which[5:]} estimate"
    else:
        title = f"State error e_{which[1:]} = x_{which[1:]} - xhat_{which[1:]}"
        ylabel = f"e_{which[1:]}"
    svg = render_svg(r.grid.times, series, title, ylabel, SCHEME_LABELS)
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    target = out / f"{which}.svg"
    target.write_text(svg, encoding="utf-8")
    return target


def export_all(r: ExperimentResult, path) -> list[Path]:
    files = export_csv(r, path)
    files += [export_svg(r, fid, path) for fid in figure_ids(r)]
    files.append(export_metrics(r, path))
    return files
