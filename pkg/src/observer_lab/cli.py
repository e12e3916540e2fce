"""Command-line entry point: ``observer-lab {run,paper,sweep,validate}``.

Exit codes: 0 success, 1 invalid configuration, 2 runtime failure.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .errors import ConfigError
from .experiment import cubic_defect_sweep, run_scenario
from .export import export_all, write_csv
from .scenario import load_scenario, paper_scenario

log = logging.getLogger("observer_lab")

ENV_OUT = "OBSERVER_LAB_OUT"
SWEEP_BAND = (4.0, 16.0)


def _outdir(args, scenario) -> Path:
    if getattr(args, "out", None):
        return Path(args.out)
    if os.environ.get(ENV_OUT):
        return Path(os.environ[ENV_OUT])
    return Path(scenario.output_dir)


def _execute(scenario, outdir):
    result = run_scenario(scenario)
    files = export_all(result, outdir)
    m = result.metrics
    print(f"wrote {len(files)} files to {outdir}")
    for s in result.schemes:
        th = ", ".join(f"{v:.4g}" for v in m["theta_error"][s]["tail_mean"])
        eps = ", ".join(f"{v:.4g}" for v in m["state_error"][s]["eps"])
        print(f"  {s}: mean tail |theta error| = [{th}]  eps = [{eps}]")
    a2 = m["assumption2"]
    for i, (mx, ok) in enumerate(zip(a2["max_abs_delta1"], a2["ok"])):
        flag = "ok" if ok else "VIOLATED"
        print(f"  max|delta1_{i + 1}| = {mx:.4g} ({flag})")
    return 0


def cmd_run(args):
    scenario = load_scenario(args.config)
    return _execute(scenario, _outdir(args, scenario))


def cmd_paper(args):
    scenario = paper_scenario()
    return _execute(scenario, _outdir(args, scenario))


def cmd_validate(args):
    scenario = load_scenario(args.config)
    print(f"{args.config}: ok (n={scenario.n}, {scenario.grid.count} samples)")
    return 0


def _scales(text):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if len(vals) < 2 or any(v <= 0 for v in vals):
        raise argparse.ArgumentTypeError("need at least two positive scale factors")
    return vals


def cmd_sweep(args):
    scenario = load_scenario(args.config) if args.config else paper_scenario()
    rows = cubic_defect_sweep(scenario, args.delta_scale)
    n = scenario.n
    head = ["scale"] + [f"rms{i + 1}" for i in range(n)] + [f"ratio{i + 1}" for i in range(n)]
    print("  ".join(f"{h:>12}" for h in head))
    in_band = True
    for r in rows:
        ratio = r["ratio"] or [None] * n
        cells = [f"{r['scale']:>12.4g}"] + [f"{v:>12.4e}" for v in r["rms"]]
        cells += [f"{'-':>12}" if v is None else f"{v:>12.3f}" for v in ratio]
        print("  ".join(cells))
        if r["ratio"]:
            in_band &= all(SWEEP_BAND[0] <= v <= SWEEP_BAND[1] for v in r["ratio"])
    outdir = _outdir(args, scenario)
    outdir.mkdir(parents=True, exist_ok=True)
    cols = {f"rms{i + 1}": [r["rms"][i] for r in rows] for i in range(n)}
    write_csv(outdir / "sweep.csv", [r["scale"] for r in rows], cols)
    print(f"defect ratios {'within' if in_band else 'OUTSIDE'} [{SWEEP_BAND[0]:g}, {SWEEP_BAND[1]:g}]")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="observer-lab", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a scenario from a TOML config and export CSV/SVG")
    r.add_argument("config")
    r.add_argument("--out", help="output directory (overrides $OBSERVER_LAB_OUT and the config)")
    r.set_defaults(func=cmd_run)

    pp = sub.add_parser("paper", help="run the built-in published scenario")
    pp.add_argument("--out")
    pp.set_defaults(func=cmd_paper)

    s = sub.add_parser("sweep", help="cubic-defect scaling over disturbance amplitudes")
    s.add_argument("--delta-scale", type=_scales, default=[1.0, 0.5, 0.25])
    s.add_argument("--config", help="scenario config (default: built-in published scenario)")
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("validate", help="check a config file without running it")
    v.add_argument("config")
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1 if args.command in ("run", "validate") else 2
    except Exception as exc:  # noqa: BLE001
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
