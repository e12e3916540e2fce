"""Compare the compiled and pure-Python kernel backends.

Run with ``python3 benchmarks/bench_kernels.py [--repeat N]``. Each case
checks that both backends return bit-identical arrays before timing.
"""
import argparse
import statistics
import time

import numpy as np

from observer_lab.kernels import compiled_available, get_backend


def case_plant(steps=60000):
    M = np.array([[0.0, 1.0], [-9.0, 0.0]])
    F = np.zeros((steps, 2))
    F[:, 1] = 1.0
    return "lti_rk4 n=2 (plant)", "lti_rk4", (M, F, F.copy(), F.copy(), np.array([1.0, 2.0]), 1e-3)


def case_filter(steps=60000):
    t = np.arange(steps + 1) * 1e-3
    s = np.sin(t)[:, None]
    return "lti_rk4 n=1 (lag filter)", "lti_rk4", (
        np.array([[-2.0]]), 2.0 * s[:-1], 2.0 * np.sin(t[:-1] + 5e-4)[:, None], 2.0 * s[1:], np.zeros(1), 1e-3,
    )


def case_gradient(steps=60000, nsub=8):
    t = np.arange(steps + 1) * 1e-3
    phi = 2.0 + np.sin(t)
    return f"gradient_flow nsub={nsub}", "gradient_flow", (1.5 * phi, phi, 100.0, 1e-3, 0.0, nsub)


def timed(fn, args, repeat):
    runs = []
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn(*args)
        runs.append(time.perf_counter() - start)
    return out, statistics.median(runs)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)
    if not compiled_available():
        raise SystemExit("compiled kernels not built; run `pip install -e . --no-build-isolation`")
    py, cc = get_backend("python"), get_backend("compiled")
    print(f"{'case':<28}{'python [s]':>12}{'compiled [s]':>14}{'speedup':>10}")
    for label, name, cargs in (case_plant(), case_filter(), case_gradient()):
        a, tp = timed(getattr(py, name), cargs, args.repeat)
        b, tc = timed(getattr(cc, name), cargs, args.repeat)
        if not np.array_equal(a, b):
            raise SystemExit(f"{label}: backends disagree")
        print(f"{label:<28}{tp:>12.4f}{tc:>14.5f}{tp / tc:>9.0f}x")


if __name__ == "__main__":
    main()
