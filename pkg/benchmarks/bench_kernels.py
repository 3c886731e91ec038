#!/usr/bin/env python3
"""Time the compiled kernels against the pure-Python fallback.

Both backends compute bit-identical results (the test suite asserts exact
equality), so this script is only about speed.  Run it from the repo root:

    python3 benchmarks/bench_kernels.py [--scale N]

``--scale`` multiplies every repetition count (default 1).
"""

import argparse
import time

import numpy as np

from antizeno._kernels import _pure

try:
    from antizeno._kernels import _native
except ImportError:
    _native = None


def _time(fn, reps):
    start = time.perf_counter()
    for _ in range(reps):
        fn()
    return time.perf_counter() - start


def _workloads(scale):
    rng = np.random.default_rng(99)
    a0 = rng.standard_normal(3)
    a0 /= np.linalg.norm(a0)
    wt = rng.standard_normal(3)
    wt /= np.linalg.norm(wt)
    args = (a0[0], a0[1], a0[2], wt[0], wt[1], wt[2])

    thetas = np.arccos(rng.uniform(-1.0, 1.0, size=10))
    phis = rng.uniform(0.0, 2.0 * np.pi, size=10)

    g = 24
    tg = np.repeat(np.linspace(0.0, np.pi, g), g)
    pg = np.tile(np.linspace(0.0, 2.0 * np.pi, g, endpoint=False), g)
    wxs = np.ascontiguousarray(np.sin(tg) * np.cos(pg))
    wys = np.ascontiguousarray(np.sin(tg) * np.sin(pg))
    wzs = np.ascontiguousarray(np.cos(tg))
    total = (g * g) ** 2

    def fold(mod):
        return lambda: mod.qubit_fold(*args, thetas, phis)

    def sweep(mod):
        def run():
            # sweep mutates its angle buffers, so hand it a fresh copy
            mod.sweep_pass(*args, thetas.copy(), phis.copy(), 12, 16, 1e-8)

        return run

    def grid(mod):
        return lambda: mod.grid_scan(*args, wxs, wys, wzs, 2, total)

    return [
        ("qubit_fold (10 dirs)", fold, 100_000 * scale),
        ("sweep_pass (10 dirs)", sweep, 200 * scale),
        ("grid_scan (24x24)^2", grid, 3 * scale),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--scale", type=int, default=1)
    args = parser.parse_args()

    if _native is None:
        print("compiled backend not available; timing the fallback only")

    print(f"{'kernel':<22} {'reps':>8} {'python (s)':>12} "
          f"{'cython (s)':>12} {'speedup':>8}")
    for label, make, reps in _workloads(args.scale):
        t_pure = _time(make(_pure), reps)
        if _native is None:
            print(f"{label:<22} {reps:>8} {t_pure:>12.4f} {'-':>12} {'-':>8}")
            continue
        t_native = _time(make(_native), reps)
        ratio = t_pure / t_native if t_native > 0 else float("inf")
        print(f"{label:<22} {reps:>8} {t_pure:>12.4f} "
              f"{t_native:>12.4f} {ratio:>7.1f}x")


if __name__ == "__main__":
    main()
