#!/usr/bin/env python3
"""Time the hot paths under each available kernel backend.

    python benchmarks/bench_kernels.py [--repeat N]

Reports the best of N wall-clock timings per workload and the speedup of the
compiled backend over the pure-Python one.
"""

import argparse
import time

from dnpswitch import kernels
from dnpswitch.dynamics import relax
from dnpswitch.model import DriveConditions, ModelParams, rate_coefficients
from dnpswitch.steadystate import find_fixed_points
from dnpswitch.sweeps import SweepSpec, run_hysteresis

PARAMS = ModelParams()
BISTABLE = DriveConditions(B_z=2.0, P=0.25, V_app=-0.45, helicity=-1)
COEFFS = rate_coefficients(PARAMS, BISTABLE)


def work_rate_grid():
    kernels.rate_grid(-PARAMS.B_sat, PARAMS.B_sat, 200_000, COEFFS)


def work_find_roots():
    find_fixed_points(PARAMS, BISTABLE)


def work_rk4():
    kernels.rk4(-0.1, 1e-3, 20_000, PARAMS.B_sat, 0.0, 10, False, COEFFS)


def work_relax():
    relax(PARAMS, DriveConditions(B_z=2.0, P=0.31, V_app=-0.45, helicity=-1), -0.8)


def work_hysteresis():
    run_hysteresis(PARAMS, SweepSpec("power", 0.0, 0.6, 61, DriveConditions(2.0, 0.0, -0.45, -1)))


WORKLOADS = {
    "rate_grid 2e5": work_rate_grid,
    "find_fixed_points": work_find_roots,
    "rk4 2e4 steps": work_rk4,
    "relax across fold": work_relax,
    "power hysteresis 61": work_hysteresis,
}


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = kernels.available_backends()
    previous = kernels.backend()
    results = {}
    for name in backends:
        kernels.use_backend(name)
        results[name] = {w: best_of(fn, args.repeat) for w, fn in WORKLOADS.items()}
    kernels.use_backend(previous)

    head = f"{'workload':<22}" + "".join(f"{b:>12}" for b in backends)
    if len(backends) > 1:
        head += f"{'speedup':>10}"
    print(head)
    for w in WORKLOADS:
        line = f"{w:<22}" + "".join(f"{results[b][w] * 1e3:>10.2f}ms" for b in backends)
        if "cython" in results and "python" in results:
            line += f"{results['python'][w] / results['cython'][w]:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
