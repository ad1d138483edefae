#!/usr/bin/env python3
"""Coordinate search for the reference parameter set.

Targets: the upward power switch at (2.0 T, -0.45 V) sits at 0.30 mW, and the
bias loop at (2.1 T, 0.4 mW) switches near -0.45 V going into reverse bias and
near -0.10 V coming back. Prints the fitted values; paste them into
``ModelParams`` and regenerate ``reference.conf`` with ``--write``.
"""

import argparse
import math
from dataclasses import replace

import numpy as np

from dnpswitch.config import write_reference_config
from dnpswitch.model import DriveConditions, ModelParams
from dnpswitch.sweeps import SweepSpec, run_hysteresis, threshold_power

FREE = ("C_rate", "gamma", "Gamma_t0", "eta_tunnel")


def bias_thresholds(params, steps=161):
    spec = SweepSpec("bias", 0.2, -0.6, steps, DriveConditions(2.1, 0.4, 0.0, -1))
    loop = run_hysteresis(params, spec)
    into = loop.up.thresholds[0].axis_value if loop.up.thresholds else 0.2
    back = loop.down.thresholds[0].axis_value if loop.down.thresholds else -0.6
    return into, back


def loss(params):
    p_thr = threshold_power(params, 2.0, -0.45, 1.0, 1e-4)
    if p_thr is None:
        return math.inf
    v1, v2 = bias_thresholds(params)
    return ((p_thr - 0.30) / 0.01) ** 2 + ((v2 + 0.10) / 0.01) ** 2 + 0.1 * ((v1 + 0.45) / 0.01) ** 2


def coordinate_search(params, rounds=6, step=0.2):
    best = loss(params)
    for r in range(rounds):
        for name in FREE:
            for sign in (+1, -1):
                trial = replace(params, **{name: getattr(params, name) * math.exp(sign * step)})
                value = loss(trial)
                if value < best:
                    params, best = trial, value
        print(f"round {r}: loss {best:.4g} " + " ".join(f"{n}={getattr(params, n):.6g}" for n in FREE))
        step *= 0.5
    return params, best


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rounds", type=int, default=6)
    ap.add_argument("--write", metavar="PATH", help="write the current ModelParams defaults as a config file")
    args = ap.parse_args()
    if args.write:
        write_reference_config(args.write)
        return
    params, best = coordinate_search(ModelParams(), args.rounds)
    print("final:", {n: float(np.format_float_positional(getattr(params, n), 4, fractional=False)) for n in FREE})
    print("P_thr", threshold_power(params, 2.0, -0.45, 1.0, 1e-4), "bias", bias_thresholds(params))


if __name__ == "__main__":
    main()
