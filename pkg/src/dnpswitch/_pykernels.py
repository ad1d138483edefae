"""Pure-Python kernels, used when the compiled extension is unavailable.

Every function mirrors ``_ckernels`` operation for operation so the two
backends agree to the last bit on ordinary inputs.
"""

import math

import numpy as np


def rate(B, coef, kappa, bz, q, target, gd):
    E = kappa * (bz + B)
    return coef / (E * E + q) * (target - B) - gd * B


def rate_grid(lo, hi, n, coef, kappa, bz, q, target, gd):
    B = lo + (hi - lo) * np.arange(n + 1, dtype=np.float64) / n
    E = kappa * (bz + B)
    return coef / (E * E + q) * (target - B) - gd * B


def bisect(a, b, fa, tol, coef, kappa, bz, q, target, gd):
    while b - a > tol:
        m = 0.5 * (a + b)
        fm = rate(m, coef, kappa, bz, q, target, gd)
        if fm == 0.0:
            return m
        if (fa < 0.0) == (fm < 0.0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def find_roots(lo, hi, n, tol, coef, kappa, bz, q, target, gd):
    args = (coef, kappa, bz, q, target, gd)
    roots = []
    step = (hi - lo) / n
    x_prev = lo
    f_prev = rate(lo, *args)
    if f_prev == 0.0:
        roots.append(lo)
    for i in range(1, n + 1):
        x = lo + (hi - lo) * i / n
        f = rate(x, *args)
        if f == 0.0:
            roots.append(x)
        elif f_prev != 0.0 and (f_prev < 0.0) != (f < 0.0):
            roots.append(bisect(x_prev, x, f_prev, tol, *args))
        x_prev, f_prev = x, f
    merged = []
    for r in roots:
        if merged and r - merged[-1] < 2.0 * tol:
            continue
        merged.append(r)
    return np.array(merged, dtype=np.float64), step


def rk4(B0, dt, nsteps, bsat, conv_eps, conv_count, record, coef, kappa, bz, q, target, gd):
    """Fixed-step RK4 with clamping and early stop.

    Returns ``(values, n_done, converged, diverged)``; ``values`` has
    ``n_done + 1`` entries when ``record`` is set and is empty otherwise.
    On divergence the last entry is the last finite state.
    """
    args = (coef, kappa, bz, q, target, gd)
    out = [B0] if record else None
    B = B0
    k1 = rate(B, *args)
    quiet = 0
    n_done = 0
    converged = False
    diverged = False
    half = 0.5 * dt
    sixth = dt / 6.0
    for _ in range(nsteps):
        k2 = rate(B + half * k1, *args)
        k3 = rate(B + half * k2, *args)
        k4 = rate(B + dt * k3, *args)
        Bn = B + sixth * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not math.isfinite(Bn):
            diverged = True
            break
        if Bn > bsat:
            Bn = bsat
        elif Bn < -bsat:
            Bn = -bsat
        B = Bn
        n_done += 1
        if record:
            out.append(B)
        k1 = rate(B, *args)
        if not math.isfinite(k1):
            diverged = True
            break
        if abs(k1) < conv_eps:
            quiet += 1
            if quiet >= conv_count:
                converged = True
                break
        else:
            quiet = 0
    if record:
        values = np.array(out, dtype=np.float64)
    else:
        values = np.array([B], dtype=np.float64)
    return values, n_done, converged, diverged
