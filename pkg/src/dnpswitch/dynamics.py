"""Time integration of the Overhauser field toward a stable fixed point."""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import IntegrationDivergedError, PolarizationRangeError, RelaxationError
from .model import MU_B, rate_coefficients, resonant_flip_flop_rate
from .steadystate import DEFAULT_GRID_N, DEFAULT_TOL_B

CONV_RTOL = 1e-9  # times Gamma_d * B_sat
CONV_COUNT = 10
DT_FACTOR = 0.1
T_MAX_DECAYS = 50.0


@dataclass
class Trajectory:
    times: np.ndarray
    values: np.ndarray
    converged: bool
    final_B_N: float


def convergence_threshold(params):
    return CONV_RTOL * params.Gamma_d * params.B_sat


def max_rate(params, drive):
    """Upper bound on |d(dB_N/dt)/dB_N| over the whole state interval.

    The pump term is ``w_s(B) (target - B)``; besides ``w_s`` itself its
    derivative carries the Lorentzian slope times the lever arm
    ``|target + B_z|``, which dominates for narrow broadening.
    """
    w_res = resonant_flip_flop_rate(params, drive)
    kappa = abs(params.g_e) * MU_B
    lever = abs(drive.helicity * params.B_sat + drive.B_z)
    slope = 0.75 * math.sqrt(3.0) * kappa * lever / params.gamma
    return params.Gamma_d + w_res * (1.5 + slope)


def _check_start(params, B_N0):
    if abs(B_N0) > params.B_sat:
        raise PolarizationRangeError(B_N0, params.B_sat)


def integrate(params, drive, B_N0, t_max, dt, conv_eps=None, conv_count=CONV_COUNT):
    """Fixed-step RK4 from ``B_N0``, clamped to [-B_sat, B_sat], stopping early once settled."""
    _check_start(params, B_N0)
    if not dt > 0:
        raise ValueError("dt must be positive")
    if not t_max > dt:
        raise ValueError("t_max must exceed dt")
    if conv_eps is None:
        conv_eps = convergence_threshold(params)
    nsteps = int(math.ceil(t_max / dt))
    coeffs = rate_coefficients(params, drive)
    values, n_done, converged, diverged = kernels.rk4(
        float(B_N0), dt, nsteps, params.B_sat, conv_eps, conv_count, True, coeffs
    )
    times = dt * np.arange(n_done + 1, dtype=np.float64)
    if diverged:
        raise IntegrationDivergedError(float(values[-1]), float(times[-1]))
    return Trajectory(times, values, bool(converged), float(values[-1]))


def _follow_flow(params, coeffs, B, grid_n=DEFAULT_GRID_N, tol_B=DEFAULT_TOL_B):
    """First zero of dB_N/dt reached from ``B`` moving with the flow.

    A one-dimensional autonomous flow is monotone, so wherever integration
    stalls (close to a fold) its limit is the nearest root downstream.
    """
    f0 = kernels.rate(B, coeffs)
    if f0 == 0.0:
        return B
    end = params.B_sat if f0 > 0 else -params.B_sat
    n = max(2, int(math.ceil(grid_n * abs(end - B) / (2.0 * params.B_sat))))
    f = kernels.rate_grid(B, end, n, coeffs)
    flips = np.nonzero((f == 0.0) | (np.sign(f) != np.sign(f0)))[0]
    if flips.size == 0:
        return None
    i = int(flips[0])
    x_i = B + (end - B) * i / n
    if f[i] == 0.0:
        return x_i
    x_prev = B + (end - B) * (i - 1) / n
    a, b = (x_prev, x_i) if x_prev < x_i else (x_i, x_prev)
    fa = f[i - 1] if x_prev < x_i else f[i]
    return kernels.bisect(a, b, fa, tol_B, coeffs)


def relax(params, drive, B_N0, dt=None, t_max=None):
    """Settle ``B_N0`` onto the stable fixed point of its basin and return it."""
    _check_start(params, B_N0)
    if dt is None:
        dt = DT_FACTOR / max_rate(params, drive)
    if t_max is None:
        t_max = T_MAX_DECAYS / params.Gamma_d
    nsteps = int(math.ceil(t_max / dt))
    coeffs = rate_coefficients(params, drive)
    values, n_done, converged, diverged = kernels.rk4(
        float(B_N0), dt, nsteps, params.B_sat, convergence_threshold(params), CONV_COUNT, False, coeffs
    )
    final = float(values[-1])
    if diverged:
        raise IntegrationDivergedError(final, n_done * dt)
    if converged:
        return final
    landed = _follow_flow(params, coeffs, final)
    if landed is None:
        traj = Trajectory(np.array([0.0, n_done * dt]), np.array([B_N0, final]), False, final)
        raise RelaxationError("relaxation did not converge", traj)
    return float(landed)
