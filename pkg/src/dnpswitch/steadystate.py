"""Fixed points of the Overhauser rate equation and their stability."""

from dataclasses import dataclass

from . import kernels
from .errors import MarginalFixedPointError
from .model import rate_coefficients, resonant_flip_flop_rate

STABLE = "stable"
UNSTABLE = "unstable"

DEFAULT_GRID_N = 20000
MIN_GRID_N = 1000
DEFAULT_TOL_B = 1e-6  # T
DEFAULT_H = 1e-5  # T
MARGINAL_RTOL = 1e-9


@dataclass(frozen=True)
class FixedPoint:
    B_N: float
    stability: str
    slope: float  # d(dB_N/dt)/dB_N at the root, 1/s

    @property
    def stable(self):
        return self.stability == STABLE


def rate_scale(params, drive):
    """Characteristic rate used to judge a slope as numerically zero."""
    return max(params.Gamma_d, resonant_flip_flop_rate(params, drive))


def classify(params, drive, root, h=DEFAULT_H, coeffs=None):
    """Label a root by the sign of the finite-difference slope of dB_N/dt."""
    if h <= 0:
        raise ValueError("h must be positive")
    if coeffs is None:
        coeffs = rate_coefficients(params, drive)
    bsat = params.B_sat
    lo, hi = root - h, root + h
    if hi > bsat:
        lo, hi = root - h, root
    elif lo < -bsat:
        lo, hi = root, root + h
    slope = (kernels.rate(hi, coeffs) - kernels.rate(lo, coeffs)) / (hi - lo)
    if abs(slope) < MARGINAL_RTOL * rate_scale(params, drive):
        raise MarginalFixedPointError(root, slope)
    return FixedPoint(root, STABLE if slope < 0 else UNSTABLE, slope)


def find_fixed_points(params, drive, grid_n=DEFAULT_GRID_N, tol_B=DEFAULT_TOL_B, h=DEFAULT_H):
    """All roots of dB_N/dt on [-B_sat, B_sat], ascending, each classified.

    Sign changes on a uniform ``grid_n``-cell scan are refined by bisection
    to ``tol_B``; roots closer than ``2 tol_B`` are merged.
    """
    if grid_n < MIN_GRID_N:
        raise ValueError(f"grid_n must be >= {MIN_GRID_N}")
    if tol_B <= 0:
        raise ValueError("tol_B must be positive")
    coeffs = rate_coefficients(params, drive)
    if coeffs.coef == 0.0:
        # no pumping: pure decay -Gamma_d B_N, whose only root is exactly 0
        return [classify(params, drive, 0.0, h, coeffs)]
    roots, _ = kernels.find_roots(-params.B_sat, params.B_sat, int(grid_n), tol_B, coeffs)
    return [classify(params, drive, float(r), h, coeffs) for r in roots]


def stable_points(points):
    return [p for p in points if p.stable]


def is_bistable(params, drive, **kwargs):
    return len(stable_points(find_fixed_points(params, drive, **kwargs))) >= 2
