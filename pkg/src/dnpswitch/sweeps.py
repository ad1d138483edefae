"""Quasi-static sweeps, switching thresholds and the static bistability atlas.

Sweeps are path dependent: each point relaxes from the previous point's
settled field, so the state follows a branch until it disappears at a fold
and then jumps. The atlas instead counts stable roots cell by cell with no
memory at all.
"""

from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .dynamics import relax
from .errors import DnpError, MarginalFixedPointError, SweepError
from .model import DriveConditions, electron_zeeman, emit_observable
from .steadystate import DEFAULT_TOL_B, find_fixed_points, stable_points

AXIS_FIELDS = {"power": "P", "bias": "V_app", "field": "B_z"}
AXIS_UNITS = {"power": "mW", "bias": "V", "field": "T"}

JUMP_TOL = 0.5  # T
MARGINAL = -1  # atlas sentinel


def _check_axis(axis, start, stop):
    if axis not in AXIS_FIELDS:
        raise ValueError(f"unknown axis {axis!r}; expected one of {sorted(AXIS_FIELDS)}")
    if axis in ("power", "field") and min(start, stop) < 0:
        raise ValueError(f"{axis} axis values must be >= 0")


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    start: float
    stop: float
    steps: int
    fixed: DriveConditions = field(default_factory=DriveConditions)
    B_N_init: float = 0.0

    def __post_init__(self):
        _check_axis(self.axis, self.start, self.stop)
        if int(self.steps) != self.steps or self.steps < 2:
            raise ValueError("steps must be ≥ 2")
        if self.start == self.stop:
            raise ValueError("start and stop must differ")

    def values(self):
        return np.linspace(self.start, self.stop, int(self.steps))

    def drive_at(self, value):
        return replace(self.fixed, **{AXIS_FIELDS[self.axis]: float(value)})

    def reversed(self, B_N_init):
        return replace(self, start=self.stop, stop=self.start, B_N_init=B_N_init)


class Threshold(NamedTuple):
    axis_value: float  # first point on the new branch
    jump: float  # signed change of B_N, T


@dataclass
class SweepResult:
    axis: str
    axis_values: np.ndarray
    B_N: np.ndarray
    E_e: np.ndarray
    E_X: np.ndarray
    thresholds: list
    threshold_flags: np.ndarray


@dataclass
class HysteresisResult:
    up: SweepResult
    down: SweepResult
    loop_area: float


def run_sweep(params, spec, jump_tol=JUMP_TOL, stop_at_first=False, values=None):
    """Follow the relaxed Overhauser field along ``spec``'s axis in order.

    ``values`` replaces ``spec.values()``; hysteresis uses it to retrace the
    forward grid exactly.
    """
    if abs(spec.B_N_init) > params.B_sat:
        raise ValueError("|B_N_init| exceeds B_sat")
    values = spec.values() if values is None else np.asarray(values, dtype=float)
    B_out, E_e, E_X, thresholds, flags = [], [], [], [], []
    B = float(spec.B_N_init)
    for i, v in enumerate(values):
        drive = spec.drive_at(v)
        try:
            B_new = relax(params, drive, B)
        except DnpError as exc:
            raise SweepError(float(v), exc) from exc
        jumped = i > 0 and abs(B_new - B) > jump_tol
        if jumped:
            thresholds.append(Threshold(float(v), B_new - B))
        flags.append(jumped)
        B = B_new
        B_out.append(B)
        E_e.append(electron_zeeman(params, drive.B_z, B))
        E_X.append(emit_observable(params, drive.B_z, B))
        if stop_at_first and thresholds:
            values = values[: i + 1]
            break
    return SweepResult(
        spec.axis,
        values,
        np.array(B_out),
        np.array(E_e),
        np.array(E_X),
        thresholds,
        np.array(flags, dtype=bool),
    )


def branch_gap(up, down, tol=DEFAULT_TOL_B):
    """|B_up - B_down| on the up-sweep grid; gaps below ``tol`` are relaxation noise."""
    gap = np.abs(up.B_N - down.B_N[::-1])
    gap[gap < tol] = 0.0
    return gap


def run_hysteresis(params, spec, jump_tol=JUMP_TOL):
    """Sweep forward, then back along the same grid seeded with the end state."""
    up = run_sweep(params, spec, jump_tol)
    down = run_sweep(params, spec.reversed(float(up.B_N[-1])), jump_tol, values=up.axis_values[::-1])
    gap = branch_gap(up, down)
    x = up.axis_values
    area = abs(float(np.sum(0.5 * (gap[1:] + gap[:-1]) * np.diff(x))))
    return HysteresisResult(up, down, area)


def threshold_power(params, B_z, V_app, p_max, resolution, helicity=-1, steps=60, jump_tol=JUMP_TOL):
    """Power at which an upward sweep first switches, or None below ``p_max``.

    A coarse sweep brackets the switch; the bracket is then halved by
    relaxing from the last pre-switch state, which continues the sweep prefix
    and so keeps the path dependence.
    """
    if not p_max > 0:
        raise ValueError("p_max must be positive")
    if not resolution > 0:
        raise ValueError("resolution must be positive")
    base = DriveConditions(B_z=B_z, P=0.0, V_app=V_app, helicity=helicity)
    spec = SweepSpec("power", 0.0, p_max, steps, base)
    coarse = run_sweep(params, spec, jump_tol, stop_at_first=True)
    if not coarse.thresholds:
        return None
    hi = coarse.thresholds[0].axis_value
    lo = float(coarse.axis_values[-2])
    B_lo = float(coarse.B_N[-2])
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        try:
            B_mid = relax(params, spec.drive_at(mid), B_lo)
        except DnpError as exc:
            raise SweepError(mid, exc) from exc
        if abs(B_mid - B_lo) > jump_tol:
            hi = mid
        else:
            lo, B_lo = mid, B_mid
    return hi


def threshold_power_curve(params, B_z, biases, p_max, resolution, helicity=-1, steps=60):
    return [
        threshold_power(params, B_z, float(v), p_max, resolution, helicity, steps) for v in biases
    ]


def local_maxima(xs, ys):
    """Interior points strictly above both neighbours, skipping missing values."""
    found = []
    for i in range(1, len(ys) - 1):
        a, b, c = ys[i - 1], ys[i], ys[i + 1]
        if a is None or b is None or c is None:
            continue
        if b > a and b > c:
            found.append((float(xs[i]), b))
    return found


@dataclass(frozen=True)
class AxisSpec:
    axis: str
    start: float
    stop: float
    steps: int

    def __post_init__(self):
        _check_axis(self.axis, self.start, self.stop)
        if int(self.steps) != self.steps or self.steps < 2:
            raise ValueError("grid dimensions must be >= 2")
        if self.start == self.stop:
            raise ValueError("start and stop must differ")

    def values(self):
        return np.linspace(self.start, self.stop, int(self.steps))


@dataclass
class Atlas:
    x: AxisSpec
    y: AxisSpec
    x_values: np.ndarray
    y_values: np.ndarray
    counts: np.ndarray  # (ny, nx); MARGINAL where classification failed

    def region(self, count=2):
        """Bounding box ``(x_min, x_max, y_min, y_max)`` of cells with ``count`` stable roots."""
        iy, ix = np.nonzero(self.counts == count)
        if iy.size == 0:
            return None
        return (
            float(self.x_values[ix].min()),
            float(self.x_values[ix].max()),
            float(self.y_values[iy].min()),
            float(self.y_values[iy].max()),
        )


def bistability_atlas(params, x, y, base=None, **fp_kwargs):
    """Stable-root count on the ``y`` by ``x`` grid of drive conditions."""
    if x.axis == y.axis:
        raise ValueError("atlas axes must differ")
    base = base or DriveConditions()
    xs, ys = x.values(), y.values()
    counts = np.zeros((len(ys), len(xs)), dtype=int)
    for j, yv in enumerate(ys):
        row = replace(base, **{AXIS_FIELDS[y.axis]: float(yv)})
        for i, xv in enumerate(xs):
            drive = replace(row, **{AXIS_FIELDS[x.axis]: float(xv)})
            try:
                counts[j, i] = len(stable_points(find_fixed_points(params, drive, **fp_kwargs)))
            except MarginalFixedPointError:
                counts[j, i] = MARGINAL
    return Atlas(x, y, xs, ys, counts)
