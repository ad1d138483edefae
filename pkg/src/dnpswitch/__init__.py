"""Overhauser-field switching of an optically pumped, biased quantum dot."""

from .config import parse_config
from .dynamics import integrate, relax
from .model import DeviceGeometry, DriveConditions, ModelParams, polarization_rate
from .steadystate import FixedPoint, find_fixed_points, is_bistable
from .sweeps import SweepSpec, bistability_atlas, run_hysteresis, run_sweep, threshold_power

__all__ = [
    "DeviceGeometry",
    "DriveConditions",
    "FixedPoint",
    "ModelParams",
    "SweepSpec",
    "bistability_atlas",
    "find_fixed_points",
    "integrate",
    "is_bistable",
    "parse_config",
    "polarization_rate",
    "relax",
    "run_hysteresis",
    "run_sweep",
    "threshold_power",
]
