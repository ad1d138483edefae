"""Stateless evaluation of the optically pumped Overhauser-field rate equation.

Units are fixed throughout the package: tesla for fields, microelectronvolt for
Zeeman and hyperfine energies, millielectronvolt for the ground-state detuning
and phonon energy, milliwatt, volt, second and nanometer.

Sign convention: ``B_N`` is the signed Overhauser component along ``B_z``.
sigma- pumping drives it negative, so the electron splitting
``g_e mu_B (B_z + B_N)`` closes as the nuclei polarize.
"""

import math
from dataclasses import dataclass, field, fields
from typing import NamedTuple

from .errors import InvariantError, NoEscapeChannelError, PolarizationRangeError

#: Bohr magneton in microelectronvolt per tesla.
MU_B = 57.883

SIGMA_PLUS = +1
SIGMA_MINUS = -1


def _require(ok, key, message):
    if not ok:
        raise InvariantError(key, f"violates invariant {message}")


def _require_finite(obj):
    for f in fields(obj):
        value = getattr(obj, f.name)
        if isinstance(value, float) and not math.isfinite(value):
            raise InvariantError(f.name, f"violates invariant {f.name} is finite")


@dataclass(frozen=True)
class DeviceGeometry:
    d_bar: float = 25.0  # nm, tunnel barrier below the dot
    d_tot: float = 230.0  # nm, whole intrinsic region
    E_LO: float = 32.6  # meV
    V_charging: float = 0.0  # V, ground state level with the Fermi edge

    def __post_init__(self):
        for f in fields(self):
            object.__setattr__(self, f.name, float(getattr(self, f.name)))
        _require_finite(self)
        _require(self.d_bar > 0, "d_bar", "0 < d_bar")
        _require(self.d_bar < self.d_tot, "d_tot", "d_bar < d_tot")
        _require(self.E_LO > 0, "E_LO", "E_LO > 0")


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of the dot and diode.

    Defaults are the calibrated reference set shipped in ``reference.conf``.
    """

    g_e: float = 0.6
    gamma: float = 13.0  # ueV
    A_hf: float = 1.0  # ueV
    k_pump: float = 1.0e9  # 1/(s mW)
    B_sat: float = 8.0  # T
    Gamma_d: float = 1.0  # 1/s
    Gamma_r: float = 1.0e9  # 1/s
    Gamma_t0: float = 6.0e8  # 1/s
    V_onset: float = -0.4  # V
    V_slope: float = 0.05  # V
    Gamma_cot0: float = 1.0e9  # 1/s
    W_cot: float = 3.0  # meV, FWHM
    eta_tunnel: float = 60.0
    C_rate: float = 3.43e-8
    g_X: float = 1.9744  # exciton g-factor of the zero-polarization splitting
    geometry: DeviceGeometry = field(default_factory=DeviceGeometry)

    def __post_init__(self):
        for f in fields(self):
            if f.name != "geometry":
                object.__setattr__(self, f.name, float(getattr(self, f.name)))
        _require_finite(self)
        for key in ("gamma", "A_hf", "B_sat", "Gamma_d", "Gamma_r", "W_cot", "C_rate", "V_slope"):
            _require(getattr(self, key) > 0, key, f"{key} > 0")
        for key in ("k_pump", "Gamma_t0", "Gamma_cot0", "eta_tunnel", "g_X"):
            _require(getattr(self, key) >= 0, key, f"{key} >= 0")
        if not isinstance(self.geometry, DeviceGeometry):
            raise InvariantError("geometry", "violates invariant geometry is a DeviceGeometry")


@dataclass(frozen=True)
class DriveConditions:
    B_z: float = 2.0  # T
    P: float = 0.3  # mW
    V_app: float = -0.45  # V
    helicity: int = SIGMA_MINUS

    def __post_init__(self):
        object.__setattr__(self, "B_z", float(self.B_z))
        object.__setattr__(self, "P", float(self.P))
        object.__setattr__(self, "V_app", float(self.V_app))
        _require_finite(self)
        _require(self.B_z >= 0, "B_z", "B_z >= 0")
        _require(self.P >= 0, "P", "P >= 0")
        _require(self.helicity in (SIGMA_PLUS, SIGMA_MINUS), "helicity", "helicity in {+1, -1}")
        object.__setattr__(self, "helicity", int(self.helicity))


@dataclass(frozen=True)
class RateBreakdown:
    delta_E_e: float  # ueV
    w_x_eff: float  # 1/s
    w_s: float  # 1/s
    Gamma_t: float  # 1/s
    Gamma_cot: float  # 1/s
    rho_e: float
    dBN_dt: float  # T/s


class RateCoefficients(NamedTuple):
    """Drive-level constants of ``dB_N/dt`` in the flat form the kernels take.

    ``dB_N/dt = coef / ((kappa (B_z + B_N))^2 + q) * (target - B_N) - gd * B_N``
    """

    coef: float
    kappa: float
    B_z: float
    q: float
    target: float
    gd: float


def electron_zeeman(params, B_z, B_N):
    """Electron Zeeman splitting in ueV for the total field ``B_z + B_N``."""
    return params.g_e * MU_B * (B_z + B_N)


def overhauser_target(params, helicity):
    """Fully pumped Overhauser field selected by the pump helicity."""
    return helicity * params.B_sat


def ground_state_detuning(geometry, V_app):
    """Height of the dot ground state above the contact Fermi edge, in meV."""
    dv = geometry.V_charging - V_app
    if dv <= 0:
        return 0.0
    return 1000.0 * dv * geometry.d_bar / geometry.d_tot


def tunneling_rate(params, V_app):
    # logistic onset, written to avoid exp overflow far from V_onset
    x = (V_app - params.V_onset) / params.V_slope
    if x > 0:
        e = math.exp(-x)
        s = e / (1.0 + e)
    else:
        s = 1.0 / (1.0 + math.exp(x))
    return params.Gamma_t0 * s


def cotunneling_rate(params, V_app):
    """Phonon-assisted co-tunneling rate: unit-peak Lorentzian in ``dE_GS - E_LO``."""
    x = ground_state_detuning(params.geometry, V_app) - params.geometry.E_LO
    hw2 = (0.5 * params.W_cot) ** 2
    return params.Gamma_cot0 * hw2 / (x * x + hw2)


def spin_retention(Gamma_r, Gamma_t, Gamma_cot):
    """Probability that the photo-created electron leaves the dot with its spin intact."""
    escape = Gamma_r + Gamma_t
    if not escape > 0:
        raise NoEscapeChannelError()
    return escape / (escape + Gamma_cot)


def _channels(params, V_app):
    Gamma_t = tunneling_rate(params, V_app)
    Gamma_cot = cotunneling_rate(params, V_app)
    rho_e = spin_retention(params.Gamma_r, Gamma_t, Gamma_cot)
    return Gamma_t, Gamma_cot, rho_e


def effective_pump_rate(params, drive):
    """Spin-polarized re-excitation rate ``w_x_eff`` in 1/s."""
    Gamma_t, _, rho_e = _channels(params, drive.V_app)
    boost = 1.0 + params.eta_tunnel * Gamma_t / (params.Gamma_r + Gamma_t)
    return params.k_pump * drive.P * rho_e * boost


def flip_flop_rate(params, w_x_eff, delta_E_e):
    """Hyperfine flip-flop rate: a Lorentzian in the electron Zeeman energy cost."""
    return params.C_rate * w_x_eff * params.A_hf ** 2 / (
        delta_E_e * delta_E_e + params.gamma * params.gamma / 4.0
    )


def rate_coefficients(params, drive):
    w_x_eff = effective_pump_rate(params, drive)
    return RateCoefficients(
        coef=params.C_rate * w_x_eff * params.A_hf ** 2,
        kappa=params.g_e * MU_B,
        B_z=drive.B_z,
        q=params.gamma * params.gamma / 4.0,
        target=overhauser_target(params, drive.helicity),
        gd=params.Gamma_d,
    )


def resonant_flip_flop_rate(params, drive):
    """``w_s`` at zero electron splitting, the fastest pumping the drive allows."""
    return flip_flop_rate(params, effective_pump_rate(params, drive), 0.0)


def polarization_rate(params, drive, B_N):
    """Evaluate every intermediate rate and the net ``dB_N/dt`` at one state."""
    if abs(B_N) > params.B_sat:
        raise PolarizationRangeError(B_N, params.B_sat)
    Gamma_t, Gamma_cot, rho_e = _channels(params, drive.V_app)
    w_x_eff = effective_pump_rate(params, drive)
    dE = electron_zeeman(params, drive.B_z, B_N)
    w_s = flip_flop_rate(params, w_x_eff, dE)
    target = overhauser_target(params, drive.helicity)
    return RateBreakdown(
        delta_E_e=dE,
        w_x_eff=w_x_eff,
        w_s=w_s,
        Gamma_t=Gamma_t,
        Gamma_cot=Gamma_cot,
        rho_e=rho_e,
        dBN_dt=w_s * (target - B_N) - params.Gamma_d * B_N,
    )


def emit_observable(params, B_z, B_N):
    """Model X+ Zeeman splitting in ueV, the quantity plotted in the sweeps."""
    return params.g_X * MU_B * B_z - params.g_e * MU_B * abs(B_N)
