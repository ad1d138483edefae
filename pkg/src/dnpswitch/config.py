"""Config file loading and the shipped reference parameter set.

Format: ``key = value`` lines grouped under ``[model]``, ``[geometry]`` and
``[drive]`` headers, ``#`` starts a comment. Keys are the field names of
:class:`ModelParams`, :class:`DeviceGeometry` and :class:`DriveConditions`;
anything missing takes the reference value.
"""

from dataclasses import fields
from importlib import resources

from .errors import ConfigError, InvariantError
from .model import DeviceGeometry, DriveConditions, ModelParams

SECTIONS = {
    "model": [f.name for f in fields(ModelParams) if f.name != "geometry"],
    "geometry": [f.name for f in fields(DeviceGeometry)],
    "drive": [f.name for f in fields(DriveConditions)],
}

UNITS = {
    "g_e": "electron g-factor",
    "gamma": "ueV, electron state broadening",
    "A_hf": "ueV, hyperfine coupling scale",
    "k_pump": "1/(s mW), optical pump rate per unit power",
    "B_sat": "T, fully polarized Overhauser field",
    "Gamma_d": "1/s, nuclear depolarization",
    "Gamma_r": "1/s, radiative recombination",
    "Gamma_t0": "1/s, saturated tunneling escape rate",
    "V_onset": "V, tunneling onset bias",
    "V_slope": "V, tunneling onset width",
    "Gamma_cot0": "1/s, peak phonon-assisted co-tunneling rate",
    "W_cot": "meV, co-tunneling resonance FWHM",
    "eta_tunnel": "tunneling pumping enhancement",
    "C_rate": "flip-flop rate prefactor",
    "g_X": "exciton g-factor of the unpolarized X+ splitting",
    "d_bar": "nm, tunnel barrier below the dot",
    "d_tot": "nm, intrinsic region",
    "E_LO": "meV, GaAs LO phonon energy used for the co-tunneling resonance",
    "V_charging": "V, ground state aligned with the contact Fermi edge",
    "B_z": "T, external field",
    "P": "mW, excitation power",
    "V_app": "V, applied bias (reverse < 0)",
    "helicity": "+1 sigma+, -1 sigma-",
}

CALIBRATED = {"gamma", "Gamma_t0", "eta_tunnel", "Gamma_cot0", "C_rate", "B_sat", "g_X"}


def reference_config_path():
    return resources.files(__package__) / "reference.conf"


def _parse_value(key, text, line):
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"invalid value for {key}: {text!r}", line) from None
    if key == "helicity":
        if value != int(value):
            raise ConfigError(f"invalid value for {key}: {text!r}", line)
        return int(value)
    return value


def parse_text(text, source="<config>"):
    """Parse config text into ``(ModelParams, DriveConditions)``."""
    values = {name: {} for name in SECTIONS}
    where = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in SECTIONS:
                raise ConfigError(f"unknown section [{section}]", lineno)
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", lineno)
        key, _, val = (part.strip() for part in line.partition("="))
        if section is None:
            raise ConfigError(f"key {key!r} outside any section", lineno)
        if key not in SECTIONS[section]:
            raise ConfigError(f"unknown key {key!r} in [{section}]", lineno)
        if key in where:
            raise ConfigError(f"duplicate key {key!r} (first set on line {where[key]})", lineno)
        values[section][key] = _parse_value(key, val, lineno)
        where[key] = lineno

    def build(cls, kwargs, section):
        try:
            return cls(**kwargs)
        except InvariantError as exc:
            line = where.get(exc.key)
            if line is None and values[section]:
                line = max(where[k] for k in values[section])
            raise ConfigError(str(exc), line) from None

    geometry = build(DeviceGeometry, values["geometry"], "geometry")
    params = build(ModelParams, {**values["model"], "geometry": geometry}, "model")
    drive = build(DriveConditions, values["drive"], "drive")
    return params, drive


def parse_config(path):
    """Load and validate a config file; ``None`` gives the reference set."""
    if path is None:
        return ModelParams(), DriveConditions()
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except UnicodeDecodeError:
        raise ConfigError(f"config {path} is not valid UTF-8") from None
    return parse_text(text, str(path))


def render_config(params, drive, header=None):
    lines = []
    if header:
        lines += [f"# {h}" for h in header] + [""]
    blocks = {"model": params, "geometry": params.geometry, "drive": drive}
    for section, obj in blocks.items():
        lines.append(f"[{section}]")
        for key in SECTIONS[section]:
            note = UNITS[key]
            if key in CALIBRATED:
                note += "; calibrated"
            lines.append(f"{key} = {getattr(obj, key)!r}  # {note}")
        lines.append("")
    return "\n".join(lines)


def write_reference_config(path):
    header = [
        "Reference parameter set for the single-dot Overhauser switching model.",
        "Values marked 'calibrated' come from scripts/calibrate.py, a coordinate",
        "search matching three measured anchors: the 0.3 mW power switch at",
        "(2.0 T, -0.45 V); bias switches near -0.45 V and -0.1 V at (2.1 T, 0.4 mW);",
        "and the threshold-power bump at the LO-phonon co-tunneling resonance.",
        "Geometry is the device stack (25 nm barrier, 230 nm intrinsic region).",
    ]
    text = render_config(ModelParams(), DriveConditions(), header)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
