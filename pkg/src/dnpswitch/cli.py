"""Command-line driver: ``dnpswitch {steady,sweep,atlas,pthr}``.

Exit codes: 0 success, 1 usage or config error, 2 numerical warning
(marginal fixed point, failed relaxation).
"""

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .config import parse_config
from .errors import (
    ConfigError,
    IntegrationDivergedError,
    InvariantError,
    MarginalFixedPointError,
    RelaxationError,
    SweepError,
)
from .steadystate import find_fixed_points
from .sweeps import (
    AXIS_FIELDS,
    AxisSpec,
    SweepSpec,
    bistability_atlas,
    local_maxima,
    run_hysteresis,
    run_sweep,
    threshold_power_curve,
)

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2
NUMERIC_ERRORS = (MarginalFixedPointError, RelaxationError, IntegrationDivergedError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2, which is reserved here for numerical warnings
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(x):
    return format(float(x), ".9g")


def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _emit_csv(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _report_path(args):
    if getattr(args, "report", None):
        return Path(args.report)
    if args.out:
        return Path(args.out).with_suffix(".json")
    return None


def _write_report(path, command, args, params, drive, exit_status, **extra):
    if path is None:
        return
    options = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "command")}
    report = {
        "command": command,
        "options": options,
        "parameters": asdict(params),
        "drive": asdict(drive),
        "exit_status": exit_status,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        **extra,
    }
    Path(path).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _drive_from_args(drive, args):
    changes = {}
    for flag, name in (("bz", "B_z"), ("power", "P"), ("bias", "V_app"), ("helicity", "helicity")):
        value = getattr(args, flag, None)
        if value is not None:
            changes[name] = value
    return replace(drive, **changes)


def _fixed_point_dicts(points):
    return [{"B_N": p.B_N, "stability": p.stability, "slope": p.slope} for p in points]


def cmd_steady(args):
    params, drive = parse_config(args.config)
    drive = _drive_from_args(drive, args)
    try:
        points = find_fixed_points(params, drive)
    except MarginalFixedPointError as exc:
        _write_report(args.out and Path(args.out), "steady", args, params, drive, EXIT_NUMERIC, error=str(exc))
        raise
    rows = [(fmt(p.B_N), p.stability, fmt(p.slope)) for p in points]
    sys.stdout.write(_csv_text(["B_N_tesla", "stability", "slope_per_s"], rows))
    _write_report(
        args.out and Path(args.out), "steady", args, params, drive, EXIT_OK,
        fixed_points=_fixed_point_dicts(points),
    )
    return EXIT_OK


def _sweep_rows(result, direction):
    for i, v in enumerate(result.axis_values):
        yield (
            fmt(v),
            fmt(result.B_N[i]),
            fmt(result.E_e[i]),
            fmt(result.E_X[i]),
            int(result.threshold_flags[i]),
            direction,
        )


def _threshold_dicts(result, direction):
    return [{"direction": direction, "axis_value": t.axis_value, "jump_tesla": t.jump} for t in result.thresholds]


def cmd_sweep(args):
    params, drive = parse_config(args.config)
    drive = _drive_from_args(drive, args)
    start, stop = args.start, args.stop
    if args.direction == "down":
        start, stop = stop, start
    try:
        spec = SweepSpec(args.axis, start, stop, args.steps, drive, args.init)
    except (ValueError, InvariantError) as exc:
        raise UsageError(str(exc)) from None
    if args.direction == "both":
        loop = run_hysteresis(params, spec)
        runs = [("up", loop.up), ("down", loop.down)]
        extra = {"loop_area": loop.loop_area}
    else:
        runs = [(args.direction, run_sweep(params, spec))]
        extra = {}
    rows = [row for name, res in runs for row in _sweep_rows(res, name)]
    header = ["axis_value", "B_N_tesla", "E_e_ueV", "E_X_ueV", "threshold_flag", "direction"]
    _emit_csv(_csv_text(header, rows), args.out)
    thresholds = [t for name, res in runs for t in _threshold_dicts(res, name)]
    _write_report(_report_path(args), "sweep", args, params, drive, EXIT_OK, thresholds=thresholds, **extra)
    return EXIT_OK


def _axis_spec(text):
    try:
        axis, start, stop, steps = text.split(":")
        return AxisSpec(axis, float(start), float(stop), int(steps))
    except (ValueError, InvariantError) as exc:
        raise UsageError(f"bad grid spec {text!r} (want axis:start:stop:steps): {exc}") from None


def cmd_atlas(args):
    params, drive = parse_config(args.config)
    drive = _drive_from_args(drive, args)
    x, y = _axis_spec(args.x), _axis_spec(args.y)
    try:
        atlas = bistability_atlas(params, x, y, drive, grid_n=args.grid_n)
    except (ValueError, InvariantError) as exc:
        raise UsageError(str(exc)) from None
    header = [f"{y.axis}\\{x.axis}"] + [fmt(v) for v in atlas.x_values]
    rows = [[fmt(yv)] + [int(c) for c in atlas.counts[j]] for j, yv in enumerate(atlas.y_values)]
    _emit_csv(_csv_text(header, rows), args.out)
    box = atlas.region(2)
    region = None
    if box is not None:
        region = {f"{x.axis}_min": box[0], f"{x.axis}_max": box[1], f"{y.axis}_min": box[2], f"{y.axis}_max": box[3]}
    _write_report(
        _report_path(args), "atlas", args, params, drive, EXIT_OK,
        bistable_region=region,
        marginal_cells=int(np.sum(atlas.counts < 0)),
    )
    return EXIT_OK


def cmd_pthr(args):
    params, drive = parse_config(args.config)
    drive = _drive_from_args(drive, args)
    if args.bias_steps < 2 or args.bias_from == args.bias_to:
        raise UsageError("bias range needs --bias-steps >= 2 and distinct endpoints")
    if not args.pmax > 0 or not args.resolution > 0:
        raise UsageError("--pmax and --resolution must be positive")
    biases = np.linspace(args.bias_from, args.bias_to, args.bias_steps)
    p_thr = threshold_power_curve(params, drive.B_z, biases, args.pmax, args.resolution, drive.helicity)
    rows = [(fmt(v), "" if p is None else fmt(p)) for v, p in zip(biases, p_thr)]
    _emit_csv(_csv_text(["bias_V", "P_thr_mW"], rows), args.out)
    peaks = [{"bias_V": v, "P_thr_mW": p} for v, p in local_maxima(biases, p_thr)]
    _write_report(
        _report_path(args), "pthr", args, params, drive, EXIT_OK,
        thresholds=[{"bias_V": float(v), "P_thr_mW": p} for v, p in zip(biases, p_thr)],
        local_maxima=peaks,
    )
    return EXIT_OK


def _add_drive_flags(p):
    p.add_argument("--bz", type=float, help="external field B_z, T")
    p.add_argument("--power", type=float, help="excitation power, mW")
    p.add_argument("--bias", type=float, help="applied bias, V")
    p.add_argument("--helicity", type=int, choices=(-1, 1), help="pump helicity (-1 sigma-, +1 sigma+)")


def build_parser():
    ap = _Parser(prog="dnpswitch", description="Optically pumped nuclear spin switching in a biased quantum dot.")
    ap.add_argument("-c", "--config", help="config file (default: shipped reference set)")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("steady", help="fixed points at one drive point")
    _add_drive_flags(p)
    p.add_argument("--out", help="JSON report path")
    p.set_defaults(func=cmd_steady)

    p = sub.add_parser("sweep", help="quasi-static sweep along one axis")
    _add_drive_flags(p)
    p.add_argument("--axis", required=True, choices=sorted(AXIS_FIELDS))
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--steps", type=int, default=61)
    p.add_argument("--direction", choices=("both", "up", "down"), default="both")
    p.add_argument("--init", type=float, default=0.0, help="initial B_N, T")
    p.add_argument("--out", help="CSV path (JSON report written alongside)")
    p.add_argument("--report", help="JSON report path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("atlas", help="stable-root count over a 2-D drive grid")
    _add_drive_flags(p)
    p.add_argument("--x", required=True, help="axis:start:stop:steps")
    p.add_argument("--y", required=True, help="axis:start:stop:steps")
    p.add_argument("--grid-n", type=int, default=20000)
    p.add_argument("--out", help="CSV path (JSON report written alongside)")
    p.add_argument("--report", help="JSON report path")
    p.set_defaults(func=cmd_atlas)

    p = sub.add_parser("pthr", help="switching threshold power versus bias")
    _add_drive_flags(p)
    p.add_argument("--bias-from", type=float, required=True)
    p.add_argument("--bias-to", type=float, required=True)
    p.add_argument("--bias-steps", type=int, required=True)
    p.add_argument("--pmax", type=float, required=True)
    p.add_argument("--resolution", type=float, default=0.002, help="mW")
    p.add_argument("--out", help="CSV path (JSON report written alongside)")
    p.add_argument("--report", help="JSON report path")
    p.set_defaults(func=cmd_pthr)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, UsageError) as exc:
        print(f"dnpswitch: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantError as exc:
        print(f"dnpswitch: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NUMERIC_ERRORS + (SweepError,) as exc:
        print(f"dnpswitch: warning: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
