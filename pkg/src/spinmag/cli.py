"""Command-line front end.

    spinmag steady-state -c system.toml --epsilon0 1e3
    spinmag stability    -c system.toml
    spinmag entangle     -c system.toml --pair m1-m2 --pair a-m1
    spinmag resonance    -c system.toml
    spinmag sweep --preset fig1a --format csv --out fig1a.csv

Without ``-c`` the packaged baseline configuration is used.  Exit codes:
0 success, 1 computational / configuration / I/O error (a JSON error object
is printed), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from . import __version__
from .config import load_document, loads_document, params_from_dict, params_to_si
from .dynamics import drift_matrix, is_stable, linear_model
from .entanglement import entanglement_of, resolve_kerr_shift
from .errors import SpinmagError
from .params import KerrCoefficient, KerrShift, mhz, rabi_frequency, to_mhz
from .squeezing import optimal_detunings, squeezing_frame
from .steady_state import (nonreciprocity_of_occupations, solve_steady_state_selfconsistent,
                           solve_steady_state_shift_mode)
from .sweep import PRESETS, SWEEPABLE, Axis, SweepSpec, nonreciprocity_map, preset_spec, run_sweep


class UsageError(Exception):
    pass


def _baseline_bytes():
    return resources.files("spinmag").joinpath("data/baseline.toml").read_bytes()


def _load(args):
    if args.config:
        doc, digest = load_document(args.config)
    else:
        doc, digest = loads_document(_baseline_bytes(), "<baseline>")
    params = params_from_dict(doc)
    manifest = {
        "tool": "spinmag",
        "version": __version__,
        "subcommand": args.command,
        "config": str(args.config) if args.config else "<baseline>",
        "input_sha256": digest,
        "params_entered": doc,
        "params_converted": params_to_si(params),
    }
    return params, manifest


def dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _emit(text, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _json_only(args):
    if args.format != "json":
        raise UsageError(f"'{args.command}' only supports --format json")


def _epsilon0(args, params):
    if args.epsilon0 is not None:
        return mhz(args.epsilon0)
    if args.power is not None:
        return rabi_frequency(args.power * 1e-3, params.kappa_a, params.omega_L)
    if isinstance(params.kerr, KerrCoefficient):
        return params.epsilon0
    raise UsageError("give --epsilon0 (MHz) or --power (mW)")


def cmd_steady_state(args, params, manifest):
    _json_only(args)
    eps = _epsilon0(args, params)
    mode = args.mode or ("drive" if isinstance(params.kerr, KerrCoefficient) else "shift")
    if mode == "drive":
        if not isinstance(params.kerr, KerrCoefficient):
            raise UsageError("--mode drive needs kerr.coefficient in the config")
        states = solve_steady_state_selfconsistent(params, eps, n_starts=args.starts)
    else:
        if not isinstance(params.kerr, KerrShift):
            raise UsageError("--mode shift needs kerr.shift in the config")
        states = [solve_steady_state_shift_mode(params, eps)]
    if args.real_gauge:
        states = [s.real_magnon_gauge() for s in states]
    result = {"mode": mode, "epsilon0": eps, "solutions": [s.to_dict() for s in states],
              "multistable": len(states) > 1}
    if args.directions:
        result["directions"] = nonreciprocity_of_occupations(params, eps).to_dict()
    return {"manifest": manifest, "result": result}


def cmd_stability(args, params, manifest):
    _json_only(args)
    dK = resolve_kerr_shift(params)
    rep = is_stable(drift_matrix(params, dK), max(params.kappa_a, *params.kappa_m))
    model = linear_model(params, dK)
    result = rep.to_dict()
    result["delta_K"] = list(dK)
    result["effective_detunings"] = list(model.effective_detunings)
    return {"manifest": manifest, "result": result}


def cmd_entangle(args, params, manifest):
    _json_only(args)
    pairs = args.pair or ["m1-m2"]
    parsed = []
    for p in pairs:
        try:
            a, b = p.split("-")
        except ValueError:
            raise UsageError(f"pair must look like m1-m2, got {p!r}") from None
        parsed.append((a, b))
    dK = resolve_kerr_shift(params)
    results = entanglement_of(params, parsed, delta_K=dK)
    return {"manifest": manifest,
            "result": {"delta_K": list(dK), "pairs": [r.to_dict() for r in results]}}


def cmd_resonance(args, params, manifest):
    _json_only(args)
    dK = resolve_kerr_shift(params)
    branches = optimal_detunings(params.delta_a, params.delta_F, dK)
    out = []
    for br in branches:
        d = br.to_dict(unit=mhz(1.0))
        d["delta_m_unit"] = "MHz"
        frame = squeezing_frame(params.with_(delta_m=br.delta_m), dK)
        d["frame"] = frame.to_dict()
        out.append(d)
    return {"manifest": manifest,
            "result": {"delta_a_minus_delta_F_MHz": to_mhz(params.delta_a - params.delta_F),
                       "branches": out}}


def _sweep_spec(args, params):
    if args.preset and args.axis:
        raise UsageError("use either --preset or --axis")
    pair = tuple(args.pair.split("-")) if args.pair else ("m1", "m2")
    if args.preset:
        if args.preset not in PRESETS:
            raise UsageError(f"unknown preset {args.preset!r}")
        spec = preset_spec(args.preset, params if args.config else None, args.points)
        if args.pair:
            spec = SweepSpec(spec.base, spec.axes, pair, spec.preset)
        return spec
    if not args.axis:
        raise UsageError("sweep needs --preset or at least one --axis")
    if len(args.axis) > 2:
        raise UsageError("at most two --axis options")
    try:
        axes = tuple(Axis.parse(a) for a in args.axis)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return SweepSpec(params, axes, pair)


def cmd_sweep(args, params, manifest):
    spec = _sweep_spec(args, params)
    if args.nonreciprocity:
        _json_only(args)
        res = nonreciprocity_map(spec, args.nonreciprocity, workers=args.workers)
        return {"manifest": manifest, "result": res.to_dict()}
    res = run_sweep(spec, workers=args.workers)
    if args.format == "csv":
        return res.to_csv(manifest)
    return {"manifest": manifest, "result": res.to_dict()}


COMMANDS = {
    "steady-state": cmd_steady_state,
    "stability": cmd_stability,
    "entangle": cmd_entangle,
    "resonance": cmd_resonance,
    "sweep": cmd_sweep,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", help="TOML system configuration (default: baseline)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="write output to this path instead of stdout")

    parser = argparse.ArgumentParser(prog="spinmag", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"spinmag {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("steady-state", parents=[common], help="mean-field steady state")
    p.add_argument("--mode", choices=("shift", "drive"),
                   help="fixed Kerr shifts or self-consistent Kerr coefficients")
    p.add_argument("--epsilon0", type=float, help="drive amplitude epsilon0/2pi in MHz")
    p.add_argument("--power", type=float, help="drive power in mW")
    p.add_argument("--starts", type=int, default=16, help="initial guesses in drive mode")
    p.add_argument("--real-gauge", action="store_true",
                   help="rotate the global phase so that m1 is real")
    p.add_argument("--directions", action="store_true",
                   help="also report CW / CCW occupation numbers")

    sub.add_parser("stability", parents=[common], help="drift-matrix eigenvalues and verdict")

    p = sub.add_parser("entangle", parents=[common], help="logarithmic negativity at one point")
    p.add_argument("--pair", action="append", help="mode pair, e.g. m1-m2, a-m1, a-m2 (repeatable)")

    sub.add_parser("resonance", parents=[common], help="optimal magnon detunings")

    names = ", ".join(PRESETS)
    p = sub.add_parser("sweep", parents=[common], help="1D/2D parameter sweep",
                       epilog=f"presets: {names}.  sweepable paths: {', '.join(SWEEPABLE)}")
    p.add_argument("--preset", help=f"figure panel preset: {names}")
    p.add_argument("--axis", action="append",
                   help="path:min:max:points in MHz (temperature in mK); give once or twice")
    p.add_argument("--pair", help="mode pair (default m1-m2)")
    p.add_argument("--points", type=int, help="override points per main preset axis")
    p.add_argument("--workers", type=int, help="process count (capped by SPINMAG_MAX_WORKERS)")
    p.add_argument("--nonreciprocity", choices=("sagnac", "kerr"),
                   help="run with the chosen shift at +|x| and -|x| and report the difference")
    return parser


def _error(exc, kind):
    sys.stdout.write(dumps({"error": {"type": kind, "message": str(exc)}}))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        params, manifest = _load(args)
        out = COMMANDS[args.command](args, params, manifest)
        _emit(out if isinstance(out, str) else dumps(out), args.out)
    except UsageError as exc:
        parser.error(str(exc))
    except SpinmagError as exc:
        _error(exc, exc.code)
        return 1
    except (ArithmeticError, ValueError) as exc:
        _error(exc, "numerical")
        return 1
    except OSError as exc:
        _error(exc, "io")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
