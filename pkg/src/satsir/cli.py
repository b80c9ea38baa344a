"""Command-line front end: analyze, sweep, map, simulate, hopf.

Exit codes: 0 success, 2 invalid input, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__, _backend, cycles, hopf, report, svg, sweep
from .integrate import InitOutsideDomain, IntegrationError, integrate
from .model import PARAM_KEYS, ParameterError, load_params

EXIT_OK, EXIT_INPUT, EXIT_RUNTIME = 0, 2, 3


def _shared(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--params", metavar="FILE", help="parameter file with 'key = value' lines")
    for key in PARAM_KEYS:
        parser.add_argument(f"--{key}", type=float, default=None, help=f"override {key}")
    parser.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    parser.add_argument("--json", action="store_true", help="machine-readable JSON output")
    parser.add_argument("--plot", metavar="SVG", help="also write an SVG figure")
    parser.add_argument("--threads", type=int, default=None, help="worker threads (default: all CPUs)")
    parser.add_argument("--rtol", type=float, default=1e-8)
    parser.add_argument("--atol", type=float, default=1e-10)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="satsir", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="thresholds, equilibria and stability of one parameter set")
    _shared(p)

    p = sub.add_parser("sweep", help="equilibrium branches over one parameter")
    _shared(p)
    p.add_argument("--param", default="beta2", choices=PARAM_KEYS)
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)
    p.add_argument("-n", "--points", type=int, default=400)
    p.add_argument("--log", action="store_true", help="log-spaced grid")
    p.add_argument("--verify", action="store_true", help="integration spot-checks on a subsample")

    p = sub.add_parser("map", help="region map over (alpha2, beta2)")
    _shared(p)
    p.add_argument("--alpha2-range", type=_pair, default=(0.1, 20.0), metavar="LO,HI")
    p.add_argument("--beta2-range", type=_pair, default=(0.001, 0.1), metavar="LO,HI")
    p.add_argument("--resolution", type=int, default=50)
    p.add_argument("--log", action="store_true")

    p = sub.add_parser("simulate", help="integrate one trajectory")
    _shared(p)
    p.add_argument("--init", type=_pair, required=True, metavar="S,I")
    p.add_argument("--t", type=float, required=True, dest="t_end", metavar="T")
    p.add_argument("--samples", type=int, default=None,
                   help="resample uniformly at this many times (default: step nodes)")

    p = sub.add_parser("hopf", help="locate Hopf points of E2 along one parameter")
    _shared(p)
    p.add_argument("--param", default="beta2", choices=PARAM_KEYS)
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)
    p.add_argument("--brackets", type=int, default=50)
    p.add_argument("--verify", action="store_true",
                   help="check each predicted cycle by integrating on both sides of the point")
    return parser


def _pair(text: str) -> tuple[float, float]:
    try:
        a, b = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two comma-separated numbers, got {text!r}")
    return a, b


def _params(args):
    overrides = {k: getattr(args, k) for k in PARAM_KEYS}
    if args.params is None and any(v is None for v in overrides.values()):
        missing = next(k for k, v in overrides.items() if v is None)
        raise ParameterError(missing, "missing required parameter (give --params FILE or --" + missing + ")")
    return load_params(args.params, overrides)


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        _sidecar(args)
    else:
        sys.stdout.write(text)


def _sidecar(args) -> None:
    """Run metadata lives next to the data file so the data itself stays deterministic."""
    meta = {"command": args.command, "argv": sys.argv[1:], "backend": _backend.BACKEND,
            "version": __version__, "finished": time.strftime("%Y-%m-%dT%H:%M:%S%z")}
    with open(args.out + ".meta.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_analyze(args) -> int:
    params = _params(args)
    rep = report.analysis_report(params)
    _emit(args, report.to_json(rep) if args.json else report.to_text(rep))
    return EXIT_OK


def cmd_sweep(args) -> int:
    params = _params(args)
    rows = sweep.bifurcation_sweep(params, args.param, args.lo, args.hi, args.points,
                                   log=args.log, threads=args.threads)
    if args.json:
        text = json.dumps([r.__dict__ for r in rows], indent=2, sort_keys=True) + "\n"
    else:
        text = sweep.rows_csv_text(rows)
    _emit(args, text)
    if args.plot:
        svg.branch_diagram(rows).save(args.plot)
    if args.verify:
        checks = sweep.verify_sweep(params, args.param, rows)
        bad = [c for c in checks if not c.ok]
        print(f"verify: {len(checks) - len(bad)}/{len(checks)} spot-checks agree", file=sys.stderr)
        for c in bad:
            print(f"  mismatch at {args.param}={c.param_value!r}: {c.equilibrium} expected "
                  f"{c.expected}, observed {c.observed}", file=sys.stderr)
        if bad:
            return EXIT_RUNTIME
    return EXIT_OK


def cmd_map(args) -> int:
    params = _params(args)
    cells = sweep.region_map(params, args.alpha2_range, args.beta2_range, args.resolution,
                             log=args.log, threads=args.threads)
    text = (json.dumps([c.__dict__ for c in cells], indent=2, sort_keys=True) + "\n"
            if args.json else sweep.rows_csv_text(cells))
    _emit(args, text)
    if args.plot:
        svg.region_figure(cells).save(args.plot)
    return EXIT_OK


def cmd_simulate(args) -> int:
    params = _params(args)
    traj = integrate(params, args.init, args.t_end, args.rtol, args.atol)
    times = None if args.samples is None else np.linspace(0.0, args.t_end, args.samples)
    if args.json:
        t, S, I = (traj.t, traj.S, traj.I) if times is None else (times, *traj.at(times))
        text = json.dumps({"termination": traj.termination.value,
                           "t": [float(x) for x in t], "S": [float(x) for x in S],
                           "I": [float(x) for x in I]}, indent=2, sort_keys=True) + "\n"
        _emit(args, text)
    else:
        _emit(args, traj.csv_text(times))
    if args.plot:
        svg.trajectory_figure(traj).save(args.plot)
        root, ext = os.path.splitext(args.plot)
        svg.phase_figure(traj).save(f"{root}_phase{ext or '.svg'}")
    print(f"termination: {traj.termination.value}; final (S, I) = {traj.final}", file=sys.stderr)
    return EXIT_OK


def cmd_hopf(args) -> int:
    params = _params(args)
    found = sweep.hopf_scan(params, args.param, args.lo, args.hi, args.brackets,
                            threads=args.threads)
    rows = [r.to_dict() for r in found]
    if args.verify:
        for row, r in zip(rows, found):
            obs = cycles.observe_hopf(r)
            row["observed_cycle"] = None if obs.observed is None else obs.observed.value
            row["verification"] = obs.to_dict()
    if args.json:
        text = json.dumps(rows, indent=2, sort_keys=True) + "\n"
    else:
        cols = ["parameter", "value", "Lambda", "a2_bar", "a2_bar_error_estimate",
                "transversality", "predicted_cycle"] + (["observed_cycle"] if args.verify else [])
        lines = [",".join(cols)]
        for d in rows:
            lines.append(",".join(repr(d[c]) if isinstance(d[c], float) else str(d[c]) for c in cols))
        text = "\n".join(lines) + "\n"
    _emit(args, text)
    if args.plot and found:
        rep = found[0]
        e2 = rep.e2
        traj = integrate(rep.params, (e2[0] + 1e-3, e2[1]), 20 * 2 * np.pi / rep.Lambda,
                         args.rtol, args.atol)
        svg.phase_figure(traj).save(args.plot)
    if not found:
        print("no Hopf point found in the scanned range", file=sys.stderr)
    return EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "sweep": cmd_sweep, "map": cmd_map,
            "simulate": cmd_simulate, "hopf": cmd_hopf}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return COMMANDS[args.command](args)
    except ParameterError as exc:
        print(f"error: invalid parameter {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InitOutsideDomain, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (IntegrationError, hopf.DerivativeIllConditioned, hopf.TransversalityFailed,
            ArithmeticError, RuntimeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
