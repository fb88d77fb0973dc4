"""Command-line front end: ``curveforge <command> ...``.

Exit status: 0 success, 2 usage error, 3 parse or domain error, 4 numerical
failure.  Error messages start with the name of the failing stage.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .curves import FrenetFrame
from .errors import CurveForgeError
from .frenet import frenet_integrate
from .helices import classify, general_helix, slant_helix
from .ode import DEFAULT_STEP, IntrinsicProfile
from .output import RunReport, write_curve_csv
from .pipelines import random_profile_specs, run_compare, run_reconstruct, run_verify

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_NUMERIC = 4

SEED_ENV = "CURVEFORGE_SEED"


class _Failure(Exception):
    def __init__(self, stage, message, code):
        super().__init__(message)
        self.stage = stage
        self.code = code


def _add_profile(p, s0=True):
    p.add_argument("--kappa", required=True, help="curvature formula in s")
    p.add_argument("--tau", required=True, help="torsion formula in s")
    p.add_argument("--smin", type=float, required=True)
    p.add_argument("--smax", type=float, required=True)
    if s0:
        p.add_argument("--s0", type=float, required=True, help="arc length of the initial data")
    p.add_argument("--step", type=float, default=DEFAULT_STEP, help="grid step (default 1e-3)")


def _add_initial(p):
    p.add_argument("--w0", type=float, help="<t, e3> at s0")
    p.add_argument("--v0", type=float, help="derivative of <t, e3> at s0")
    p.add_argument("--frame", type=float, nargs=9, metavar="R", help="initial frame tx ty tz nx ny nz bx by bz")
    p.add_argument("--theta0", type=float, default=0.0, help="azimuth of the tangent at s0")
    p.add_argument("--start", type=float, nargs=3, default=[0.0, 0.0, 0.0], metavar="X")
    p.add_argument("--restart", action="store_true", help="re-chart instead of stopping at the chart boundary")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="curveforge", description="Space curves from curvature and torsion.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reconstruct", help="curve from (kappa, tau) via the w equation")
    _add_profile(p)
    _add_initial(p)
    p.add_argument("--out", required=True, help="CSV path ('-' for stdout)")
    p.add_argument("--frames", action="store_true", help="append frame columns")
    p.add_argument("--report", help="write a JSON run report here")

    p = sub.add_parser("oracle", help="curve from (kappa, tau) via the Frenet-Serret system")
    _add_profile(p)
    p.add_argument("--frame", type=float, nargs=9, metavar="R", required=True)
    p.add_argument("--start", type=float, nargs=3, default=[0.0, 0.0, 0.0], metavar="X")
    p.add_argument("--out", required=True)
    p.add_argument("--frames", action="store_true")
    p.add_argument("--report")

    p = sub.add_parser("helix", help="closed-form general or slant helix")
    p.add_argument("kind", choices=["general", "slant"])
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--kappa", required=True)
    p.add_argument("--smin", type=float, required=True)
    p.add_argument("--smax", type=float, required=True)
    p.add_argument("--step", type=float, default=DEFAULT_STEP)
    p.add_argument("--out", required=True)
    p.add_argument("--frames", action="store_true")
    p.add_argument("--report")

    p = sub.add_parser("classify", help="general helix, slant helix or generic")
    p.add_argument("--kappa", required=True)
    p.add_argument("--tau", required=True)
    p.add_argument("--smin", type=float, default=0.0)
    p.add_argument("--smax", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-6)

    for name, text in (("verify", "reconstruct and re-estimate kappa, tau"), ("compare", "reconstruct vs oracle")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--kappa")
        p.add_argument("--tau")
        p.add_argument("--smin", type=float)
        p.add_argument("--smax", type=float)
        p.add_argument("--s0", type=float)
        p.add_argument("--step", type=float, default=DEFAULT_STEP)
        _add_initial(p)
        p.add_argument("--report", default="-", help="JSON report path (default stdout)")
        if name == "verify":
            p.add_argument("--batch", help="JSON file with a list of profiles, or random:N")
            p.add_argument("--jobs", type=int, default=1, help="worker processes for --batch")
    return parser


def _spec(args) -> dict:
    spec = {
        "kappa": args.kappa,
        "tau": args.tau,
        "smin": args.smin,
        "smax": args.smax,
        "s0": args.s0,
        "step": args.step,
        "theta0": args.theta0,
        "start": list(args.start),
        "restart": args.restart,
    }
    if args.frame is not None:
        spec["frame"] = list(args.frame)
    else:
        if args.w0 is None or args.v0 is None:
            raise _Failure("input", "give --w0 and --v0, or --frame", EXIT_USAGE)
        spec["w0"], spec["v0"] = args.w0, args.v0
    return spec


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise _Failure("input", "missing " + ", ".join("--" + n for n in missing), EXIT_USAGE)


def _cmd_reconstruct(args, argv):
    t0 = time.perf_counter()
    spec, profile, rec = run_reconstruct(_spec(args))
    t1 = time.perf_counter()
    write_curve_csv(args.out, rec.curve, args.frames)
    if args.report:
        metrics = {"points": len(rec.curve), "unit_speed_deviation": rec.curve.speed_deviation()}
        report = RunReport({"command": "reconstruct", "argv": argv, **spec}, metrics, rec.events)
        report.timing_ms = {"reconstruct": 1e3 * (t1 - t0), "total": 1e3 * (time.perf_counter() - t0)}
        report.write(args.report)


def _cmd_oracle(args, argv):
    t0 = time.perf_counter()
    profile = IntrinsicProfile(args.kappa, args.tau, args.smin, args.smax)
    frame = FrenetFrame.from_values(args.frame)
    curve = frenet_integrate(profile, frame, args.start, h=args.step, s0=args.s0)
    t1 = time.perf_counter()
    write_curve_csv(args.out, curve, args.frames)
    if args.report:
        inputs = {"command": "oracle", "argv": argv, **profile.describe(), "s0": args.s0, "step": args.step,
                  "frame": list(args.frame), "start": list(args.start)}
        metrics = {"points": len(curve), "unit_speed_deviation": curve.speed_deviation()}
        RunReport(inputs, metrics, [], {"oracle": 1e3 * (t1 - t0)}).write(args.report)


def _cmd_helix(args, argv):
    t0 = time.perf_counter()
    kappa = IntrinsicProfile(args.kappa, "0", args.smin, args.smax).kappa
    build = general_helix if args.kind == "general" else slant_helix
    curve = build(args.m, kappa, (args.smin, args.smax), h=args.step)
    t1 = time.perf_counter()
    write_curve_csv(args.out, curve, args.frames)
    if args.report:
        inputs = {"command": f"helix {args.kind}", "argv": argv, "m": args.m, "kappa": args.kappa,
                  "smin": args.smin, "smax": args.smax, "step": args.step}
        metrics = {"points": len(curve), "unit_speed_deviation": curve.speed_deviation()}
        RunReport(inputs, metrics, curve.events, {"helix": 1e3 * (t1 - t0)}).write(args.report)


def _cmd_classify(args, argv):
    profile = IntrinsicProfile(args.kappa, args.tau, args.smin, args.smax)
    print(classify(profile, tol=args.tol))


def _batch_specs(source):
    if source.startswith("random:"):
        try:
            count = int(source.split(":", 1)[1])
        except ValueError:
            raise _Failure("input", f"bad batch source {source!r}", EXIT_USAGE) from None
        seed = int(os.environ.get(SEED_ENV, "0"))
        return random_profile_specs(count, seed), {"batch": source, "seed": seed}
    try:
        with open(source) as fh:
            specs = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise _Failure("input", f"cannot read batch file: {exc}", EXIT_USAGE) from None
    if not isinstance(specs, list) or not all(isinstance(x, dict) for x in specs):
        raise _Failure("input", "batch file must hold a JSON list of objects", EXIT_USAGE)
    return specs, {"batch": source}


def _cmd_verify(args, argv):
    t0 = time.perf_counter()
    if args.batch:
        specs, origin = _batch_specs(args.batch)
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                results = list(pool.map(run_verify, specs))
        else:
            results = [run_verify(s) for s in specs]
        inputs = {"command": "verify", "argv": argv, **origin, "profiles": [r["inputs"] for r in results]}
        per = [r.get("metrics") or {"error": r["error"]} for r in results]
        ok = [m for m in per if "error" not in m]
        metrics = {"profiles": per}
        for key in ("max_kappa_error", "max_tau_error", "unit_speed_deviation"):
            if ok:
                metrics[key] = max(m[key] for m in ok)
        events = [dict(e, profile=i) for i, r in enumerate(results) for e in r.get("events", [])]
        report = RunReport(inputs, metrics, events, {"total": 1e3 * (time.perf_counter() - t0)})
        report.write(args.report)
        failed = [i for i, m in enumerate(per) if "error" in m]
        if failed:
            first = per[failed[0]]["error"]
            raise _Failure(first["stage"], f"{len(failed)} profile(s) failed; first: {first['message']}", EXIT_NUMERIC)
        return
    _need(args, "kappa", "tau", "smin", "smax", "s0")
    result = run_verify(_spec(args))
    if "error" in result:
        _reraise(result["error"])
    inputs = {"command": "verify", "argv": argv, **result["inputs"]}
    RunReport(inputs, result["metrics"], result["events"], result["timing_ms"]).write(args.report)


def _reraise(error):
    stage = error["stage"]
    code = EXIT_DOMAIN if stage in ("parse", "evaluate", "profile", "helix", "input") else EXIT_NUMERIC
    raise _Failure(stage, error["message"], code)


def _cmd_compare(args, argv):
    _need(args, "kappa", "tau", "smin", "smax", "s0")
    result = run_compare(_spec(args))
    inputs = {"command": "compare", "argv": argv, **result["inputs"]}
    RunReport(inputs, result["metrics"], result["events"], result["timing_ms"]).write(args.report)


COMMANDS = {
    "reconstruct": _cmd_reconstruct,
    "oracle": _cmd_oracle,
    "helix": _cmd_helix,
    "classify": _cmd_classify,
    "verify": _cmd_verify,
    "compare": _cmd_compare,
}


def _exit_code(exc: Exception) -> int:
    if isinstance(exc, ArithmeticError):
        return EXIT_NUMERIC
    return EXIT_DOMAIN


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        COMMANDS[args.command](args, argv)
    except _Failure as exc:
        print(f"curveforge: {exc.stage}: {exc}", file=sys.stderr)
        return exc.code
    except CurveForgeError as exc:
        print(f"curveforge: {exc.stage}: {exc}", file=sys.stderr)
        return _exit_code(exc)
    except ValueError as exc:
        print(f"curveforge: input: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ArithmeticError as exc:
        print(f"curveforge: numerics: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"curveforge: output: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
