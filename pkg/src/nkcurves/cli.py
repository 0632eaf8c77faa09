"""Batch command-line front end.

Subcommands: verify-structure, find-nk-metric, curve-volume, family,
hausdorff, stokes-check.  Every run writes a JSON report carrying a schema
version, a timestamp, and a full echo of the resolved configuration, so any
report can be regenerated bit-identically (apart from the timestamp) with
`rerun_from_report`.  Family experiments additionally write a CSV of
(t, Vol, residual, d_H) rows.

Exit codes: 0 = all checks pass; 1 = checks ran, some tolerance failed;
2 = usage/config error; 3 = numerical failure (stall, degenerate mesh).

The default output directory is the current directory, overridable with the
NKCURVES_OUT environment variable or --out.
"""

import argparse
import csv
import datetime
import json
import math
import os
import sys

import numpy as np

from . import backgrounds, curves, moduli, octonion, s3s3
from .exceptions import (
    DegenerateStructureError,
    MeshQualityError,
    PreconditionError,
    StructureNotApplicableError,
)

SCHEMA_VERSION = 1

EXIT_PASS = 0
EXIT_TOLERANCE = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

DEFAULT_TOLERANCES = {
    "invariants": 1e-10,
    "type_fraction": 1e-6,
    "lambda_std": 1e-5,
    "structure_residual": 1e-5,
    "nk_residual": 1e-8,
    "residual_budget": 1e-6,
    "drift": 1e-4,
    "drift_orbit": 1e-8,
    "counterexample_drift": 1e-2,
    "stokes": 1e-5,
}


# -- plumbing ---------------------------------------------------------------

def _extract_tol_overrides(argv):
    """Pull --tol.<name> <value> (or --tol.<name>=<value>) pairs out of argv."""
    tols = dict(DEFAULT_TOLERANCES)
    rest = []
    i = 0
    while i < len(argv):
        arg = argv[i]
        if arg.startswith("--tol."):
            if "=" in arg:
                key, val = arg[len("--tol."):].split("=", 1)
            else:
                key = arg[len("--tol."):]
                i += 1
                if i >= len(argv):
                    raise PreconditionError(f"--tol.{key} needs a value")
                val = argv[i]
            if key not in tols:
                raise PreconditionError(f"unknown tolerance {key!r}")
            tols[key] = float(val)
        else:
            rest.append(arg)
        i += 1
    return rest, tols


def _out_dir(args):
    return args.out or os.environ.get("NKCURVES_OUT") or "."


def _write_report(args, command, report):
    out = _out_dir(args)
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, f"{command}.json")
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _write_csv(args, command, rows, header):
    out = _out_dir(args)
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, f"{command}.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    return path


def _base_report(command, config, tolerances):
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "generated_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "config": config,
        "tolerances": tolerances,
    }


def _config_echo(args, keys):
    cfg = {"command": args.command}
    for k in keys:
        cfg[k] = getattr(args, k)
    cfg["tol_overrides"] = {
        k: v for k, v in args.tolerances.items() if DEFAULT_TOLERANCES[k] != v
    }
    cfg["out"] = args.out
    return cfg


def _parse_triple(text):
    """Parse 'e1,e2,e3' into three imaginary-octonion basis vectors."""
    names = [t.strip() for t in text.split(",")]
    if len(names) != 3:
        raise PreconditionError(f"triple needs 3 entries, got {text!r}")
    out = []
    for name in names:
        if not (len(name) == 2 and name[0] == "e" and name[1] in "1234567"):
            raise PreconditionError(f"unknown unit {name!r} (use e1..e7)")
        out.append(np.eye(7)[int(name[1]) - 1])
    return tuple(out)


def _parse_shift(text):
    """Parse a shift direction like 'x5' or '0,0,0,0,1,0'."""
    text = text.strip()
    if len(text) == 2 and text[0] == "x" and text[1] in "123456":
        v = np.zeros(6)
        v[int(text[1]) - 1] = 1.0
        return v
    parts = text.split(",")
    if len(parts) != 6:
        raise PreconditionError(f"shift {text!r} is neither x1..x6 nor 6 numbers")
    return np.array([float(p) for p in parts])


def _make_background(args):
    name = args.background
    if name == "s6":
        return backgrounds.s6_background()
    if name == "torus":
        return backgrounds.torus_testbed(args.field or "0")
    if name == "s3s3":
        return s3s3.s3s3_background(a=1.0, b=args.b)
    raise PreconditionError(f"unknown background {name!r}")


# -- subcommands ------------------------------------------------------------

def cmd_verify_structure(args):
    tol = args.tolerances
    cfg = _config_echo(args, ["background", "field", "b", "samples", "seed"])
    report = _base_report("verify-structure", cfg, tol)
    if args.background == "s3s3":
        bg = _make_background(args)
        frac = bg.type_residual()
        spectrum = bg.type_spectrum()
        holds = frac < tol["type_fraction"]
        report["results"] = {
            "descriptor": bg.descriptor(),
            "type_fraction_21_12": frac,
            "type_spectrum": spectrum.to_record(),
            "hypothesis_holds": bool(holds),
        }
        report["checks"] = {"hypothesis": bool(holds)}
        code = EXIT_PASS if holds else EXIT_TOLERANCE
    else:
        bg = _make_background(args)
        inv = backgrounds.structure_invariants(bg, args.samples, args.seed)
        pts = bg.sample_points(args.samples, args.seed)
        fracs = backgrounds.domega_type_fraction(bg, pts[: min(args.samples, 100)])
        lam, second = None, None
        try:
            lam = backgrounds.lambda_estimate(bg, points=pts[: min(args.samples, 50)])
            second = backgrounds.second_structure_equation_residual(
                bg, points=pts[: min(args.samples, 20)],
                lam=lam["lambda_mean"])
        except (DegenerateStructureError, StructureNotApplicableError):
            pass  # no (3,0)-form: structure equations do not apply
        inv_ok = max(inv.values()) < tol["invariants"]
        holds = float(fracs.max()) < tol["type_fraction"]
        report["results"] = {
            "descriptor": bg.descriptor(),
            "invariants": inv,
            "type_fraction_max": float(fracs.max()),
            "lambda": lam,
            "second_structure_residual": second,
            "hypothesis_holds": bool(holds),
        }
        report["checks"] = {
            "invariants": bool(inv_ok),
            "hypothesis": bool(holds),
        }
        if lam is not None:
            lam_ok = (abs(lam["lambda_mean"]) < 1e-12
                      or lam["lambda_std"] / abs(lam["lambda_mean"]) < tol["lambda_std"])
            eq_ok = lam["max_residual"] < tol["structure_residual"] and (
                second is None or second < tol["structure_residual"])
            report["checks"]["lambda_consistent"] = bool(lam_ok)
            report["checks"]["structure_equations"] = bool(eq_ok)
        code = EXIT_PASS if all(report["checks"].values()) else EXIT_TOLERANCE
    report["exit_code"] = code
    _write_report(args, "verify-structure", report)
    return code


def cmd_find_nk_metric(args):
    tol = args.tolerances
    cfg = _config_echo(args, ["search", "seed"])
    report = _base_report("find-nk-metric", cfg, tol)
    search = tuple(args.search)
    result = s3s3.find_nk_metric(search=search, tol=tol["nk_residual"])
    bs = np.linspace(search[0], search[1], 41)
    samples = [{"b": float(b), "residual": s3s3.type_residual(float(b))}
               for b in bs]
    report["results"] = {"search": result, "residual_curve": samples}
    report["checks"] = {"achieved": result["achieved"]}
    code = EXIT_PASS if result["achieved"] else EXIT_TOLERANCE
    report["exit_code"] = code
    _write_report(args, "find-nk-metric", report)
    return code


def _seed_curve(args):
    bg = _make_background(args)
    if args.background == "s6":
        return curves.great_sphere_curve(_parse_triple(args.triple),
                                         args.resolution)
    if args.background == "torus":
        shift = _parse_shift(args.shift)
        return curves.subtorus_family(args.t, bg, shift, args.resolution)
    raise PreconditionError(
        f"background {args.background!r} has no seed curves")


def cmd_curve_volume(args):
    cfg = _config_echo(args, ["background", "field", "triple", "shift", "t",
                              "resolution"])
    report = _base_report("curve-volume", cfg, args.tolerances)
    mesh = _seed_curve(args)
    mesh.validate()
    vol = curves.curve_volume(mesh)
    area = curves.riemannian_area(mesh)
    cr = curves.cr_residual(mesh)
    report["results"] = {
        "volume": vol,
        "riemannian_area": area,
        "wirtinger_gap": abs(area - vol) / max(area, 1e-300),
        "cr_residual_l2": cr.l2,
        "cr_residual_max": cr.max,
        "n_vertices": len(mesh.vertices),
        "n_faces": len(mesh.faces),
    }
    report["checks"] = {"pseudoholomorphic":
                        bool(cr.l2 < args.tolerances["residual_budget"])}
    code = EXIT_PASS if report["checks"]["pseudoholomorphic"] else EXIT_TOLERANCE
    report["exit_code"] = code
    _write_report(args, "curve-volume", report)
    return code


def _build_family(args):
    """Build the FamilyPath for family/stokes-check runs.

    Returns (path, stalled_result_or_None).
    """
    if args.background == "torus":
        bg = backgrounds.torus_testbed(args.field or "0")
        shift = _parse_shift(args.shift)
        path = moduli.subtorus_exact_family(
            bg, shift, steps=args.steps, resolution=args.resolution,
            t_max=args.t_max)
        return path, None
    if args.background == "s6":
        base = curves.great_sphere_curve(_parse_triple(args.triple),
                                         args.resolution)
        if args.drive == "g2-orbit":
            return moduli.g2_orbit_family(base, steps=args.steps), None
        if args.drive == "random":
            drive = moduli.random_normal_drive(args.magnitude, seed=args.seed)
            res = moduli.continue_curve(
                base, drive, steps=args.steps,
                residual_budget=args.tolerances["residual_budget"])
            return res.path, (None if res.converged else res)
        raise PreconditionError(f"unknown drive {args.drive!r}")
    raise PreconditionError(
        f"background {args.background!r} supports no families")


def _family_rows(path):
    vols = path.volumes()
    resids = path.residuals()
    steps = path.hausdorff_steps()
    rows = []
    for k, t in enumerate(path.times):
        dh = float(steps[k - 1]) if k > 0 else 0.0
        rows.append([float(t), float(vols[k]), float(resids[k]), dh])
    return rows, vols


def cmd_family(args):
    tol = args.tolerances
    cfg = _config_echo(args, ["background", "field", "triple", "shift",
                              "drive", "magnitude", "steps", "resolution",
                              "t_max", "seed"])
    report = _base_report("family", cfg, tol)
    path, stalled = _build_family(args)
    rows, vols = _family_rows(path)
    _write_csv(args, "family", rows, ["t", "volume", "cr_residual", "d_H_step"])
    drift = moduli.volume_drift(path)
    stokes = moduli.stokes_check(path) if len(path.curves) >= 2 else None
    report["results"] = {
        "provenance": path.provenance,
        "n_curves": len(path.curves),
        "volume_drift": drift,
        "stokes": stokes.to_dict() if stokes else None,
        "stalled": None if stalled is None else stalled.message,
    }
    if stalled is not None:
        report["exit_code"] = EXIT_NUMERICAL
        _write_report(args, "family", report)
        return EXIT_NUMERICAL
    checks = {}
    if args.background == "s6":
        bound = tol["drift_orbit"] if args.drive == "g2-orbit" else tol["drift"]
        checks["volume_constant"] = bool(drift["relative_drift"] < bound)
        if args.drive == "random":
            # pushforward-vanishing step; the isometric orbit's large sweep
            # is resolution-limited and only checked for drift
            checks["chain_integral_vanishes"] = bool(
                abs(stokes.rhs) < tol["stokes"] * stokes.volume_scale)
    else:
        hypothesis_violated = not backgrounds.torus_testbed(
            args.field or "0").field.is_zero()
        if hypothesis_violated:
            checks["drift_observed"] = bool(
                drift["relative_drift"] > tol["counterexample_drift"])
            checks["stokes_identity"] = bool(
                stokes.residual < tol["stokes"] * max(abs(stokes.lhs),
                                                     stokes.volume_scale))
        else:
            checks["volume_constant"] = bool(
                drift["relative_drift"] < tol["drift"])
            checks["stokes_identity"] = bool(
                stokes.residual < tol["stokes"] * stokes.volume_scale)
    report["checks"] = checks
    code = EXIT_PASS if all(checks.values()) else EXIT_TOLERANCE
    report["exit_code"] = code
    _write_report(args, "family", report)
    return code


def cmd_hausdorff(args):
    cfg = _config_echo(args, ["background", "triple", "triple2", "resolution"])
    report = _base_report("hausdorff", cfg, args.tolerances)
    a = curves.great_sphere_curve(_parse_triple(args.triple), args.resolution)
    b = curves.great_sphere_curve(_parse_triple(args.triple2), args.resolution)
    report["results"] = {"hausdorff_distance": moduli.hausdorff_distance(a, b)}
    report["exit_code"] = EXIT_PASS
    _write_report(args, "hausdorff", report)
    return EXIT_PASS


def cmd_stokes_check(args):
    tol = args.tolerances
    cfg = _config_echo(args, ["background", "field", "triple", "shift",
                              "drive", "magnitude", "steps", "resolution",
                              "t_max", "seed"])
    report = _base_report("stokes-check", cfg, tol)
    path, stalled = _build_family(args)
    stokes = moduli.stokes_check(path)
    report["results"] = {"stokes": stokes.to_dict(),
                         "stalled": None if stalled is None else stalled.message}
    if stalled is not None:
        report["exit_code"] = EXIT_NUMERICAL
        _write_report(args, "stokes-check", report)
        return EXIT_NUMERICAL
    ok = stokes.residual < tol["stokes"] * max(abs(stokes.lhs),
                                               stokes.volume_scale)
    report["checks"] = {"stokes_identity": bool(ok)}
    code = EXIT_PASS if ok else EXIT_TOLERANCE
    report["exit_code"] = code
    _write_report(args, "stokes-check", report)
    return code


# -- argument parsing -------------------------------------------------------

def _add_common(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None,
                   help="output directory (default: $NKCURVES_OUT or .)")


def _add_curve_flags(p):
    p.add_argument("--background", default="s6",
                   choices=["s6", "torus", "s3s3"])
    p.add_argument("--field", default=None,
                   help="torus conformal exponent, e.g. 'sin(x5)'")
    p.add_argument("--triple", default="e1,e2,e3",
                   help="octonion units spanning an associative plane")
    p.add_argument("--shift", default="x5",
                   help="subtorus shift direction: x1..x6 or 6 numbers")
    p.add_argument("--resolution", type=int, default=3)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="nkcurves",
        description="Nearly Kähler structures and pseudoholomorphic curves, "
                    "numerically.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-structure",
                       help="check the almost Hermitian structure equations")
    p.add_argument("--background", default="s6",
                   choices=["s6", "torus", "s3s3"])
    p.add_argument("--field", default=None)
    p.add_argument("--b", type=float, default=0.0,
                   help="s3s3 metric coupling")
    p.add_argument("--samples", type=int, default=100)
    _add_common(p)
    p.set_defaults(func=cmd_verify_structure)

    p = sub.add_parser("find-nk-metric",
                       help="golden-section search for the nearly Kähler "
                            "metric on S3 x S3")
    p.add_argument("--search", type=float, nargs=2, default=[-0.95, -0.01])
    _add_common(p)
    p.set_defaults(func=cmd_find_nk_metric)

    p = sub.add_parser("curve-volume", help="volume and CR residual of a seed curve")
    _add_curve_flags(p)
    p.add_argument("--t", type=float, default=0.0, help="subtorus offset")
    _add_common(p)
    p.set_defaults(func=cmd_curve_volume)

    for name in ("family", "stokes-check"):
        p = sub.add_parser(name, help="run a curve family experiment"
                           if name == "family" else
                           "verify the Stokes identity along a family")
        _add_curve_flags(p)
        p.add_argument("--drive", default="g2-orbit",
                       choices=["g2-orbit", "random"])
        p.add_argument("--magnitude", type=float, default=1e-2)
        p.add_argument("--steps", type=int, default=20)
        p.add_argument("--t-max", dest="t_max", type=float, default=0.25)
        _add_common(p)
        p.set_defaults(func=cmd_family if name == "family" else cmd_stokes_check)

    p = sub.add_parser("hausdorff",
                       help="Hausdorff distance between two great spheres")
    p.add_argument("--background", default="s6", choices=["s6"])
    p.add_argument("--triple", default="e1,e2,e3")
    p.add_argument("--triple2", default="e1,e4,e5")
    p.add_argument("--resolution", type=int, default=3)
    _add_common(p)
    p.set_defaults(func=cmd_hausdorff)

    return parser


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv, tolerances = _extract_tol_overrides(argv)
    except (PreconditionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0,) else 0
    args.tolerances = tolerances
    try:
        return args.func(args)
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MeshQualityError, DegenerateStructureError,
            np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def rerun_from_report(report_path, out=None):
    """Re-execute the command a report embeds; returns the exit code.

    With `out` set, the regenerated report lands there, which lets callers
    diff it against the original (identical apart from `generated_at`).
    """
    with open(report_path) as fh:
        report = json.load(fh)
    cfg = dict(report["config"])
    command = cfg.pop("command")
    tol_overrides = cfg.pop("tol_overrides", {})
    cfg_out = cfg.pop("out", None)
    argv = [command]
    for key, val in cfg.items():
        if val is None:
            continue
        flag = "--" + key.replace("_", "-")
        if isinstance(val, (list, tuple)):
            argv.append(flag)
            argv.extend(str(v) for v in val)
        else:
            argv.extend([flag, str(val)])
    for key, val in tol_overrides.items():
        argv.extend([f"--tol.{key}", repr(val)])
    target = out if out is not None else cfg_out
    if target is not None:
        argv.extend(["--out", target])
    return main(argv)


def entry():
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
