"""Command-line interface: ``ferrand <command> ...``.

Exit status is 0 on success, 1 when a computation or verification fails and
2 for usage errors.  Numbers are printed with 15 digits after the point.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings

import numpy as np
from jsonschema import ValidationError

from . import distortion, elliptic, isometry, metrics
from .capacities import AbstractModeError, BracketError, CapacityEvaluator
from .condenser.geometry import GeometryError
from .condenser.io import load_spec
from .condenser.solver import OracleError, SolverConfig, estimate_capacity, solve_capacity

DIGITS = 15


def fmt(v: float) -> str:
    v = float(v)
    if not math.isfinite(v):
        return str(v)
    if v == 0 or 1e-4 <= abs(v) < 1e6:
        return f"{v:.{DIGITS}f}"
    return f"{v:.{DIGITS}e}"


def jnum(v):
    """JSON-friendly number rounded to 15 significant digits."""
    if isinstance(v, bool) or v is None:
        return v
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return float(f"{v:.{DIGITS}g}") if math.isfinite(v) else None
    if isinstance(v, dict):
        return {k: jnum(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [jnum(x) for x in v]
    return v


def parse_point(text: str):
    try:
        vals = [float(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad point {text!r}; use comma-separated coordinates")
    if len(vals) < 2:
        raise argparse.ArgumentTypeError(f"a point needs at least two coordinates: {text!r}")
    return vals


def parse_floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}")


def parse_map(text: str):
    """scale:c, invert:c, mobius:a,b,c,d or power:a (complex numbers as 1+2j)."""
    kind, _, arg = text.partition(":")
    try:
        vals = [complex(t.replace(" ", "")) for t in arg.split(",")] if arg else []
        if kind == "scale" and len(vals) == 1:
            return isometry.Mobius.scaling(vals[0])
        if kind == "invert" and len(vals) <= 1:
            return isometry.Mobius.inversion(vals[0] if vals else 1)
        if kind == "mobius" and len(vals) == 4:
            return isometry.Mobius(*vals)
        if kind == "power" and len(vals) == 1 and vals[0].imag == 0:
            return isometry.RadialPower(vals[0].real)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad map {text!r}: {exc}")
    raise argparse.ArgumentTypeError(
        f"bad map {text!r}; use scale:c, invert:c, mobius:a,b,c,d or power:a"
    )


def _complex(p) -> complex:
    if len(p) != 2:
        raise ValueError("expected a planar point")
    return complex(p[0], p[1])


# ---------------------------------------------------------------------------
# commands


def cmd_cap(args, out):
    ev = CapacityEvaluator(args.n)
    if args.gamma is not None:
        v = ev.gamma(args.gamma)
    elif args.tau is not None:
        v = ev.tau(args.tau)
    elif args.gamma_inv is not None:
        v = ev.gamma_inv(args.gamma_inv)
    elif args.tau_inv is not None:
        v = ev.tau_inv(args.tau_inv)
    elif args.mu is not None:
        v = elliptic.mu(args.mu)
    else:
        v = elliptic.ellint_K(args.K)
    print(fmt(v), file=out)
    return 0


def cmd_dist(args, out):
    ev = CapacityEvaluator(args.n)
    p = distortion.DistortionParams(args.K, ev)
    w = csv.writer(out, lineterminator="\n")
    if args.t is not None:
        w.writerow(["K", "t", "tau_inv_scaled", "tau_inv_composed"])
        for t in args.t:
            w.writerow([fmt(args.K), fmt(t), fmt(distortion.tau_inv_scaled(p, t)),
                        fmt(distortion.tau_inv_composed(p, t))])
        return 0
    rs = args.r if args.r is not None else list(np.linspace(0, 1, args.grid + 1))
    head = ["K", "r", "phi", "psi"]
    bounds = args.K >= 1
    if bounds:
        head += ["psi_lower", "psi_upper", "psi_inverse", "psi_inverse_lower", "psi_inverse_upper"]
    w.writerow(head)
    for r in rs:
        row = [fmt(args.K), fmt(r), fmt(distortion.phi(p, r)), fmt(distortion.psi(p, r))]
        if bounds:
            if r > 0:
                b = distortion.psi_bounds(args.K, r, ev)
                row += [fmt(b.lower_K), fmt(b.upper_K), fmt(b.psi_inv),
                        fmt(b.lower_inv), fmt(b.upper_inv)]
            else:
                row += [fmt(0)] * 5
        w.writerow(row)
    return 0


def cmd_lam(args, out):
    x, y = args.x, args.y
    if args.ball:
        b = metrics.lambda_ball(x, y)
        doc = {"domain": "unit-ball", **b.to_dict(),
               "hyperbolic_distance": metrics.hyperbolic_distance_ball(x, y)}
    elif args.punctured:
        pair = metrics.PuncturedPair(_complex(x), _complex(y))
        b = metrics.lambda_punctured(pair)
        doc = {"domain": "punctured", **b.to_dict(), "classification": pair.classify()}
    else:
        dom = metrics.DomainSpec(args.local)
        b = metrics.lambda_general_bounds(dom, x, y)
        doc = {"domain": args.local, "estimate": "local", **b.to_dict()}
    json.dump(jnum(doc), out, indent=2)
    print(file=out)
    return 0


def trace_csv(trace: metrics.MetricSphereTrace, out):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["angle", "inner_radius", "outer_radius", "exact",
                "inner_x", "inner_y", "outer_x", "outer_y"])
    pin, pout = trace.points("inner"), trace.points("outer")
    for k, (a, ri, ro, ex) in enumerate(trace.rows()):
        w.writerow([fmt(a), fmt(ri), fmt(ro), int(ex), fmt(pin[k].real), fmt(pin[k].imag),
                    fmt(pout[k].real), fmt(pout[k].imag)])


def trace_svg(trace: metrics.MetricSphereTrace, out, size: int = 480):
    pts = np.concatenate([trace.points("outer"), [trace.center, 0j]])
    x0, x1 = pts.real.min(), pts.real.max()
    y0, y1 = pts.imag.min(), pts.imag.max()
    span = max(x1 - x0, y1 - y0) * 1.1
    cx, cy = 0.5 * (x0 + x1), 0.5 * (y0 + y1)

    def xy(z):
        # y axis points up in the picture
        return (f"{(z.real - cx) / span * size + size / 2:.3f},"
                f"{(cy - z.imag) / span * size + size / 2:.3f}")

    def poly(zs, color):
        s = " ".join(xy(z) for z in zs)
        return f'<polygon points="{s}" fill="none" stroke="{color}" stroke-width="1.5"/>'

    def dot(z, color):
        px, py = xy(z).split(",")
        return f'<circle cx="{px}" cy="{py}" r="3" fill="{color}"/>'

    print(f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
          f'viewBox="0 0 {size} {size}">', file=out)
    print(f"<title>lambda(c, .) = {fmt(trace.level)}</title>", file=out)
    print(poly(trace.points("outer"), "#c0392b"), file=out)
    print(poly(trace.points("inner"), "#2471a3"), file=out)
    print(dot(trace.center, "#000"), file=out)
    print(dot(0j, "#888"), file=out)
    print("</svg>", file=out)


def cmd_ball(args, out):
    trace = metrics.trace_metric_sphere(_complex(args.center), args.level, args.rays)
    if args.format == "svg":
        trace_svg(trace, out)
    else:
        trace_csv(trace, out)
    return 0


def cmd_oracle(args, out):
    spec, opts = load_spec(args.spec)
    levels = args.levels if args.levels is not None else opts.get("levels", 3)
    config = SolverConfig(levels=levels, boundary=args.boundary)
    h = args.h if args.h is not None else opts.get("h")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        if levels == 1:
            report = solve_capacity(spec, h, config)
        else:
            report = estimate_capacity(spec, h, config)
    doc = report.to_dict()
    w = spec.inversion_centre()
    doc["inversion_centre"] = None if w is None else [w.real, w.imag]
    doc["best"] = report.best
    json.dump(jnum(doc), out, indent=2)
    print(file=out)
    return 0


def cmd_dilat(args, out):
    f = isometry.compose(*args.map)
    report = isometry.linear_dilatation(f, _complex(args.x), args.radii, args.samples)
    json.dump(jnum(report.to_dict()), out, indent=2)
    print(file=out)
    return 0


def cmd_profile(args, out):
    if not 0 < args.rmin <= args.rmax < 1:
        raise ValueError("need 0 < rmin <= rmax < 1")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["r", "tau_form", "psi_form", "leading_form", "majorant"])
    for r in np.geomspace(args.rmin, args.rmax, args.steps):
        p = isometry.dilatation_bound_profile(r)
        w.writerow([fmt(p.r), fmt(p.tau_form), fmt(p.psi_form), fmt(p.leading_form),
                    fmt(p.majorant)])
    return 0


def cmd_verify(args, out):
    from .verify import SUITES, run_suites

    names = args.suite or [s for s in SUITES if not (args.skip_oracle and s == "oracle")]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        checks = run_suites(names, report=lambda c: print(c.line(), file=out, flush=True))
    failed = [c for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)} passed, {len(failed)} failed", file=out)
    return 1 if failed else 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help="write to this file instead of stdout")

    ap = argparse.ArgumentParser(prog="ferrand", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cap", parents=[common], help="ring capacities and elliptic functions")
    p.add_argument("--n", type=int, default=2, help="dimension (only 2 is evaluable)")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--gamma", type=float, metavar="T", help="Grötzsch capacity at t > 1")
    g.add_argument("--tau", type=float, metavar="S", help="Teichmüller capacity at s > 0")
    g.add_argument("--gamma-inv", type=float, metavar="Y")
    g.add_argument("--tau-inv", type=float, metavar="Y")
    g.add_argument("--mu", type=float, metavar="R", help="Grötzsch ring modulus, 0 < r < 1")
    g.add_argument("--K", type=float, metavar="R", help="complete elliptic integral K(r)")
    p.set_defaults(func=cmd_cap)

    p = sub.add_parser("dist", parents=[common], help="phi, psi and their bounds as CSV")
    p.add_argument("--K", type=float, required=True)
    p.add_argument("--n", type=int, default=2)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--r", type=parse_floats, help="comma-separated radii in [0, 1]")
    g.add_argument("--grid", type=int, default=10, help="r = 0, 1/N, ..., 1 (default 10)")
    g.add_argument("--t", type=parse_floats, help="tabulate tau^-1(K tau(t)) instead")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("lam", parents=[common], help="lambda for a pair of points (JSON)")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--ball", action="store_true", help="unit disk, exact")
    g.add_argument("--punctured", action="store_true", help="punctured plane")
    g.add_argument("--local", choices=metrics.DOMAIN_KINDS[:2],
                   help="local two-sided estimate in this domain")
    p.add_argument("--x", type=parse_point, required=True)
    p.add_argument("--y", type=parse_point, required=True)
    p.set_defaults(func=cmd_lam)

    p = sub.add_parser("ball", parents=[common], help="trace a lambda-sphere in the punctured plane")
    p.add_argument("--center", type=parse_point, default=[1.0, 0.0])
    p.add_argument("--level", type=float, required=True)
    p.add_argument("--rays", type=int, default=64)
    p.add_argument("--format", choices=["csv", "svg"], default="csv")
    p.set_defaults(func=cmd_ball)

    p = sub.add_parser("oracle", parents=[common], help="grid capacity of a condenser file (JSON)")
    p.add_argument("spec", help="condenser JSON file")
    p.add_argument("--h", type=float, help="coarse grid spacing (default gap/16)")
    p.add_argument("--levels", type=int, choices=[1, 3])
    p.add_argument("--boundary", choices=["cut", "nodes"], default="cut")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("dilat", parents=[common], help="sampled linear dilatation (JSON)")
    p.add_argument("--map", type=parse_map, action="append", required=True,
                   help="scale:c | invert:c | mobius:a,b,c,d | power:a; repeat to compose")
    p.add_argument("--x", type=parse_point, required=True)
    p.add_argument("--radii", type=parse_floats)
    p.add_argument("--samples", type=int, default=64)
    p.set_defaults(func=cmd_dilat)

    p = sub.add_parser("profile", parents=[common], help="dilatation bound profile (CSV)")
    p.add_argument("--rmin", type=float, default=1e-3)
    p.add_argument("--rmax", type=float, default=0.3)
    p.add_argument("--steps", type=int, default=20)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("verify", parents=[common], help="run the invariant suites")
    p.add_argument("--suite", action="append", choices=["elliptic", "capacities", "distortion",
                                                         "metrics", "isometry", "oracle"])
    p.add_argument("--skip-oracle", action="store_true", help="skip the grid solves")
    p.set_defaults(func=cmd_verify)
    return ap


ERRORS = (ValueError, ArithmeticError, AbstractModeError, BracketError, GeometryError,
          OracleError, OSError)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    buf = io.StringIO()
    try:
        code = args.func(args, buf)
    except ValidationError as exc:
        print(f"ferrand {args.command}: invalid condenser file: {exc.message}", file=sys.stderr)
        return 1
    except ERRORS as exc:
        print(f"ferrand {args.command}: error: {exc}", file=sys.stderr)
        return 1
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return code


if __name__ == "__main__":
    sys.exit(main())
