"""rigidlab command line: field, slice, orbit, analyze, counterexample, dichotomy.

Place indices (--S) are one-based here, as in CSV headers.
Exit codes: 0 success, 2 usage or validation, 3 precision degradation,
4 experiment-stage failure.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

import mpmath
import numpy as np

from . import __version__
from .analysis import (
    AnalysisReport,
    classify_point,
    density_metrics,
    pattern_probe,
)
from .errors import DegradedPrecision, RigidLabError
from .experiments import random_point, run_counterexample, run_dichotomy
from .field import DEFAULT_PRECISION, build_field, parse_element
from .orbit import TorusPoint, partial_orbit, point_from_element
from .render import orbit_svg
from .slices import SliceQuery, build_context, enumerate_slice
from .specfile import PRESETS, load_action_file, load_preset


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(t) for t in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from exc


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be a non-negative integer")
    return v


def _load_action(args):
    if getattr(args, "action", None):
        return load_action_file(args.action, args.precision)
    return load_preset(args.preset or "octic", args.precision)


def _context(action, args):
    S = [i - 1 for i in _int_list(args.S)]
    if any(i < 0 or i >= action.places for i in S):
        raise UsageError(f"--S entries must lie in 1..{action.places}")
    return build_context(action, S)


def _query(action, ctx, args):
    coset = tuple(_int_list(args.coset)) if args.coset else ()
    if coset and len(coset) != action.r:
        raise UsageError(f"--coset needs {action.r} integers")
    H = None
    if args.H:
        cols = [_int_list(c) for c in args.H.split(";")]
        if any(len(c) != action.r for c in cols):
            raise UsageError(f"--H columns need {action.r} integers each")
        H = np.array(cols, dtype=np.int64).T
    try:
        return SliceQuery(ctx, args.eps, args.N, coset, H, args.angles)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _parse_point(action, spec: str) -> TorusPoint:
    spec = spec.strip()
    if spec.startswith("random(") and spec.endswith(")"):
        return random_point(action.d, int(spec[7:-1]), action.field.working_precision)
    if spec.startswith("elem:"):
        coeffs = [Fraction(c) for c in spec[5:].split(",")]
        return point_from_element(action, parse_element(action.field, coeffs))
    coords = [Fraction(c) for c in spec.split(",")]
    if len(coords) != action.d:
        raise UsageError(f"--point needs {action.d} coordinates")
    return TorusPoint.exact(coords)


def _emit(args, name: str, text: str) -> None:
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text)
    else:
        sys.stdout.write(text)


# -- subcommands ------------------------------------------------------------------


def cmd_field(args) -> int:
    if args.minpoly:
        field = build_field(_int_list(args.minpoly), args.precision or DEFAULT_PRECISION)
    else:
        field = _load_action(args).field
    lines = [
        f"min_poly: {','.join(str(c) for c in field.min_poly_descending)}",
        f"d: {field.d}",
        f"r1: {field.r1}",
        f"r2: {field.r2}",
        f"discriminant: {field.discriminant}",
        f"precision: {field.working_precision}",
    ]
    for i, root in enumerate(field.roots):
        value = mpmath.re(root.center) if root.is_real else root.center
        lines.append(f"root_{i + 1}: {mpmath.nstr(value, 25)} (radius {mpmath.nstr(root.radius, 3)})")
    print("\n".join(lines))
    return 0


def cmd_slice(args) -> int:
    action = _load_action(args)
    ctx = _context(action, args)
    res = enumerate_slice(action, _query(action, ctx, args))
    _emit(args, "slice.csv", res.to_csv())
    print(f"{len(res)} slice elements", file=sys.stderr)
    return 0


def _orbit(args):
    action = _load_action(args)
    ctx = _context(action, args)
    res = enumerate_slice(action, _query(action, ctx, args))
    x = _parse_point(action, args.point)
    orbit = partial_orbit(action, x, res)
    return action, ctx, x, orbit


def cmd_orbit(args) -> int:
    action, _, _, orbit = _orbit(args)
    _emit(args, "orbit.csv", orbit.to_csv())
    if args.svg:
        Path(args.svg).write_text(orbit_svg(orbit.as_array(), _axes(args, action), title=f"orbit, {len(orbit)} points"))
    return 0


def _axes(args, action) -> tuple[int, int]:
    ax = _int_list(args.project) if getattr(args, "project", None) else [1, 2]
    if len(ax) != 2 or any(a < 1 or a > action.d for a in ax):
        raise UsageError(f"--project needs two coordinates in 1..{action.d}")
    return ax[0] - 1, ax[1] - 1


def cmd_analyze(args) -> int:
    action, ctx, x, orbit = _orbit(args)
    cls = classify_point(action, ctx, x, Qmax=args.qmax, tol=args.tol)
    deltas = [Fraction(t) for t in args.delta.split(",")]
    density = density_metrics(action, orbit, deltas, args.mc_samples, args.seed)
    pattern = pattern_probe(action, orbit, ctx, [args.pattern_radius])
    extra = {"orbit_size": len(orbit), "exact": str(orbit.exact).lower()}
    if cls.kind == "torsion" and cls.q is not None:
        extra["orbit_bound"] = f"<= {cls.q ** action.d}"
    report = AnalysisReport(cls, density, None, pattern, extra)
    _emit(args, "report.txt", report.to_text())
    if args.out:
        Path(args.out, "report.csv").write_text(report.to_csv())
        Path(args.out, "orbit.csv").write_text(orbit.to_csv())
    if args.svg:
        Path(args.svg).write_text(orbit_svg(orbit.as_array(), _axes(args, action), title=cls.describe()))
    return 0


def cmd_counterexample(args) -> int:
    if args.N < 0:
        raise UsageError("--N must be non-negative")
    run = run_counterexample(args.eps0, args.N, args.tol, args.mc_samples, args.seed)
    lines = [f"warning: {w}" for w in run.warnings]
    for s in run.stages:
        lines.append(f"{'PASS' if s.passed else 'FAIL'} {s.name}: {s.detail}")
    _emit(args, "counterexample.txt", "\n".join(lines) + "\n")
    if not run.passed:
        print(f"stage failed: {run.first_failure.name}", file=sys.stderr)
        return 4
    return 0


def cmd_dichotomy(args) -> int:
    rows = run_dichotomy(args.preset, _int_list(args.schedule), seed=args.seed)
    lines = ["point | classification | grid_fraction over N | orbit sizes | consistent | note"]
    for r in rows:
        fr = ", ".join("n/a" if f is None else f"{f:.4f}" for f in r.grid_fractions)
        lines.append(
            f"{r.label} | {r.classification} | {fr} | {r.orbit_sizes} | {'yes' if r.consistent else 'no'} | {r.note}"
        )
    _emit(args, "dichotomy.txt", "\n".join(lines) + "\n")
    return 0 if all(r.consistent for r in rows) else 4


# -- parser -------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rigidlab", description="Toral automorphism actions from number-field units.")
    p.add_argument("--version", action="version", version=f"rigidlab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, action=True):
        if action:
            sp.add_argument("--action", help="action-spec JSON file")
            sp.add_argument("--preset", choices=PRESETS, help="bundled action (default: octic)")
        sp.add_argument("--out", help="output directory (default: stdout)")
        sp.add_argument("--seed", type=_nonneg_int, default=0)
        sp.add_argument("--precision", type=int, default=None, help="working precision in bits")

    def slice_args(sp):
        sp.add_argument("--S", default="", help="one-based places, e.g. 1,2")
        sp.add_argument("--eps", type=_positive_float, required=True)
        sp.add_argument("--N", type=_nonneg_int, required=True)
        sp.add_argument("--coset", default="", help="offset sigma as integers")
        sp.add_argument("--H", default="", help="subgroup basis columns, ';'-separated")
        sp.add_argument("--angles", action="store_true", help="also require small arguments")

    sp = sub.add_parser("field", help="field report")
    common(sp)
    sp.add_argument("--minpoly", help="descending integer coefficients, e.g. 1,0,-2")
    sp.set_defaults(func=cmd_field)

    sp = sub.add_parser("slice", help="enumerate an eps-slice as CSV")
    common(sp)
    slice_args(sp)
    sp.set_defaults(func=cmd_slice)

    for name, func in (("orbit", cmd_orbit), ("analyze", cmd_analyze)):
        sp = sub.add_parser(name, help=f"{name} of a point over a slice")
        common(sp)
        slice_args(sp)
        sp.add_argument("--point", required=True, help="p/q list, elem:<coeffs>, or random(seed)")
        sp.add_argument("--svg", help="write an SVG projection here")
        sp.add_argument("--project", default="1,2", help="coordinate pair for the SVG")
        if name == "analyze":
            sp.add_argument("--qmax", type=int, default=512)
            sp.add_argument("--tol", type=_positive_float, default=None)
            sp.add_argument("--delta", default="1/8", help="grid resolutions, comma-separated")
            sp.add_argument("--mc-samples", type=_nonneg_int, default=10_000)
            sp.add_argument("--pattern-radius", type=_positive_float, default=0.05)
        sp.set_defaults(func=func)

    sp = sub.add_parser("counterexample", help="reproduce the octic counterexample")
    common(sp, action=False)
    sp.add_argument("--eps0", type=_positive_float, default=3.4)
    sp.add_argument("--N", type=int, default=6)
    sp.add_argument("--tol", type=_positive_float, default=1e-9)
    sp.add_argument("--mc-samples", type=_nonneg_int, default=10_000)
    sp.set_defaults(func=cmd_counterexample)

    sp = sub.add_parser("dichotomy", help="density vs classification for a preset")
    common(sp, action=False)
    sp.add_argument("--preset", default="cubic-cartan")
    sp.add_argument("--schedule", default="4,8,12")
    sp.set_defaults(func=cmd_dichotomy)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    try:
        return args.func(args)
    except DegradedPrecision as exc:
        print(f"error: {exc} (n={exc.n})", file=sys.stderr)
        return exc.exit_code
    except RigidLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
