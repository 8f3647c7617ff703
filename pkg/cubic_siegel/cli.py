"""
cubic_siegel.cli
----------------

Command-line interface for cubic-siegel.

Usage examples:
    cubic-siegel render param-c --theta golden --center 0+0i --width 8 --res 512 --out fig2.ppm
    cubic-siegel render dyn --c 3+0i --width 4 --res 512 --out dyn3.png
    cubic-siegel centers --theta golden --max-level 3 --out centers.csv
    cubic-siegel verify census --max-level 4 --report census.json
    cubic-siegel trace component --center 3+0i --level 1 --rays 256 --out component.json
    cubic-siegel trace zakeri --samples 64 --out zakeri.json

Exit codes: 0 on success, 1 on runtime errors, failed checks and component
traces that do not close, 2 on usage errors (bad arguments or a center that
is not a root of G_ℓ).
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any

import numpy as np

from .capture import (
    MAX_LEVEL,
    CensusError,
    a_plane_centers,
    capture_centers,
    capture_polys,
    check_center,
    expected_degree,
    hausdorff_distance,
    trace_component_boundary,
    trace_parameter_ray,
    trace_zakeri,
)
from .classify import symmetry_agreement
from .config import get_config
from .family import CubicSiegelMap, MapSlice, RotationNumber, make_rotation
from .render import SUPERSAMPLING, Plane, RenderJob, render, rotate, write_image, write_sidecar
from .siegel import (
    BoundaryVerdict,
    LinearizationError,
    boundary_critical_point,
    boundary_to_json,
    build_linearization,
    internal_ray,
    verdict_from_linearization,
)
from .utils import format_complex, parse_complex, write_centers_csv, write_json

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    """Invalid command-line input detected before any computation."""


# acceptance thresholds used by ``verify``
CENTER_TOL = 1e-10
CONSTANT_TERM_TOL = 1e-12
RESIDUAL_TOL = 1e-8
SIMPLE_TOL = 1e-6
SEPARATION_TOL = 1e-7
RADIUS_STABILITY = 0.05
ONE_ON_BOUNDARY = 1e-3
C_OFF_BOUNDARY = 1e-2
INTERNAL_RAY_POINTS = 64


# ---------------------------------------------------------------------------
# Argument types
# ---------------------------------------------------------------------------

def _rotation(text: str) -> RotationNumber:
    try:
        return make_rotation(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def _complex(text: str) -> complex:
    try:
        return parse_complex(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from e
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def _level(text: str) -> int:
    value = _positive_int(text)
    if value > MAX_LEVEL:
        raise argparse.ArgumentTypeError(f"levels above {MAX_LEVEL} are not supported, got {value}")
    return value


def _ray_count(text: str) -> int:
    value = _positive_int(text)
    if value < 64:
        raise argparse.ArgumentTypeError(f"component traces need at least 64 rays, got {value}")
    return value


def _resolution(text: str) -> tuple[int, int]:
    """``512`` for a square image or ``640x480`` for columns x rows."""
    parts = text.lower().split("x")
    if len(parts) not in (1, 2):
        raise argparse.ArgumentTypeError(f"resolution must look like 512 or 640x480, got {text!r}")
    sizes = [_positive_int(p) for p in parts]
    return (sizes[0], sizes[0]) if len(sizes) == 1 else (sizes[0], sizes[1])


def _unit_interval(text: str) -> float:
    try:
        value = float(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from e
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1), got {value}")
    return value


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cubic-siegel",
        description="Siegel disks, capture components and parameter planes of cubic Siegel polynomials.",
    )

    parser.add_argument(
        "--log-level",
        default="INFO",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Set log level (default: INFO)",
    )

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--theta", type=_rotation, default="golden", help="Rotation number: 'golden' or e.g. '[0;(2)]'.")
    common.add_argument(
        "--threads",
        type=_positive_int,
        default=None,
        help="Worker count (default: CUBIC_SIEGEL_THREADS or the number of cores).",
    )

    sub = parser.add_subparsers(dest="command", required=True)

    # Rendering
    rend = sub.add_parser("render", parents=[common], help="Render a parameter or dynamical plane.")
    rend.add_argument("plane", choices=[p.value for p in Plane], help="Which plane to render.")
    rend.add_argument("--out", required=True, help="Output image path (.ppm or .png).")
    rend.add_argument("--format", choices=["ppm", "png"], default=None, help="Image format (default: from suffix).")
    rend.add_argument("--center", type=_complex, default=None, help="Window center, e.g. 0+0i.")
    rend.add_argument("--width", type=float, default=None, help="Window width in plane units.")
    rend.add_argument("--height", type=float, default=None, help="Window height (default: from the aspect ratio).")
    rend.add_argument("--res", type=_resolution, default=(512, 512), help="Pixels: 512 or COLSxROWS (default 512).")
    rend.add_argument("--supersample", type=int, choices=SUPERSAMPLING, default=1, help="Samples per pixel axis.")
    rend.add_argument("--max-iter", type=_positive_int, default=None, help="Orbit budget per sample.")
    rend.add_argument("--terms", type=_positive_int, default=None, help="Linearization series terms.")
    rend.add_argument("--boundary-samples", type=_positive_int, default=None, help="Siegel boundary samples.")
    rend.add_argument("--rotate", type=int, default=0, help="Quarter turns applied after rendering.")
    rend.add_argument("--exact", action="store_true", help="Classify every sample with the scalar classifier.")
    rend.add_argument("--no-overlay", action="store_true", help="Do not draw the Siegel boundary (dyn only).")
    slice_group = rend.add_mutually_exclusive_group()
    slice_group.add_argument("--c", type=_complex, default=None, help="Parameter of P_c (dyn only).")
    slice_group.add_argument("--a", type=_complex, default=None, help="Parameter of f_a (dyn only).")

    # Census
    cen = sub.add_parser("centers", parents=[common], help="Compute capture-component centers.")
    cen.add_argument("--max-level", type=_level, default=3, help=f"Highest level, 1..{MAX_LEVEL} (default 3).")
    cen.add_argument("--out", default=None, help="CSV output path.")
    cen.add_argument("--a-plane", action="store_true", help="Emit the a-plane centers ±sqrt(eta(c)).")
    cen.add_argument("--include-mirror", action="store_true", help="Add the interior centers 1/c.")

    # Verification
    ver = sub.add_parser("verify", help="Run acceptance checks.")
    checks = ver.add_subparsers(dest="check", required=True)

    census = checks.add_parser("census", parents=[common], help="Center counts, degrees, residuals, simplicity.")
    census.add_argument("--max-level", type=_level, default=4)
    census.add_argument("--report", default=None, help="JSON report path.")
    census.add_argument("--perturb", action="store_true", help=argparse.SUPPRESS)

    sym = checks.add_parser("symmetry", parents=[common], help="c <-> 1/c role-swap agreement.")
    sym.add_argument("--samples", type=_positive_int, default=1000)
    sym.add_argument("--seed", type=int, default=0)
    sym.add_argument("--max-iter", type=_positive_int, default=None)
    sym.add_argument("--threshold", type=_unit_interval, default=0.99)
    sym.add_argument("--report", default=None, help="JSON report path.")

    lin = checks.add_parser("linearization", parents=[common], help="Residual gate, radius stability, verdicts.")
    lin.add_argument("--terms", type=_positive_int, default=256)
    lin.add_argument("--samples", type=_positive_int, default=512)
    lin.add_argument("--report", default=None, help="JSON report path.")

    # Tracing
    tr = sub.add_parser("trace", help="Trace rays, component boundaries, the Zakeri curve or a Siegel boundary.")
    targets = tr.add_subparsers(dest="target", required=True)

    comp = targets.add_parser("component", parents=[common], help="Boundary of a capture component.")
    comp.add_argument("--center", type=_complex, required=True)
    comp.add_argument("--level", type=_level, required=True)
    comp.add_argument("--rays", type=_ray_count, default=256)
    comp.add_argument("--r-stop", type=_unit_interval, default=None)
    comp.add_argument("--out", default=None, help="JSON output path (default: stdout).")

    ray = targets.add_parser("ray", parents=[common], help="One parameter ray.")
    ray.add_argument("--center", type=_complex, required=True)
    ray.add_argument("--level", type=_level, required=True)
    ray.add_argument("--angle", type=float, default=0.0, help="Angle in turns, [0, 1).")
    ray.add_argument("--r-stop", type=_unit_interval, default=None)
    ray.add_argument("--out", default=None, help="JSON output path (default: stdout).")

    zak = targets.add_parser("zakeri", parents=[common], help="The Zakeri curve.")
    zak.add_argument("--samples", type=_positive_int, default=64)
    zak.add_argument("--out", default=None, help="JSON output path (default: stdout).")

    sie = targets.add_parser("siegel", parents=[common], help="Siegel boundary of one map.")
    param = sie.add_mutually_exclusive_group(required=True)
    param.add_argument("--c", type=_complex, default=None)
    param.add_argument("--a", type=_complex, default=None)
    sie.add_argument("--terms", type=_positive_int, default=None)
    sie.add_argument("--samples", type=_positive_int, default=None)
    sie.add_argument("--rays", type=int, default=0, help="Also export this many internal rays.")
    sie.add_argument("--out", default=None, help="JSON output path (default: stdout).")

    return parser


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _threads(args: argparse.Namespace) -> int:
    return args.threads if args.threads is not None else get_config().render.threads


def _emit(payload: dict[str, Any], out: str | None) -> None:
    if out:
        write_json(out, payload)
    else:
        print(json.dumps(payload, indent=2))


def cmd_render(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    plane = Plane(args.plane)
    extra: dict[str, Any] = {}
    if plane is Plane.DYNAMICAL:
        if args.c is None and args.a is None:
            parser.error("render dyn needs --c or --a")
        extra["parameter"] = args.c if args.c is not None else args.a
        extra["dynamical_slice"] = MapSlice.C_PLANE if args.c is not None else MapSlice.A_PLANE
    elif args.c is not None or args.a is not None:
        parser.error("--c and --a apply to render dyn only")
    if args.center is not None:
        extra["center"] = args.center
    if args.width is not None:
        extra["width"] = args.width

    job = RenderJob.default(
        plane,
        resolution=args.res,
        height=args.height,
        rotation=args.theta,
        max_iter=args.max_iter,
        series_terms=args.terms,
        boundary_samples=args.boundary_samples,
        supersample=args.supersample,
        overlay=not args.no_overlay,
        exact=args.exact,
        **extra,
    )
    try:
        job.validate()
    except ValueError as e:
        parser.error(str(e))

    threads = _threads(args)
    buf = render(job, threads=threads)
    if args.rotate:
        buf = rotate(buf, args.rotate)
    out = Path(args.out)
    write_image(buf, out, args.format)
    write_sidecar(job, buf, out.with_suffix(out.suffix + ".json"), threads=threads)
    print(" ".join(f"{name}={count}" for name, count in buf.histogram.items()))
    return EXIT_OK


def cmd_centers(args: argparse.Namespace) -> int:
    census = capture_centers(args.theta, args.max_level)
    print(" ".join(str(n) for n in census.counts))
    if args.out is None:
        return EXIT_OK

    rows: list[dict[str, Any]] = []
    for record in census.records:
        # c and 1/c give conjugate maps, hence the same pair of a-values
        if args.a_plane:
            points = a_plane_centers([record.center], args.theta)
        elif args.include_mirror:
            points = [record.center, 1.0 / record.center]
        else:
            points = [record.center]
        for z in points:
            row = record.to_row()
            row["re"], row["im"] = z.real, z.imag
            rows.append(row)
    write_centers_csv(args.out, rows)
    return EXIT_OK


class _Checks:
    """Named pass/fail results collected into a report."""

    def __init__(self, name: str) -> None:
        self.name = name
        self.results: list[dict[str, Any]] = []

    def add(self, name: str, passed: bool, value: Any = None) -> None:
        self.results.append({"name": name, "passed": bool(passed), "value": value})
        print(f"{'PASS' if passed else 'FAIL'} {self.name}.{name}: {value}")

    @property
    def passed(self) -> bool:
        return all(r["passed"] for r in self.results)

    def finish(self, report: str | None, **extra: Any) -> int:
        payload = {"check": self.name, "passed": self.passed, "results": self.results, **extra}
        if report:
            write_json(report, payload)
        return EXIT_OK if self.passed else EXIT_FAILURE


def _min_separation(points: Sequence[complex]) -> float:
    z = np.asarray(points, dtype=np.complex128)
    if len(z) < 2:
        return math.inf
    gaps = np.abs(z[:, None] - z[None, :])
    return float(gaps[np.triu_indices(len(z), k=1)].min())


def _constant_terms(theta: RotationNumber, L: int) -> list[complex]:
    """G_ℓ(0) from the c = 0 recursion g ↦ λg(1 - g/2), g_0 = 1."""
    lam = theta.multiplier
    g, out = 1.0 + 0j, []
    for _ in range(L):
        g = lam * g * (1.0 - g / 2.0)
        out.append(g)
    return out


def verify_census(args: argparse.Namespace) -> int:
    checks = _Checks("census")
    L = args.max_level
    tower = capture_polys(args.theta, L)
    if args.perturb:
        tower = tower.perturbed(L)

    degrees = [tower.poly(level).degree for level in range(1, L + 1)]
    checks.add("degrees", degrees == [expected_degree(level) for level in range(1, L + 1)], degrees)
    constants = [complex(tower.poly(level).coeffs[0]) for level in range(1, L + 1)]
    gaps = [abs(g - e) for g, e in zip(constants, _constant_terms(args.theta, L))]
    checks.add("constant_terms", max(gaps) < CONSTANT_TERM_TOL, [format_complex(g) for g in constants])
    checks.add("level_one_constant", abs(abs(constants[0]) - 0.5) < CONSTANT_TERM_TOL, abs(constants[0]))

    try:
        census = capture_centers(args.theta, L, tower=tower)
    except CensusError as e:
        checks.add("census", False, f"level {e.level}: {e}")
        return checks.finish(args.report, theta=str(args.theta))

    counts = list(census.counts)
    checks.add("counts", counts == [3 ** (level - 1) for level in range(1, L + 1)], counts)
    level_one = census.centers(1)[0]
    checks.add("level_one_center", abs(level_one - 3.0) < CENTER_TOL, format_complex(level_one))
    summary = census.to_dict()
    checks.add("residuals", summary["max_residual"] < RESIDUAL_TOL, summary["max_residual"])
    checks.add("simplicity", summary["min_derivative"] > SIMPLE_TOL, summary["min_derivative"])
    separation = _min_separation([r.center for r in census.records])
    checks.add("separation", separation > SEPARATION_TOL, separation)
    return checks.finish(args.report, **summary)


def verify_symmetry(args: argparse.Namespace) -> int:
    checks = _Checks("symmetry")
    report = symmetry_agreement(args.samples, args.seed, args.max_iter, args.theta)
    checks.add("resolved", report.resolved > 0, report.resolved)
    checks.add("agreement", report.fraction >= args.threshold, round(report.fraction, 6))
    return checks.finish(args.report, **report.to_dict())


def verify_linearization(args: argparse.Namespace) -> int:
    checks = _Checks("linearization")
    theta = args.theta
    try:
        lin = build_linearization(CubicSiegelMap.p_c(3.0, theta), terms=args.terms, samples=args.samples)
        doubled = build_linearization(CubicSiegelMap.p_c(3.0, theta), terms=2 * lin.terms, samples=args.samples)
    except (LinearizationError, ArithmeticError) as e:
        checks.add("build", False, str(e))
        return checks.finish(args.report)

    checks.add("residual", lin.residual < RESIDUAL_TOL, lin.residual)
    drift = abs(doubled.rho - lin.rho) / lin.rho
    checks.add("radius_stability", drift < RADIUS_STABILITY, drift)

    verdict = verdict_from_linearization(lin)
    d1, dc = verdict.distances
    checks.add("verdict_c3", verdict.verdict is BoundaryVerdict.ON_BOUNDARY_ONE, verdict.verdict.value)
    checks.add("one_on_boundary", d1 < ONE_ON_BOUNDARY, d1)
    checks.add("c_off_boundary", dc > C_OFF_BOUNDARY, dc)

    for c in (1.0, -1.0):
        v = boundary_critical_point(c, rotation=theta, terms=args.terms, samples=args.samples)
        checks.add(f"verdict_c{c:+g}", v.verdict is BoundaryVerdict.BOTH, v.verdict.value)

    try:
        centers = capture_centers(theta, 2).centers(2)
    except CensusError as e:
        checks.add("level_two_residuals", False, str(e))
    else:
        residuals = []
        for c in centers:
            try:
                residuals.append(build_linearization(CubicSiegelMap.p_c(c, theta), terms=args.terms).residual)
            except (LinearizationError, ArithmeticError) as e:
                residuals.append(math.inf)
                logger.warning("linearization failed at %s: %s", c, e)
        checks.add("level_two_residuals", max(residuals) < RESIDUAL_TOL, max(residuals))
    return checks.finish(args.report, rho=lin.rho, terms=lin.terms)


def _center_arguments(args: argparse.Namespace) -> None:
    try:
        check_center(args.center, args.level, args.theta)
    except ValueError as e:
        raise UsageError(str(e)) from e


def trace_component(args: argparse.Namespace) -> int:
    _center_arguments(args)
    trace = trace_component_boundary(args.center, args.level, args.rays, args.r_stop, args.theta)
    payload = trace.to_dict()
    payload["theta"] = str(args.theta)
    payload["diameter"] = trace.diameter
    payload["relation_fraction"] = trace.relation_fraction()
    _emit(payload, args.out)
    if not trace.closed():
        logger.error("component boundary did not close (gap %.2e, diameter %.2e)", trace.closure_gap, trace.diameter)
        return EXIT_FAILURE
    return EXIT_OK


def trace_ray(args: argparse.Namespace) -> int:
    if not 0.0 <= args.angle < 1.0:
        raise UsageError(f"ray angle must lie in [0, 1), got {args.angle}")
    _center_arguments(args)
    path = trace_parameter_ray(args.center, args.level, args.angle, args.r_stop, args.theta)
    payload = path.to_dict()
    payload["theta"] = str(args.theta)
    _emit(payload, args.out)
    return EXIT_OK


def trace_zakeri_curve(args: argparse.Namespace) -> int:
    trace = trace_zakeri(args.theta, args.samples, threads=_threads(args))
    payload = trace.to_dict()
    payload["theta"] = str(args.theta)
    if trace.points:
        points = np.asarray(trace.points)
        payload["distance_to_one"] = float(np.abs(points - 1.0).min())
        payload["distance_to_minus_one"] = float(np.abs(points + 1.0).min())
        payload["mirror_hausdorff"] = hausdorff_distance(points, 1.0 / points)
    _emit(payload, args.out)
    return EXIT_OK


def trace_siegel(args: argparse.Namespace) -> int:
    if args.c is not None:
        if args.c == 0:
            raise UsageError("c-plane parameter must be nonzero")
        map = CubicSiegelMap.p_c(args.c, args.theta)
    else:
        map = CubicSiegelMap.f_a(args.a, args.theta)
    lin = build_linearization(map, terms=args.terms, samples=args.samples)
    payload = boundary_to_json(lin)
    payload["critical_points_on_boundary"] = [[z.real, z.imag] for z in lin.boundary_points]
    payload["distances"] = {
        format_complex(z): float(lin.distance_to_boundary(z)) for z in map.critical_points
    }
    if map.slice is MapSlice.C_PLANE:
        payload["verdict"] = verdict_from_linearization(lin).to_dict()
    if args.rays > 0:
        radii = np.linspace(0.0, 0.99, INTERNAL_RAY_POINTS)
        payload["internal_rays"] = [
            {"angle": k / args.rays, "path": [[z.real, z.imag] for z in internal_ray(lin, k / args.rays, radii)]}
            for k in range(args.rays)
        ]
    _emit(payload, args.out)
    return EXIT_OK


_VERIFY: dict[str, Callable[[argparse.Namespace], int]] = {
    "census": verify_census,
    "symmetry": verify_symmetry,
    "linearization": verify_linearization,
}

_TRACE: dict[str, Callable[[argparse.Namespace], int]] = {
    "component": trace_component,
    "ray": trace_ray,
    "zakeri": trace_zakeri_curve,
    "siegel": trace_siegel,
}


def cmd_verify(args: argparse.Namespace) -> int:
    return _VERIFY[args.check](args)


def cmd_trace(args: argparse.Namespace) -> int:
    return _TRACE[args.target](args)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=getattr(logging, args.log_level.upper()),
        format="%(levelname)s: %(message)s",
    )

    try:
        if args.command == "render":
            return cmd_render(args, parser)
        if args.command == "centers":
            return cmd_centers(args)
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "trace":
            return cmd_trace(args)
    except UsageError as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError, RuntimeError, ArithmeticError) as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return EXIT_FAILURE

    parser.print_help()
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
