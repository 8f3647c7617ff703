"""
cubic_siegel.capture
--------------------

Parameter-space computations for the critically marked family P_c:

* the capture polynomial tower G_1..G_L, where P_c^ℓ(c) = c·G_ℓ(c), and the
  census of capture-component centers it yields (3^{ℓ-1} new centers per level);
* the parameter map Φ(c) = φ_c(P_c^ℓ(c)) on a capture component;
* parameter rays Φ⁻¹((0, 1)·e^{2πit}) by predictor-corrector continuation;
* component boundary traces with a bounded-turning diagnostic;
* the Zakeri curve, located by bisection on the boundary verdict.
"""

from __future__ import annotations

import cmath
import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np
from numpy.typing import ArrayLike

from .config import get_config
from .family import GOLDEN, CubicSiegelMap, RotationNumber, conjugate_parameters
from .numerics import ComplexPolynomial, RootFindingError, find_roots
from .siegel import (
    BoundaryVerdict,
    InteriorVerdict,
    LinearizationError,
    boundary_critical_point,
    build_linearization,
    conformal_radius,
    invert_series,
    linearization_series,
    multiplier_powers,
    polyline_diameter,
    polyline_distance,
    trusted_radius,
    verdict_from_linearization,
    winding_number,
)
from .utils import run_tasks

logger = logging.getLogger(__name__)

MAX_LEVEL = 6
ANNULUS = (1.0 / 30.0, 30.0)
LANDING_RADII = (0.98, 0.99, 0.995)
CENSUS_SEARCH_TOL = 1e-6
PERTURBATION = 1e-3
CLOSURE_TOL = 1e-3


class CensusError(RuntimeError):
    """The center census failed at ``level`` (count, cluster, match or simplicity)."""

    def __init__(self, message: str, level: int) -> None:
        super().__init__(message)
        self.level = level


class RayTraceError(RuntimeError):
    """Continuation stopped; ``last_radius`` is the last radius reached."""

    def __init__(self, message: str, last_radius: float) -> None:
        super().__init__(message)
        self.last_radius = last_radius


class ZakeriBracketError(RuntimeError):
    """No inner/outer bracket along the direction with index ``direction``."""

    def __init__(self, message: str, direction: int) -> None:
        super().__init__(message, direction)
        self.message = message
        self.direction = direction

    def __str__(self) -> str:
        return self.message


# ---------------------------------------------------------------------------
# Polynomial tower and census
# ---------------------------------------------------------------------------

def expected_degree(level: int) -> int:
    return (3**level - 1) // 2


@dataclass(frozen=True)
class CapturePolynomialTower:
    """G_1..G_L with G_ℓ = λ·G_{ℓ-1}·(1 - (1+c)·G_{ℓ-1}/2 + c·G_{ℓ-1}²/3), G_0 = 1.

    ``offsets`` shifts the value of G_ℓ by a constant; it is zero except for
    the negative test of the census.
    """

    theta: RotationNumber
    polys: tuple[ComplexPolynomial, ...]
    offsets: tuple[complex, ...] = ()

    def __post_init__(self) -> None:
        if not self.offsets:
            object.__setattr__(self, "offsets", (0j,) * len(self.polys))

    @property
    def max_level(self) -> int:
        return len(self.polys)

    def poly(self, level: int) -> ComplexPolynomial:
        if not 1 <= level <= self.max_level:
            raise ValueError(f"level {level} outside 1..{self.max_level}")
        return self.polys[level - 1]

    def evaluate(self, level: int, c: complex) -> tuple[complex, complex]:
        """G_ℓ(c) and G_ℓ'(c) through the recursion (orbit form)."""
        if not 1 <= level <= self.max_level:
            raise ValueError(f"level {level} outside 1..{self.max_level}")
        lam = self.theta.multiplier
        c = complex(c)
        g, dg = 1.0 + 0j, 0j
        for _ in range(level):
            g2 = g * g
            g, dg = (
                lam * g * (1.0 - (1.0 + c) * g / 2.0 + c * g2 / 3.0),
                lam * (dg - g2 / 2.0 - (1.0 + c) * g * dg + g2 * g / 3.0 + c * g2 * dg),
            )
        return g + self.offsets[level - 1], dg

    def perturbed(self, level: int, delta: complex = PERTURBATION) -> CapturePolynomialTower:
        """Copy with G_ℓ shifted by ``delta``; breaks the divisibility of the tower."""
        polys = list(self.polys)
        polys[level - 1] = polys[level - 1] + ComplexPolynomial([delta])
        offsets = list(self.offsets)
        offsets[level - 1] += delta
        return replace(self, polys=tuple(polys), offsets=tuple(offsets))


def capture_polys(theta: RotationNumber, L: int) -> CapturePolynomialTower:
    """Build G_1..G_L by exact polynomial arithmetic.

    Raises:
        ValueError: If L is outside 1..6.
        CensusError: If a degree differs from (3^ℓ - 1)/2.
    """
    if not 1 <= L <= MAX_LEVEL:
        raise ValueError(f"max level must lie in 1..{MAX_LEVEL}, got {L}")
    lam = theta.multiplier
    c = ComplexPolynomial([0.0, 1.0])
    half_one_plus_c = ComplexPolynomial([0.5, 0.5])
    third_c = c.scale(1.0 / 3.0)
    one = ComplexPolynomial([1.0])
    g = one
    polys = []
    for level in range(1, L + 1):
        factor = one - half_one_plus_c * g + third_c * g * g
        g = (g * factor).scale(lam)
        if g.degree != expected_degree(level):
            raise CensusError(f"G_{level} has degree {g.degree}, expected {expected_degree(level)}", level)
        polys.append(g)
    logger.debug("capture tower built to level %d (degree %d)", L, polys[-1].degree)
    return CapturePolynomialTower(theta, tuple(polys))


@dataclass(frozen=True)
class CenterRecord:
    level: int
    center: complex
    residual: float
    derivative: float

    def to_row(self) -> dict[str, Any]:
        return {
            "level": self.level,
            "re": self.center.real,
            "im": self.center.imag,
            "residual": self.residual,
            "derivative_magnitude": self.derivative,
        }


@dataclass(frozen=True)
class CensusReport:
    tower: CapturePolynomialTower
    levels: tuple[tuple[CenterRecord, ...], ...]

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(len(level) for level in self.levels)

    def centers(self, level: int) -> list[complex]:
        return [r.center for r in self.levels[level - 1]]

    @property
    def records(self) -> list[CenterRecord]:
        return [r for level in self.levels for r in level]

    def to_dict(self) -> dict[str, Any]:
        return {
            "theta": str(self.tower.theta),
            "counts": list(self.counts),
            "min_derivative": min(r.derivative for r in self.records),
            "max_residual": max(r.residual for r in self.records),
        }


def _polish(tower: CapturePolynomialTower, level: int, root: complex, steps: int = 8) -> complex:
    value, deriv = tower.evaluate(level, root)
    for _ in range(steps):
        if deriv == 0:
            break
        candidate = root - value / deriv
        new_value, new_deriv = tower.evaluate(level, candidate)
        if not abs(new_value) < abs(value):
            break
        root, value, deriv = candidate, new_value, new_deriv
        if abs(value) == 0.0:
            break
    return root


def capture_centers(
    theta: RotationNumber,
    L: int,
    *,
    tower: CapturePolynomialTower | None = None,
) -> CensusReport:
    """Centers of the capture components of levels 1..L.

    Level-ℓ centers are the roots of G_ℓ that are not roots of G_{ℓ-1}, matched
    by nearest neighbour within the cluster distance. Each level must have
    exactly 3^{ℓ-1} centers, all simple and inside 1/30 < |c| < 30.

    Raises:
        CensusError: On a count mismatch, a root cluster, an unmatched root of
            the previous level, a non-simple root or a large residual.
    """
    cfg = get_config().roots
    tower = capture_polys(theta, L) if tower is None else tower
    previous: list[complex] = []
    levels = []
    for level in range(1, L + 1):
        poly = tower.poly(level)
        try:
            report = find_roots(poly, CENSUS_SEARCH_TOL)
        except RootFindingError as exc:
            raise CensusError(f"root finding failed at level {level}: {exc}", level) from exc
        if report.clusters:
            raise CensusError(f"root cluster at level {level}: {report.clusters}", level)
        roots = [_polish(tower, level, r.root) for r in report]

        remaining = list(roots)
        for old in previous:
            gaps = [abs(old - r) for r in remaining]
            k = int(np.argmin(gaps))
            if gaps[k] > cfg.cluster_distance:
                raise CensusError(f"root {old} of G_{level - 1} is not a root of G_{level}", level)
            remaining.pop(k)
        expected = 3 ** (level - 1)
        if len(remaining) != expected:
            raise CensusError(f"level {level} has {len(remaining)} centers, expected {expected}", level)

        records = []
        for center in sorted(remaining, key=lambda z: (round(z.real, 9), round(z.imag, 9))):
            value, deriv = tower.evaluate(level, center)
            record = CenterRecord(level, center, abs(value), abs(deriv))
            if record.residual > cfg.census_residual:
                raise CensusError(f"residual {record.residual:.2e} at center {center} (level {level})", level)
            if record.derivative <= cfg.simple_derivative:
                raise CensusError(f"center {center} is not simple: |G'| = {record.derivative:.2e}", level)
            if not ANNULUS[0] < abs(center) < ANNULUS[1]:
                raise CensusError(f"center {center} lies outside the annulus", level)
            records.append(record)
        levels.append(tuple(records))
        previous = roots
        logger.debug("level %d: %d centers", level, len(records))
    census = CensusReport(tower, tuple(levels))
    logger.info("census for theta=%s: counts %s", theta, census.counts)
    return census


def mirror_centers(centers: Iterable[complex]) -> list[complex]:
    """Interior capture centers 1/c for exterior centers c."""
    return [1.0 / complex(c) for c in centers]


def a_plane_centers(centers: Iterable[complex], theta: RotationNumber = GOLDEN) -> list[complex]:
    """Both a-plane parameters ±√η(c) for every c-plane center."""
    out: list[complex] = []
    for c in centers:
        out.extend(conjugate_parameters(complex(c), theta))
    return out


# ---------------------------------------------------------------------------
# Parameter map
# ---------------------------------------------------------------------------

def _free_point(c: complex, free_is_c: bool) -> complex:
    return complex(c) if free_is_c else 1.0 + 0j


def _series_coordinate(
    c: complex,
    level: int,
    free_is_c: bool,
    rotation: RotationNumber,
    terms: int,
    seed: complex,
) -> tuple[complex, float]:
    """ψ_c⁻¹(P_c^ℓ(free point)) and the trusted radius, without the boundary realization."""
    lcfg = get_config().linearization
    map = CubicSiegelMap.p_c(c, rotation)
    lam, quad, cubic = map.coefficients
    series = linearization_series(map, terms)
    rho = float(
        trusted_radius(
            series.coeffs,
            multiplier_powers(rotation, terms + 1),
            lam,
            quad,
            cubic,
            conformal_radius(series, lcfg.safety),
            lcfg.boundary_residual,
        )
    )
    if rho <= 0:
        raise LinearizationError(f"no trusted radius at c={c}")
    z = _free_point(c, free_is_c)
    for _ in range(level):
        z = map.evaluate(z)
    w, ok = invert_series(series, np.asarray(z), np.asarray(seed), lcfg.newton_steps, lcfg.newton_tol, 1.05 * rho)
    if not bool(ok):
        raise LinearizationError(f"outside linearization domain at c={c}")
    return complex(w), rho


def _free_is_c(c: complex, rotation: RotationNumber, terms: int, samples: int) -> bool:
    verdict = boundary_critical_point(c, rotation=rotation, terms=terms, samples=samples).verdict
    return verdict is not BoundaryVerdict.ON_BOUNDARY_C


def param_map_phi(
    c: complex,
    level: int,
    rotation: RotationNumber = GOLDEN,
    *,
    terms: int | None = None,
    samples: int | None = None,
) -> complex:
    """Φ(c) = φ_c(P_c^ℓ(free critical point)).

    Raises:
        ValueError: If the free critical orbit is not inside Δ at step ℓ.
        LinearizationError: If the linearization fails at c.
    """
    if level < 1:
        raise ValueError("level must be at least 1")
    lin = build_linearization(CubicSiegelMap.p_c(c, rotation), terms=terms, samples=samples)
    boundary = verdict_from_linearization(lin)
    free = _free_point(c, boundary.verdict is not BoundaryVerdict.ON_BOUNDARY_C)
    z = free
    for _ in range(level):
        z = lin.map.evaluate(z)
    verdict, w = lin.locate(z)
    if verdict is not InteriorVerdict.INSIDE:
        raise ValueError(f"free critical orbit of c={c} is not captured at level {level} ({verdict.value})")
    if w is None:
        wa, ok = lin.invert(z)
        if not bool(ok):
            raise LinearizationError(f"outside linearization domain at c={c}")
        w = complex(wa)
    return lin.phi_rotation * w / lin.rho


class _PhiSolver:
    """Newton solver for Φ(c) = target along one component.

    The rotation normalizing φ is refreshed at each accepted point; the
    corrector differentiates only ψ⁻¹(P^ℓ(c))/ρ by centered finite differences.
    """

    def __init__(self, center: complex, level: int, rotation: RotationNumber, terms: int, samples: int) -> None:
        tcfg = get_config().trace
        self.center = complex(center)
        self.level = level
        self.rotation = rotation
        self.terms = terms
        self.samples = samples
        self.fd_step = tcfg.fd_step
        self.free_is_c = _free_is_c(center, rotation, terms, samples)
        self.phase = self._phase(self.center)

    def _phase(self, c: complex) -> complex:
        lin = build_linearization(CubicSiegelMap.p_c(c, self.rotation), terms=self.terms, samples=self.samples)
        return lin.phi_rotation

    def seed_for(self, c: complex) -> complex:
        """Starting guess for ψ⁻¹(P^ℓ(free point)) from the seed table of a full build."""
        lin = build_linearization(CubicSiegelMap.p_c(c, self.rotation), terms=self.terms, samples=self.samples)
        z = _free_point(c, self.free_is_c)
        for _ in range(self.level):
            z = lin.map.evaluate(z)
        w, _ = lin.invert(z)
        return complex(w)

    def coordinate(self, c: complex, seed: complex) -> tuple[complex, complex]:
        """(ψ⁻¹(P^ℓ(c))/ρ, raw w)."""
        w, rho = _series_coordinate(c, self.level, self.free_is_c, self.rotation, self.terms, seed)
        return w / rho, w

    def phi(self, c: complex, seed: complex = 0j) -> complex:
        g, _ = self.coordinate(c, seed)
        return self.phase * g

    def solve(self, target: complex, guess: complex, seed: complex, iterations: int = 20) -> tuple[complex, complex]:
        """Corrector: returns (c, w) with phase·g(c) = target."""
        c = complex(guess)
        goal = target / self.phase
        for _ in range(iterations):
            g, w = self.coordinate(c, seed)
            h = self.fd_step * (1.0 + abs(c))
            g_plus, _ = self.coordinate(c + h, w)
            g_minus, _ = self.coordinate(c - h, w)
            slope = (g_plus - g_minus) / (2.0 * h)
            if slope == 0 or not cmath.isfinite(slope):
                raise RayTraceError(f"flat parameter map at c={c}", abs(target))
            step = (g - goal) / slope
            c -= step
            seed = w
            if abs(step) < 1e-13 * (1.0 + abs(c)) or abs(g - goal) < 1e-12:
                g, w = self.coordinate(c, seed)
                return c, w
        g, w = self.coordinate(c, seed)
        if abs(g - goal) > 1e-8:
            raise RayTraceError(f"corrector did not converge for target {target}", abs(target))
        return c, w

    def refresh(self, c: complex) -> None:
        self.phase = self._phase(c)


def check_center(center: complex, level: int, rotation: RotationNumber) -> None:
    tower = capture_polys(rotation, level)
    value, _ = tower.evaluate(level, center)
    if abs(value) > 1e-6:
        raise ValueError(f"{center} is not a level-{level} center (|G| = {abs(value):.2e})")


def _extrapolate(radii: Sequence[float], points: Sequence[complex]) -> complex:
    """Lagrange extrapolation of c(r) to r = 1 in the variable 1 - r."""
    xs = [1.0 - r for r in radii]
    total = 0j
    for i, (xi, ci) in enumerate(zip(xs, points)):
        weight = 1.0
        for j, xj in enumerate(xs):
            if j != i:
                weight *= (0.0 - xj) / (xi - xj)
        total += weight * ci
    return total


@dataclass(frozen=True)
class RayPath:
    """Parameter ray of angle ``angle`` traced from the center."""

    center: complex
    level: int
    angle: float
    radii: tuple[float, ...]
    points: tuple[complex, ...]
    landing: complex
    landing_distance: float | None = None

    def point_at(self, radius: float) -> complex:
        for r, c in zip(self.radii, self.points):
            if abs(r - radius) < 1e-12:
                return c
        raise KeyError(radius)

    def to_dict(self) -> dict[str, Any]:
        return {
            "center": [self.center.real, self.center.imag],
            "level": self.level,
            "angle": self.angle,
            "radii": list(self.radii),
            "path": [[c.real, c.imag] for c in self.points],
            "landing": [self.landing.real, self.landing.imag],
            "landing_distance": self.landing_distance,
        }


def landing_distance(c: complex, level: int, rotation: RotationNumber = GOLDEN, *, samples: int | None = None) -> float:
    """dist(P_c^ℓ(free critical point), ∂Δ_c) as a fraction of diam ∂Δ_c.

    The free critical point is c when 1 lies on ∂Δ_c and 1 on mirror components.
    """
    lin = build_linearization(CubicSiegelMap.p_c(c, rotation), samples=samples)
    z = _free_point(c, verdict_from_linearization(lin).verdict is not BoundaryVerdict.ON_BOUNDARY_C)
    for _ in range(level):
        z = lin.map.evaluate(z)
    return float(lin.distance_to_boundary(z) / lin.diameter)


def _landing_checkpoints(r_stop: float) -> list[float]:
    return [r for r in LANDING_RADII if r <= r_stop + 1e-12]


def trace_parameter_ray(
    center: complex,
    level: int,
    t: float,
    r_stop: float | None = None,
    rotation: RotationNumber = GOLDEN,
    *,
    terms: int | None = None,
    samples: int = 128,
    measure_landing: bool = True,
) -> RayPath:
    """Follow Φ(c) = r·e^{2πit} from r = 0.05 to ``r_stop``.

    The step in r is adaptive: it grows after an accepted corrector and halves
    on failure, down to the configured floor. The landing estimate is the
    extrapolation of c(r) through r = 0.98, 0.99, 0.995.

    Raises:
        ValueError: On a bad angle, radius or center.
        RayTraceError: If the corrector keeps failing; carries the last radius.
    """
    cfg = get_config().trace
    r_stop = cfg.r_stop if r_stop is None else r_stop
    if not 0.0 < r_stop < 1.0:
        raise ValueError(f"r_stop must lie in (0, 1), got {r_stop}")
    if not 0.0 <= t < 1.0:
        raise ValueError(f"ray angle must lie in [0, 1), got {t}")
    terms = cfg.ray_terms if terms is None else terms
    check_center(center, level, rotation)
    solver = _PhiSolver(center, level, rotation, terms, samples)
    direction = cmath.exp(2j * math.pi * t)

    # first point: one Newton solve from the center
    r = min(cfg.r_start, r_stop)
    c, w = solver.solve(r * direction, complex(center), 0j)
    radii, points = [r], [c]
    stops = sorted(set(_landing_checkpoints(r_stop)) | {r_stop})
    step = cfg.max_step
    while r < r_stop - 1e-15:
        upcoming = next(s for s in stops if s > r + 1e-15)
        r_next = min(r + step, upcoming, r + 0.5 * (1.0 - r))
        if len(points) >= 2:
            slope = (points[-1] - points[-2]) / (radii[-1] - radii[-2])
            guess = c + slope * (r_next - r)
        else:
            guess = c
        try:
            c_new, w_new = solver.solve(r_next * direction, guess, w)
            if len(points) >= 2 and abs(c_new - guess) > 10.0 * abs(guess - c) + 1e-3:
                raise RayTraceError("corrector jumped away from the predictor", r)
        except (RayTraceError, LinearizationError, ArithmeticError) as exc:
            step *= 0.5
            logger.debug("ray t=%.4f: step halved to %.2e at r=%.5f (%s)", t, step, r, exc)
            if step < cfg.min_step:
                raise RayTraceError(f"ray t={t} stopped at r={r:.5f}: {exc}", r) from exc
            continue
        r, c, w = r_next, c_new, w_new
        radii.append(r)
        points.append(c)
        solver.refresh(c)
        step = min(cfg.max_step, 1.5 * step)

    checkpoints = _landing_checkpoints(r_stop)
    if len(checkpoints) >= 2:
        path = RayPath(complex(center), level, t, tuple(radii), tuple(points), points[-1])
        landing = _extrapolate(checkpoints, [path.point_at(x) for x in checkpoints])
    else:
        landing = points[-1]
    distance = None
    if measure_landing:
        try:
            distance = landing_distance(landing, level, rotation)
        except (LinearizationError, ArithmeticError) as exc:
            logger.warning("no landing check for ray t=%.4f: %s", t, exc)
    return RayPath(complex(center), level, t, tuple(radii), tuple(points), landing, distance)


# ---------------------------------------------------------------------------
# Component boundary
# ---------------------------------------------------------------------------

def _segments_cross(p1: np.ndarray, p2: np.ndarray, q1: np.ndarray, q2: np.ndarray) -> np.ndarray:
    def orient(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
        return np.sign(np.imag(np.conj(b - a) * (c - a)))

    return (orient(p1, p2, q1) * orient(p1, p2, q2) < 0) & (orient(q1, q2, p1) * orient(q1, q2, p2) < 0)


def is_simple_polygon(vertices: ArrayLike) -> bool:
    """True when no two non-adjacent edges of the closed polygon cross."""
    v = np.asarray(vertices, dtype=np.complex128)
    n = len(v)
    a, b = v, np.roll(v, -1)
    i, j = np.triu_indices(n, k=2)
    keep = ~((i == 0) & (j == n - 1))
    i, j = i[keep], j[keep]
    return not bool(_segments_cross(a[i], b[i], a[j], b[j]).any())


def quasicircle_diagnostic(polyline: ArrayLike) -> float:
    """Bounded-turning constant of a closed polyline.

    Maximum over vertex pairs of diam(smaller arc)/|endpoint difference|,
    where the smaller arc is the one of smaller diameter.

    Raises:
        ValueError: With fewer than 16 vertices or repeated vertices.
    """
    v = np.asarray(polyline, dtype=np.complex128)
    n = len(v)
    if n < 16:
        raise ValueError(f"quasicircle diagnostic needs at least 16 vertices, got {n}")
    dist = np.abs(v[:, None] - v[None, :])
    if np.any(dist[np.triu_indices(n, k=1)] == 0.0):
        raise ValueError("polyline has repeated vertices")
    idx = np.arange(n)
    # forward[i, j]: diameter of the arc v_i, v_{i+1}, ..., v_{i+j}
    forward = np.zeros((n, n))
    for j in range(1, n):
        rows = (idx[:, None] + np.arange(j)[None, :]) % n
        newest = ((idx + j) % n)[:, None]
        forward[:, j] = np.maximum(forward[:, j - 1], dist[rows, newest].max(axis=1))
    j = np.arange(1, n)
    ends = (idx[:, None] + j[None, :]) % n
    backward = forward[ends, n - j[None, :]]
    ratio = np.minimum(forward[:, 1:], backward) / dist[idx[:, None], ends]
    return float(ratio.max())


@dataclass(frozen=True)
class ComponentTrace:
    center: complex
    level: int
    angles: tuple[float, ...]
    landings: tuple[complex, ...]
    closure_gap: float
    simple: bool
    winding: int
    turning_constant: float
    failed_angles: tuple[float, ...] = ()
    landing_distances: tuple[float, ...] = field(default=())

    @property
    def diameter(self) -> float:
        return polyline_diameter(np.array(self.landings))

    def relation_fraction(self, threshold: float = 5e-3) -> float:
        """Share of landings with dist(P^ℓ(c), ∂Δ_c) below ``threshold``·diam."""
        values = [d for d in self.landing_distances if math.isfinite(d)]
        return sum(d < threshold for d in values) / len(values) if values else 0.0

    def closed(self, tol: float = CLOSURE_TOL) -> bool:
        """Finite closure gap below ``tol``·diam on a simple polygon of winding one."""
        if not math.isfinite(self.closure_gap):
            return False
        return self.closure_gap < tol * self.diameter and self.simple and self.winding == 1

    def to_dict(self) -> dict[str, Any]:
        return {
            "center": [self.center.real, self.center.imag],
            "level": self.level,
            "angles": list(self.angles),
            "landings": [[c.real, c.imag] for c in self.landings],
            "closure_gap": self.closure_gap if math.isfinite(self.closure_gap) else None,
            "closed": self.closed(),
            "simple": self.simple,
            "winding": self.winding,
            "turning_constant": self.turning_constant,
            "failed_angles": list(self.failed_angles),
            "landing_distances": list(self.landing_distances),
        }


def _follow_circle(
    solver: _PhiSolver,
    radius: float,
    start: complex,
    seed: complex,
    count: int,
    substeps: int = 4,
) -> tuple[list[complex | None], complex | None]:
    """Continue Φ(c) = radius·e^{2πit} through t = k/count; also returns the point back at t = 1."""
    out: list[complex | None] = [start]
    c, w = start, seed
    prev: complex | None = None
    for k in range(1, count + 1):
        t0, t1 = (k - 1) / count, k / count
        ok = False
        for depth in range(substeps):
            pieces = 2**depth
            c_try, w_try, prev_try = c, w, prev
            try:
                for s in range(1, pieces + 1):
                    t = t0 + (t1 - t0) * s / pieces
                    guess = c_try if prev_try is None else 2.0 * c_try - prev_try
                    c_next, w_next = solver.solve(radius * cmath.exp(2j * math.pi * t), guess, w_try)
                    prev_try, c_try, w_try = c_try, c_next, w_next
            except (RayTraceError, LinearizationError, ArithmeticError):
                continue
            c, w, prev, ok = c_try, w_try, prev_try, True
            break
        if not ok:
            out.extend([None] * (count - k))
            return out, None
        if k < count:
            out.append(c)
            solver.refresh(c)
    return out, c


def trace_component_boundary(
    center: complex,
    level: int,
    K: int,
    r_stop: float | None = None,
    rotation: RotationNumber = GOLDEN,
    *,
    terms: int | None = None,
    samples: int = 128,
    measure_landing: bool = True,
) -> ComponentTrace:
    """Landing points of the K parameter rays of angles k/K.

    One radial ray reaches the landing circles; the circles are then followed
    in angle. Angles where circle continuation fails fall back to a radial
    trace of their own.

    Raises:
        ValueError: If K < 64.
        RayTraceError: If more than the allowed fraction of rays fails.
    """
    if K < 64:
        raise ValueError(f"component trace needs at least 64 rays, got {K}")
    cfg = get_config().trace
    r_stop = cfg.r_stop if r_stop is None else r_stop
    terms = cfg.ray_terms if terms is None else terms
    radii = _landing_checkpoints(r_stop) or [r_stop]
    base = trace_parameter_ray(center, level, 0.0, r_stop, rotation, terms=terms, samples=samples, measure_landing=False)
    solver = _PhiSolver(center, level, rotation, terms, samples)

    per_radius: list[list[complex | None]] = []
    closing: list[complex | None] = []
    for radius in radii:
        start = base.point_at(radius)
        solver.refresh(start)
        _, seed = solver.coordinate(start, solver.seed_for(start))
        values, back = _follow_circle(solver, radius, start, seed, K)
        per_radius.append(values)
        closing.append(back)

    angles = [k / K for k in range(K)]
    landings: list[complex] = []
    kept_angles: list[float] = []
    failed: list[float] = []
    for k, t in enumerate(angles):
        column = [values[k] for values in per_radius]
        if any(p is None for p in column):
            try:
                ray = trace_parameter_ray(center, level, t, r_stop, rotation, terms=terms, samples=samples, measure_landing=False)
                column = [ray.point_at(r) for r in radii]
            except (RayTraceError, LinearizationError, ArithmeticError) as exc:
                logger.warning("ray t=%.4f failed: %s", t, exc)
                failed.append(t)
                continue
        points = [p for p in column if p is not None]
        landings.append(_extrapolate(radii, points) if len(radii) >= 2 else points[-1])
        kept_angles.append(t)

    if len(failed) > cfg.max_failure_fraction * K:
        raise RayTraceError(f"{len(failed)} of {K} rays failed", r_stop)

    if all(p is not None for p in closing) and len(radii) >= 2:
        gap = abs(_extrapolate(radii, [p for p in closing if p is not None]) - landings[0])
    elif all(p is not None for p in closing):
        gap = abs(closing[-1] - landings[0])  # type: ignore[operator]
    else:
        logger.warning("circle continuation did not return to t = 1; closure gap unknown")
        gap = math.inf
    polygon = np.array(landings)
    distances: list[float] = []
    if measure_landing:
        for c in landings:
            try:
                distances.append(landing_distance(c, level, rotation))
            except (LinearizationError, ArithmeticError):
                distances.append(math.nan)
    trace = ComponentTrace(
        center=complex(center),
        level=level,
        angles=tuple(kept_angles),
        landings=tuple(landings),
        closure_gap=float(gap),
        simple=is_simple_polygon(polygon),
        winding=winding_number(polygon, complex(center)),
        turning_constant=quasicircle_diagnostic(polygon),
        failed_angles=tuple(failed),
        landing_distances=tuple(distances),
    )
    logger.info(
        "component of %s traced with %d rays: gap %.2e, turning %.3f",
        center, len(landings), trace.closure_gap, trace.turning_constant,
    )
    return trace


# ---------------------------------------------------------------------------
# Zakeri curve
# ---------------------------------------------------------------------------

_SIDE = {
    BoundaryVerdict.ON_BOUNDARY_C: -1,
    BoundaryVerdict.ON_BOUNDARY_ONE: 1,
    BoundaryVerdict.BOTH: 0,
}


@dataclass(frozen=True)
class ZakeriTrace:
    samples: int
    points: tuple[complex, ...]
    directions: tuple[int, ...]
    skipped: tuple[int, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "samples": self.samples,
            "directions": list(self.directions),
            "skipped": list(self.skipped),
            "polyline": [[c.real, c.imag] for c in self.points],
        }


def _zakeri_direction(job: tuple[int, int, RotationNumber, float, float, int | None, int | None]) -> complex:
    index, count, rotation, tie, bracket, terms, samples = job
    direction = cmath.exp(2j * math.pi * index / count)
    log_max = math.log(ANNULUS[1])
    grid = 24
    spacing = log_max / grid
    sides: dict[int, int | None] = {}

    def side(log_r: float) -> int | None:
        verdict = boundary_critical_point(
            math.exp(log_r) * direction, tie, rotation, terms=terms, samples=samples
        ).verdict
        return _SIDE.get(verdict)

    for m in range(grid + 1):
        for i in {m, -m}:
            sides[i] = side(i * spacing)
            if sides[i] == 0:
                return math.exp(i * spacing) * direction
        crossings = [
            i for i in range(-m, m)
            if sides.get(i) == -1 and sides.get(i + 1) == 1
        ]
        if crossings:
            i = min(crossings, key=lambda k: abs(k + 0.5))
            lo, hi = i * spacing, (i + 1) * spacing
            while hi - lo > bracket:
                mid = 0.5 * (lo + hi)
                s = side(mid)
                if s is None:
                    raise ZakeriBracketError(f"unresolved verdict at log r = {mid:.6f}", index)
                if s == 0:
                    return math.exp(mid) * direction
                if s < 0:
                    lo = mid
                else:
                    hi = mid
            return math.exp(0.5 * (lo + hi)) * direction
    raise ZakeriBracketError(f"no inner/outer bracket along direction {index}/{count}", index)


def trace_zakeri(
    theta: RotationNumber,
    N: int,
    *,
    threads: int | None = None,
    tol: float | None = None,
    bracket: float | None = None,
    terms: int | None = None,
    samples: int | None = None,
) -> ZakeriTrace:
    """Locate Γ along N directions by bisection in log-radius.

    Each direction scans outward from |c| = 1 on a symmetric log grid until an
    inner (OnBoundaryC) / outer (OnBoundaryOne) pair brackets Γ, then bisects
    to ``bracket``. A Both verdict counts as a hit. Directions without a bracket
    are skipped with a warning. Directions run in worker processes when
    ``threads`` > 1.
    """
    if N < 32:
        raise ValueError(f"Zakeri trace needs at least 32 directions, got {N}")
    cfg = get_config()
    threads = cfg.render.threads if threads is None else threads
    tie = cfg.trace.zakeri_tie if tol is None else tol
    bracket = cfg.trace.zakeri_bracket if bracket is None else bracket
    jobs = [(k, N, theta, tie, bracket, terms, samples) for k in range(N)]

    results = run_tasks(_zakeri_direction_safe, jobs, threads, processes=True)

    points, directions, skipped = [], [], []
    for k, result in enumerate(results):
        if isinstance(result, ZakeriBracketError):
            logger.warning("Zakeri direction %d skipped: %s", k, result)
            skipped.append(k)
            continue
        points.append(result)
        directions.append(k)
    logger.info("Zakeri curve: %d of %d directions", len(points), N)
    return ZakeriTrace(N, tuple(points), tuple(directions), tuple(skipped))


def _zakeri_direction_safe(job: tuple[Any, ...]) -> complex | ZakeriBracketError:
    try:
        return _zakeri_direction(job)  # type: ignore[arg-type]
    except ZakeriBracketError as exc:
        return exc


def hausdorff_distance(a: ArrayLike, b: ArrayLike) -> float:
    """Symmetric Hausdorff distance between two closed polylines (vertices to edges)."""
    pa = np.asarray(a, dtype=np.complex128)
    pb = np.asarray(b, dtype=np.complex128)
    return float(max(np.max(polyline_distance(pb, pa)), np.max(polyline_distance(pa, pb))))
