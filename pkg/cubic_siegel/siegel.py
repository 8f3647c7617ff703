"""
cubic_siegel.siegel
-------------------

Linearization of a cubic Siegel map at its fixed point 0.

The series ψ(w) = w + a_2 w² + ... solves ψ(λw) = P(ψ(w)) and maps the disk of
the conformal radius ρ onto the Siegel disk Δ. This module computes ψ and ρ,
samples ∂Δ, answers three-valued membership questions, evaluates the
normalized coordinate φ (φ∘P = λφ, φ(boundary critical point) = 1) and decides
which critical point lies on ∂Δ.

The boundary polyline is realized from the orbit of a critical point that
passes the boundary checks, ordered by rotation angle; when neither critical
orbit qualifies it falls back to ψ sampled on the circle of radius ρ.
"""

from __future__ import annotations

import cmath
import functools
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .config import get_config
from .family import GOLDEN, CubicSiegelMap, RotationNumber
from .numerics import (
    ComplexArray,
    NumericsError,
    PowerSeries,
    circle_values,
    radius_of_convergence,
)

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]

RESONANCE_GUARD = 1e-14
TRUST_SAMPLES = 128
SEED_RING_FRACTIONS = (0.2, 0.4, 0.6, 0.75, 0.85, 0.92, 0.96, 0.99)
SEED_RING_SIZE = 64
MAX_DOUBLED_SAMPLES = 1024
# a boundary candidate keeps this share of its orbit near the series polyline
CANDIDATE_NEAR_SHARE = 0.9
CANDIDATE_NEAR_DISTANCE = 0.1


class ResonanceError(ArithmeticError):
    """Raised when λ^n - λ vanishes numerically for some n of the series."""


class LinearizationError(RuntimeError):
    """Raised when the linearization cannot be built or inverted."""


class BoundaryVerdict(str, Enum):
    """Which critical point lies on the Siegel boundary."""
    ON_BOUNDARY_ONE = "one"
    ON_BOUNDARY_C = "c"
    BOTH = "both"
    UNRESOLVED = "unresolved"

    def swapped(self) -> BoundaryVerdict:
        if self is BoundaryVerdict.ON_BOUNDARY_ONE:
            return BoundaryVerdict.ON_BOUNDARY_C
        if self is BoundaryVerdict.ON_BOUNDARY_C:
            return BoundaryVerdict.ON_BOUNDARY_ONE
        return self


class InteriorVerdict(str, Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"
    NEAR_BOUNDARY = "near_boundary"


@dataclass(frozen=True)
class BoundaryCriticalVerdict:
    """Boundary verdict with dist(1, ∂Δ) and dist(c, ∂Δ) as fractions of diam ∂Δ."""

    verdict: BoundaryVerdict
    distances: tuple[float, float]
    parameter: complex
    diagnostics: str = ""

    def swapped(self, parameter: complex) -> BoundaryCriticalVerdict:
        """Verdict for the mirror parameter, with the roles of 1 and c exchanged."""
        d1, dc = self.distances
        return BoundaryCriticalVerdict(self.verdict.swapped(), (dc, d1), parameter, self.diagnostics)

    def to_dict(self) -> dict[str, Any]:
        return {
            "parameter": [self.parameter.real, self.parameter.imag],
            "verdict": self.verdict.value,
            "distances": list(self.distances),
            "diagnostics": self.diagnostics,
        }


# ---------------------------------------------------------------------------
# Polyline geometry
# ---------------------------------------------------------------------------

def _segments(vertices: ComplexArray) -> tuple[ComplexArray, ComplexArray]:
    start = np.asarray(vertices, dtype=np.complex128)
    return start, np.roll(start, -1) - start


def polyline_distance(vertices: ArrayLike, z: ArrayLike) -> Any:
    """Distance from z (scalar or array) to the closed polyline."""
    start, delta = _segments(np.asarray(vertices))
    zz = np.asarray(z, dtype=np.complex128)[..., None]
    length2 = np.abs(delta) ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.real((zz - start) * np.conj(delta)) / length2
    t = np.clip(np.nan_to_num(t, nan=0.0), 0.0, 1.0)
    dist = np.abs(zz - (start + t * delta)).min(axis=-1)
    return float(dist) if dist.ndim == 0 else dist


def nearest_segment(vertices: ArrayLike, z: complex) -> tuple[int, float, float]:
    """(segment index k, position t in [0, 1] along it, distance) for the closest segment."""
    start, delta = _segments(np.asarray(vertices))
    length2 = np.abs(delta) ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.real((z - start) * np.conj(delta)) / length2
    t = np.clip(np.nan_to_num(t, nan=0.0), 0.0, 1.0)
    dist = np.abs(z - (start + t * delta))
    k = int(np.argmin(dist))
    return k, float(t[k]), float(dist[k])


def point_in_polygon(vertices: ArrayLike, z: ArrayLike) -> Any:
    """Even-odd rule membership of z (scalar or array) in the closed polygon."""
    start = np.asarray(vertices, dtype=np.complex128)
    end = np.roll(start, -1)
    zz = np.asarray(z, dtype=np.complex128)[..., None]
    x, y = zz.real, zz.imag
    ya, yb = start.imag, end.imag
    straddles = (ya > y) != (yb > y)
    with np.errstate(invalid="ignore", divide="ignore"):
        x_cross = start.real + (y - ya) * (end.real - start.real) / (yb - ya)
    crossings = np.count_nonzero(straddles & (x < x_cross), axis=-1)
    inside = crossings % 2 == 1
    return bool(inside) if inside.ndim == 0 else inside


def winding_number(vertices: ArrayLike, z: complex = 0j) -> int:
    """Winding number of the closed polyline around z."""
    v = np.asarray(vertices, dtype=np.complex128) - z
    turns = np.angle(np.roll(v, -1) / v)
    return int(round(float(turns.sum()) / (2.0 * math.pi)))


def polyline_diameter(vertices: ArrayLike, chunk: int = 512) -> float:
    """Largest distance between two vertices."""
    v = np.asarray(vertices, dtype=np.complex128)
    best = 0.0
    for i in range(0, len(v), chunk):
        best = max(best, float(np.abs(v[i : i + chunk, None] - v[None, :]).max()))
    return best


# ---------------------------------------------------------------------------
# Series
# ---------------------------------------------------------------------------

def multiplier_powers(rotation: RotationNumber, count: int) -> ComplexArray:
    """λ^n for n = 0..count-1, phases reduced mod 1 before exponentiation."""
    n = np.arange(count)
    return np.exp(2j * np.pi * np.mod(n * rotation.value, 1.0))


def _denominators(rotation: RotationNumber, order: int) -> ComplexArray:
    lam_pow = multiplier_powers(rotation, order + 1)
    den = lam_pow - rotation.multiplier
    small = np.flatnonzero(np.abs(den[2:]) < RESONANCE_GUARD)
    if small.size:
        raise ResonanceError(f"resonance: |λ^n - λ| below {RESONANCE_GUARD:g} at n = {int(small[0]) + 2}")
    return den


def linearization_series(map: CubicSiegelMap, M: int) -> PowerSeries:
    """Coefficients of ψ with ψ(λw) = P(ψ(w)) and ψ'(0) = 1, up to w^M.

    With s2 = ψ² and s3 = ψ³ kept as running convolutions,
    a_n (λ^n - λ) = A·s2_n + B·s3_n for n >= 2.

    Raises:
        ValueError: If M < 32.
        ResonanceError: If λ^n - λ vanishes numerically for some n <= M.
        NumericsError: If a coefficient overflows.
    """
    if M < 32:
        raise ValueError(f"series order must be at least 32, got {M}")
    _, quad, cubic = map.coefficients
    den = _denominators(map.rotation, M)
    a = np.zeros(M + 1, dtype=np.complex128)
    s2 = np.zeros(M + 1, dtype=np.complex128)
    s3 = np.zeros(M + 1, dtype=np.complex128)
    a[1] = 1.0
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(2, M + 1):
            s2[n] = np.dot(a[1:n], a[n - 1 : 0 : -1])
            if n >= 3:
                s3[n] = np.dot(a[1 : n - 1], s2[n - 1 : 1 : -1])
            a[n] = (quad * s2[n] + cubic * s3[n]) / den[n]
    if not np.all(np.isfinite(a)):
        bad = int(np.flatnonzero(~np.isfinite(a))[0])
        raise NumericsError(f"linearization coefficient a_{bad} overflowed")
    return PowerSeries(a)


def series_batch(quad: ComplexArray, cubic: ComplexArray, rotation: RotationNumber, M: int) -> ComplexArray:
    """Linearization coefficients for many maps at once, shape (P, M+1)."""
    den = _denominators(rotation, M)
    quad = np.asarray(quad, dtype=np.complex128)
    cubic = np.asarray(cubic, dtype=np.complex128)
    count = quad.shape[0]
    a = np.zeros((count, M + 1), dtype=np.complex128)
    s2 = np.zeros_like(a)
    s3 = np.zeros_like(a)
    a[:, 1] = 1.0
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(2, M + 1):
            s2[:, n] = (a[:, 1:n] * a[:, n - 1 : 0 : -1]).sum(axis=1)
            if n >= 3:
                s3[:, n] = (a[:, 1 : n - 1] * s2[:, n - 1 : 1 : -1]).sum(axis=1)
            a[:, n] = (quad * s2[:, n] + cubic * s3[:, n]) / den[n]
    return a


def conformal_radius(series: PowerSeries, safety: float | None = None) -> float:
    """Radius of convergence of ψ shrunk by the safety factor (default 0.999)."""
    if safety is None:
        safety = get_config().linearization.safety
    return radius_of_convergence(series) * safety


def _cubic(z: ArrayLike, lam: complex, quad: ArrayLike, cubic: ArrayLike) -> Any:
    return z * (lam + z * (quad + cubic * z))


def conjugacy_residual(
    coeffs: ComplexArray,
    lam_pow: ComplexArray,
    lam: complex,
    quad: ArrayLike,
    cubic: ArrayLike,
    radius: ArrayLike,
    points: int = TRUST_SAMPLES,
) -> Any:
    """max over |w| = radius of |ψ(λw) - P(ψ(w))|, batched over leading axes."""
    inner = circle_values(coeffs, radius, points)
    outer = circle_values(coeffs * lam_pow, radius, points)
    q = np.asarray(quad)[..., None]
    b = np.asarray(cubic)[..., None]
    with np.errstate(all="ignore"):
        mismatch = np.abs(outer - _cubic(inner, lam, q, b)).max(axis=-1)
    return np.where(np.isfinite(mismatch), mismatch, np.inf)


def trusted_radius(
    coeffs: ComplexArray,
    lam_pow: ComplexArray,
    lam: complex,
    quad: ArrayLike,
    cubic: ArrayLike,
    rho0: ArrayLike,
    tol: float,
    points: int = TRUST_SAMPLES,
    halvings: int = 40,
    bisections: int = 30,
) -> FloatArray:
    """Largest r <= rho0 with relative conjugacy residual below ``tol``.

    The crossing is located by bisection in log r, so the result moves
    continuously with the coefficients. Batched over leading axes of
    ``coeffs``; entries that never pass come back as 0.
    """
    rho0 = np.asarray(rho0, dtype=np.float64)

    def passes(r: FloatArray) -> NDArray[np.bool_]:
        res = conjugacy_residual(coeffs, lam_pow, lam, quad, cubic, r, points)
        return res <= tol * r

    lo = rho0.copy()
    ok = passes(lo)
    done = ok.copy()
    for _ in range(halvings):
        if done.all():
            break
        lo = np.where(done, lo, 0.5 * lo)
        ok = passes(lo)
        done |= ok
    hi = np.where(lo < rho0, np.minimum(2.0 * lo, rho0), rho0)
    refine = done & (lo < rho0)
    if refine.any():
        for _ in range(bisections):
            mid = np.sqrt(lo * hi)
            good = passes(mid)
            lo = np.where(refine & good, mid, lo)
            hi = np.where(refine & ~good, mid, hi)
    return np.where(done, lo, 0.0)


# ---------------------------------------------------------------------------
# Boundary realization
# ---------------------------------------------------------------------------

def invert_series(
    series: PowerSeries, z: ComplexArray, w0: ComplexArray, steps: int, tol: float, limit: float
) -> tuple[ComplexArray, NDArray[np.bool_]]:
    """ψ⁻¹(z) by Newton iteration from ``w0``; the mask marks converged points with |w| < limit."""
    w = np.array(w0, dtype=np.complex128)
    done = np.zeros(w.shape, dtype=bool)
    with np.errstate(all="ignore"):
        for _ in range(steps):
            step = (series(w) - z) / series.derivative(w)
            step = np.where(np.isfinite(step), step, 0.0)
            w = np.where(done, w, w - step)
            done |= np.abs(step) < tol * (1.0 + np.abs(w))
            if done.all():
                break
        ok = done & np.isfinite(w) & (np.abs(w) < limit)
        ok &= np.abs(series(w) - z) <= 1e-9 * (1.0 + np.abs(z))
    return w, ok


def _critical_orbit(map: CubicSiegelMap, start: complex, count: int, floor: float, limit: float) -> ComplexArray | None:
    """First ``count`` points of the orbit, or None if it dips below ``floor`` or passes ``limit``."""
    points = np.empty(count, dtype=np.complex128)
    z = complex(start)
    for j in range(count):
        r = abs(z)
        if not math.isfinite(r) or r > limit or r < floor:
            return None
        points[j] = z
        z = map.evaluate(z)
    return points


def birkhoff_radius(orbit: ArrayLike) -> float:
    """Geometric mean of |z| along an orbit; equals ρ for an orbit on ∂Δ."""
    return float(np.exp(np.mean(np.log(np.abs(np.asarray(orbit))))))


def _label_at(vertices: ComplexArray, labels: FloatArray, z: complex) -> float:
    k, t, _ = nearest_segment(vertices, z)
    step = (labels[(k + 1) % len(labels)] - labels[k]) % 1.0
    return float((labels[k] + t * step) % 1.0)


@dataclass(frozen=True)
class _Realization:
    boundary: ComplexArray
    labels: FloatArray
    on_boundary: tuple[int, ...]
    orbit_radius: float | None
    rotation_turns: float


def _realize_boundary(
    map: CubicSiegelMap, series: PowerSeries, rho: float, count: int, tol: float
) -> _Realization:
    cfg = get_config().linearization
    circle = series.on_circle(rho, count)
    diam_s = polyline_diameter(circle)
    floor = 0.98 * float(np.abs(series.on_circle(rho * (1.0 - 2.0 * cfg.margin), count)).min())
    limit = 2.0 * float(np.abs(circle).max())
    crit = map.critical_points
    order = sorted(range(2), key=lambda i: polyline_distance(circle, crit[i]))
    theta = map.rotation.value
    steps = np.mod(np.arange(count) * theta, 1.0)

    candidates: dict[int, tuple[ComplexArray, float]] = {}
    for i in order:
        orbit = _critical_orbit(map, crit[i], count, floor, limit)
        if orbit is None:
            continue
        near = polyline_distance(circle, orbit) <= CANDIDATE_NEAR_DISTANCE * diam_s
        radius = birkhoff_radius(orbit)
        if near.mean() >= CANDIDATE_NEAR_SHARE and radius >= rho * (1.0 - 2.0 * cfg.margin):
            candidates[i] = (orbit, radius)

    if not candidates:
        # series circle; labels put the closer critical point at angle 0
        k, t, _ = nearest_segment(circle, crit[order[0]])
        offset = -(k + t) / count
        labels = np.mod(np.arange(count) / count + offset, 1.0)
        return _Realization(circle, labels, (), None, offset)

    primary = max(candidates, key=lambda i: (candidates[i][1], -order.index(i)))
    orbit, radius = candidates[primary]
    sort = np.argsort(steps, kind="stable")
    boundary, labels = orbit[sort], steps[sort]
    on_boundary = [primary]
    other = 1 - primary
    if other in candidates:
        o_orbit, o_radius = candidates[other]
        if abs(crit[other] - crit[primary]) < 1e-12:
            on_boundary.append(other)
        elif abs(math.log(o_radius / radius)) <= tol:
            diam = polyline_diameter(boundary)
            near = polyline_distance(boundary, o_orbit) <= tol * diam
            if near.mean() >= CANDIDATE_NEAR_SHARE:
                start = _label_at(boundary, labels, crit[other])
                merged = np.concatenate([boundary, o_orbit])
                merged_labels = np.concatenate([labels, np.mod(start + steps, 1.0)])
                sort = np.argsort(merged_labels, kind="stable")
                boundary, labels = merged[sort], merged_labels[sort]
                on_boundary.append(other)

    # rotation aligning ψ-angles with the orbit labels (circular mean of offsets)
    nearest = np.abs(boundary[:, None] - circle[None, :]).argmin(axis=1)
    offsets = labels - nearest / count
    rotation_turns = float(np.angle(np.exp(2j * np.pi * offsets).mean()) / (2.0 * math.pi))
    return _Realization(boundary, labels, tuple(sorted(on_boundary)), radius, rotation_turns)


@dataclass(frozen=True, eq=False)
class LinearizationData:
    """Linearization of one map with everything derived from it.

    ``boundary`` is a closed polyline on ∂Δ with ``boundary_angles`` holding
    the φ-argument (in turns) of each vertex. ``boundary_points`` lists the
    critical points found on ∂Δ; it is empty when the boundary fell back to
    the series circle.
    """

    map: CubicSiegelMap
    series: PowerSeries
    rho: float
    boundary: ComplexArray
    boundary_angles: FloatArray
    phi_rotation: complex
    boundary_points: tuple[complex, ...]
    orbit_radius: float | None
    diameter: float
    inner_radius: float
    outer_radius: float
    residual: float
    margin: float
    seeds_w: ComplexArray
    seeds_z: ComplexArray
    newton_steps: int
    newton_tol: float

    @property
    def terms(self) -> int:
        return self.series.order

    @property
    def source(self) -> str:
        return "critical-orbit" if self.boundary_points else "series"

    def distance_to_boundary(self, z: ArrayLike) -> Any:
        return polyline_distance(self.boundary, z)

    def invert(self, z: ArrayLike, seed: ArrayLike | None = None) -> tuple[ComplexArray, NDArray[np.bool_]]:
        """ψ⁻¹(z) by Newton iteration; the mask marks converged points."""
        zz = np.asarray(z, dtype=np.complex128)
        if seed is None:
            nearest = np.abs(zz[..., None] - self.seeds_z).argmin(axis=-1)
            seed = self.seeds_w[nearest]
        return invert_series(self.series, zz, np.asarray(seed), self.newton_steps, self.newton_tol, 1.5 * self.rho)

    def locate(self, z: complex, seed: complex | None = None) -> tuple[InteriorVerdict, complex | None]:
        """Membership verdict plus ψ⁻¹(z) when it was computed."""
        z = complex(z)
        r = abs(z)
        if r < self.inner_radius:
            return InteriorVerdict.INSIDE, None
        band = self.margin * self.diameter
        if r > self.outer_radius + band:
            return InteriorVerdict.OUTSIDE, None
        if polyline_distance(self.boundary, z) <= band:
            return InteriorVerdict.NEAR_BOUNDARY, None
        if not point_in_polygon(self.boundary, z):
            return InteriorVerdict.OUTSIDE, None
        w, ok = self.invert(z, seed)
        w = complex(w)
        if bool(ok) and abs(w) < self.rho * (1.0 - self.margin):
            return InteriorVerdict.INSIDE, w
        return InteriorVerdict.NEAR_BOUNDARY, (w if bool(ok) else None)

    def boundary_phi(self, z: complex) -> complex:
        """φ at a point of (or next to) the boundary polyline, from the vertex angles."""
        return cmath.exp(2j * math.pi * _label_at(self.boundary, self.boundary_angles, complex(z)))


def _seed_table(series: PowerSeries, rho: float, boundary_circle: ComplexArray) -> tuple[ComplexArray, ComplexArray]:
    angles = np.exp(2j * np.pi * np.arange(SEED_RING_SIZE) / SEED_RING_SIZE)
    ws = [np.zeros(1, dtype=np.complex128)]
    zs = [np.zeros(1, dtype=np.complex128)]
    for f in SEED_RING_FRACTIONS:
        ws.append(rho * f * angles)
        zs.append(series.on_circle(rho * f, SEED_RING_SIZE))
    count = len(boundary_circle)
    ws.append(rho * np.exp(2j * np.pi * np.arange(count) / count))
    zs.append(boundary_circle)
    return np.concatenate(ws), np.concatenate(zs)


def build_linearization(
    map: CubicSiegelMap,
    *,
    terms: int | None = None,
    samples: int | None = None,
    boundary_tol: float | None = None,
) -> LinearizationData:
    """Build the linearization of ``map`` and pass it through the residual gate.

    The gate requires max |ψ(λw) - P(ψ(w))| < 1e-8 on |w| = ρ/2. On failure
    the series order and sample count are doubled up to the configured
    maximum.

    Raises:
        LinearizationError: If the gate keeps failing or the series overflows.
        ResonanceError: On numerically resonant multipliers.
    """
    cfg = get_config().linearization
    M = cfg.terms if terms is None else terms
    K = cfg.samples if samples is None else samples
    tol = cfg.boundary_tol if boundary_tol is None else boundary_tol
    if K < 64:
        raise ValueError(f"boundary needs at least 64 samples, got {K}")
    lam = map.multiplier
    _, quad, cubic = map.coefficients
    while True:
        try:
            series = linearization_series(map, M)
        except NumericsError as exc:
            raise LinearizationError(f"linearization series unusable at M={M}: {exc}") from exc
        lam_pow = multiplier_powers(map.rotation, M + 1)
        rho0 = conformal_radius(series, cfg.safety)
        rho = float(trusted_radius(series.coeffs, lam_pow, lam, quad, cubic, rho0, cfg.boundary_residual))
        residual = float(conjugacy_residual(series.coeffs, lam_pow, lam, quad, cubic, 0.5 * rho, K)) if rho > 0 else math.inf
        if rho > 0 and residual < cfg.residual_gate:
            break
        if 2 * M > cfg.max_terms:
            raise LinearizationError(
                f"residual gate failed for {map.slice.value}={map.parameter}: "
                f"residual {residual:.3e} at M={M}"
            )
        logger.info("residual gate failed at M=%d (%.3e); doubling", M, residual)
        M *= 2
        K = max(K, min(2 * K, MAX_DOUBLED_SAMPLES))

    real = _realize_boundary(map, series, rho, K, tol)
    circle = series.on_circle(rho, K)
    inner_curve = series.on_circle(rho * (1.0 - 2.0 * cfg.margin), K)
    seeds_w, seeds_z = _seed_table(series, rho, circle)
    lin = LinearizationData(
        map=map,
        series=series,
        rho=rho,
        boundary=real.boundary,
        boundary_angles=real.labels,
        phi_rotation=cmath.exp(2j * math.pi * real.rotation_turns),
        boundary_points=tuple(map.critical_points[i] for i in real.on_boundary),
        orbit_radius=real.orbit_radius,
        diameter=polyline_diameter(real.boundary),
        inner_radius=0.98 * float(np.abs(inner_curve).min()),
        outer_radius=float(np.abs(real.boundary).max()),
        residual=residual,
        margin=cfg.margin,
        seeds_w=seeds_w,
        seeds_z=seeds_z,
        newton_steps=cfg.newton_steps,
        newton_tol=cfg.newton_tol,
    )
    logger.debug(
        "linearized %s=%s: M=%d K=%d rho=%.6g source=%s",
        map.slice.value, map.parameter, M, K, rho, lin.source,
    )
    return lin


@functools.lru_cache(maxsize=128)
def cached_linearization(
    map: CubicSiegelMap, terms: int | None = None, samples: int | None = None
) -> LinearizationData:
    """:func:`build_linearization` memoized on the map and sizes."""
    return build_linearization(map, terms=terms, samples=samples)


def siegel_boundary(lin: LinearizationData, K: int) -> ComplexArray:
    """K samples of ∂Δ as a closed polyline.

    Uses the same realization as ``lin``: the ordered critical orbit when a
    critical point was found on ∂Δ, otherwise ψ(ρ e^{2πik/K}).
    """
    if K < 64:
        raise ValueError(f"boundary needs at least 64 samples, got {K}")
    if K == len(lin.boundary) and lin.boundary_points:
        return lin.boundary
    if not lin.boundary_points:
        return lin.series.on_circle(lin.rho, K)
    return _realize_boundary(lin.map, lin.series, lin.rho, K, get_config().linearization.boundary_tol).boundary


def in_siegel_disk(lin: LinearizationData, z: complex) -> InteriorVerdict:
    """Inside iff ψ⁻¹(z) converges with |ψ⁻¹(z)| < ρ(1 - margin); NearBoundary in the band."""
    verdict, _ = lin.locate(z)
    return verdict


def phi_eval(lin: LinearizationData, z: complex) -> complex:
    """Normalized linearizing coordinate φ(z) = phi_rotation · ψ⁻¹(z)/ρ.

    Points in the boundary band map to the unit circle through the vertex
    angles of the boundary polyline.

    Raises:
        LinearizationError: If z is outside the linearization domain.
    """
    verdict, w = lin.locate(z)
    if verdict is InteriorVerdict.NEAR_BOUNDARY:
        return lin.boundary_phi(z)
    if verdict is InteriorVerdict.INSIDE:
        if w is None:
            wa, ok = lin.invert(complex(z))
            if not bool(ok):
                raise LinearizationError(f"outside linearization domain: Newton failed at {z}")
            w = complex(wa)
        return lin.phi_rotation * w / lin.rho
    raise LinearizationError(f"outside linearization domain: {z} is not in the closed Siegel disk")


def internal_ray(lin: LinearizationData, t: float, radii: ArrayLike) -> ComplexArray:
    """Points of the dynamical internal ray of angle t at the given |φ| values."""
    r = np.asarray(radii, dtype=np.float64)
    w = lin.rho * r * cmath.exp(2j * math.pi * t) / lin.phi_rotation
    return np.asarray(lin.series(w))


def canonical_parameter(c: complex) -> tuple[complex, bool]:
    """Representative of {c, 1/c} with |c| > 1 (or |c| = 1, Im c >= 0) and whether it was inverted."""
    c = complex(c)
    r = abs(c)
    if r < 1.0 or (r == 1.0 and c.imag < 0):
        return 1.0 / c, True
    return c, False


def boundary_critical_point(
    c: complex,
    tol: float | None = None,
    rotation: RotationNumber = GOLDEN,
    *,
    terms: int | None = None,
    samples: int | None = None,
) -> BoundaryCriticalVerdict:
    """Decide whether 1, c or both lie on ∂Δ_c.

    The computation runs on the representative with |c| >= 1 and is role
    swapped for |c| < 1, since z ↦ cz conjugates P_{1/c} to P_c. Linearization
    failures give an Unresolved verdict with the cause in ``diagnostics``.
    """
    if c == 0:
        raise ValueError("boundary verdict is undefined at c = 0")
    c = complex(c)
    rep, inverted = canonical_parameter(c)
    if inverted:
        return boundary_critical_point(rep, tol, rotation, terms=terms, samples=samples).swapped(c)
    tol = get_config().linearization.boundary_tol if tol is None else tol
    try:
        lin = build_linearization(CubicSiegelMap.p_c(c, rotation), terms=terms, samples=samples, boundary_tol=tol)
    except (LinearizationError, ArithmeticError) as exc:
        logger.warning("boundary verdict unresolved at c=%s: %s", c, exc)
        return BoundaryCriticalVerdict(BoundaryVerdict.UNRESOLVED, (math.nan, math.nan), c, str(exc))
    return verdict_from_linearization(lin, tol)


def verdict_from_linearization(lin: LinearizationData, tol: float | None = None) -> BoundaryCriticalVerdict:
    """Boundary verdict for a c-plane linearization that is already built."""
    tol = get_config().linearization.boundary_tol if tol is None else tol
    c = lin.map.parameter
    d1 = lin.distance_to_boundary(1.0 + 0j) / lin.diameter
    dc = lin.distance_to_boundary(c) / lin.diameter
    on_one = any(abs(p - 1.0) < 1e-12 for p in lin.boundary_points)
    on_c = any(abs(p - c) < 1e-12 for p in lin.boundary_points)
    if lin.boundary_points:
        on_one = on_one or d1 < tol
        on_c = on_c or dc < tol
        note = f"critical orbit, orbit radius {lin.orbit_radius:.6g}"
    else:
        on_one, on_c = d1 < tol, dc < tol
        note = "series circle"
        if not (on_one or on_c):
            on_one, on_c = d1 <= dc, dc < d1
            logger.debug("no critical point within tol at c=%s; taking the closer one", c)
    if on_one and on_c:
        verdict = BoundaryVerdict.BOTH
    elif on_one:
        verdict = BoundaryVerdict.ON_BOUNDARY_ONE
    else:
        verdict = BoundaryVerdict.ON_BOUNDARY_C
    return BoundaryCriticalVerdict(verdict, (float(d1), float(dc)), c, note)


def boundary_to_json(lin: LinearizationData) -> dict[str, Any]:
    """Boundary polyline as [re, im] pairs plus metadata."""
    p = lin.map.parameter
    return {
        lin.map.slice.value: [p.real, p.imag],
        "theta": str(lin.map.rotation),
        "theta_value": lin.map.rotation.value,
        "rho": lin.rho,
        "M": lin.terms,
        "K": len(lin.boundary),
        "source": lin.source,
        "diameter": lin.diameter,
        "boundary": [[z.real, z.imag] for z in lin.boundary],
    }
