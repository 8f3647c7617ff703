"""
cubic_siegel.render
-------------------

Tiled rendering of the c-plane, the a-plane and dynamical planes.

Every sample gets a class: capture components are cyan, attracted cycles
yellow, escaping orbits a smooth gradient and unresolved samples dark.
Dynamical planes shade the Siegel disk by level sets of |φ| and overlay its
boundary polyline.

Parameter planes use a vectorized classifier: an escape-only prepass on both
critical orbits, cycle detection, then the linearization series for the
remaining samples in one batch. ``RenderJob.exact`` switches to the scalar
:func:`~cubic_siegel.classify.classify_parameter_c` per sample.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np
from numpy.typing import NDArray
from PIL import Image, ImageDraw

from .classify import OrbitTag, ParamClass, classify_parameter_c
from .config import get_config
from .family import GOLDEN, CubicSiegelMap, MapSlice, RotationNumber
from .numerics import ComplexArray, FloatArray, circle_values, tail_radius
from .siegel import (
    LinearizationData,
    cached_linearization,
    multiplier_powers,
    point_in_polygon,
    series_batch,
    trusted_radius,
)
from .utils import detect_image_format, run_tasks, write_json

logger = logging.getLogger(__name__)

RGB = tuple[int, int, int]

# sample classes
ESCAPE, CAPTURE, CYCLE, UNRESOLVED, SIEGEL = range(5)
CLASS_NAMES = ("escape", "capture", "cycle", "unresolved", "siegel")

SUPERSAMPLING = (1, 2, 4)
MAX_RESOLUTION = 8192
MAX_PERIOD = 64
HISTORY = 128
PHI_BANDS = 8
DYNAMICAL_BOUNDARY_SAMPLES = 256
TINY = 1e-300


class Plane(str, Enum):
    """Which plane a job renders."""
    PARAM_C = "param-c"
    PARAM_A = "param-a"
    DYNAMICAL = "dyn"


# (center, width) containing the annulus 1/30 < |c| < 30 and its a-plane image
DEFAULT_WINDOWS: dict[Plane, tuple[complex, float]] = {
    Plane.PARAM_C: (0j, 64.0),
    Plane.PARAM_A: (0j, 10.0),
    Plane.DYNAMICAL: (0j, 4.0),
}


@dataclass(frozen=True)
class Palette:
    """Class colors; escape samples interpolate between the two escape ends."""
    capture: RGB = (0, 255, 255)
    cycle: RGB = (255, 255, 0)
    unresolved: RGB = (24, 24, 24)
    escape_fast: RGB = (10, 14, 48)
    escape_slow: RGB = (236, 240, 255)
    siegel_light: RGB = (150, 230, 150)
    siegel_dark: RGB = (90, 180, 110)
    overlay: RGB = (255, 0, 255)

    def colors(self, codes: NDArray[np.uint8], mu: FloatArray, phi_abs: FloatArray, budget: int) -> FloatArray:
        """RGB floats for every sample."""
        out = np.zeros(codes.shape + (3,), dtype=np.float64)
        out[codes == CAPTURE] = self.capture
        out[codes == CYCLE] = self.cycle
        out[codes == UNRESOLVED] = self.unresolved

        escape = codes == ESCAPE
        t = np.sqrt(np.clip(np.log1p(np.maximum(mu[escape], 0.0)) / math.log1p(budget), 0.0, 1.0))
        fast, slow = np.array(self.escape_fast, float), np.array(self.escape_slow, float)
        out[escape] = fast + t[:, None] * (slow - fast)

        siegel = codes == SIEGEL
        band = np.floor(phi_abs[siegel] * PHI_BANDS).astype(int) % 2
        out[siegel] = np.where(band[:, None] == 0, self.siegel_light, self.siegel_dark)
        return out


@dataclass(frozen=True)
class RenderJob:
    """What to render and with which budgets.

    ``width`` and ``height`` are in plane units; ``height`` defaults to the
    width scaled by the pixel aspect ratio. ``resolution`` is (columns, rows).
    """

    plane: Plane
    center: complex = 0j
    width: float = 64.0
    resolution: tuple[int, int] = (512, 512)
    height: float | None = None
    parameter: complex | None = None
    dynamical_slice: MapSlice = MapSlice.C_PLANE
    rotation: RotationNumber = GOLDEN
    max_iter: int | None = None
    series_terms: int | None = None
    boundary_samples: int | None = None
    supersample: int = 1
    palette: Palette = field(default_factory=Palette)
    overlay: bool = True
    exact: bool = False

    @classmethod
    def default(cls, plane: Plane, **kwargs: Any) -> RenderJob:
        center, width = DEFAULT_WINDOWS[plane]
        kwargs.setdefault("center", center)
        kwargs.setdefault("width", width)
        return cls(plane=plane, **kwargs)

    @property
    def columns(self) -> int:
        return self.resolution[0]

    @property
    def rows(self) -> int:
        return self.resolution[1]

    @property
    def window_height(self) -> float:
        return self.height if self.height is not None else self.width * self.rows / self.columns

    @property
    def budget(self) -> int:
        return get_config().render.max_iter if self.max_iter is None else self.max_iter

    def validate(self) -> None:
        """Raise ValueError for an unusable job."""
        if len(self.resolution) != 2 or min(self.resolution) < 1:
            raise ValueError(f"resolution must be at least 1x1, got {self.resolution}")
        if max(self.resolution) > MAX_RESOLUTION:
            raise ValueError(f"resolution {self.resolution} exceeds {MAX_RESOLUTION} pixels per axis")
        if not (self.width > 0 and math.isfinite(self.width)):
            raise ValueError(f"window width must be positive, got {self.width}")
        if self.height is not None and not (self.height > 0 and math.isfinite(self.height)):
            raise ValueError(f"window height must be positive, got {self.height}")
        if self.supersample not in SUPERSAMPLING:
            raise ValueError(f"supersampling must be one of {SUPERSAMPLING}, got {self.supersample}")
        if self.max_iter is not None and self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.plane is Plane.DYNAMICAL:
            if self.parameter is None:
                raise ValueError("dynamical plane needs a parameter")
            if self.dynamical_slice is MapSlice.C_PLANE and self.parameter == 0:
                raise ValueError("c-plane parameter must be nonzero")

    def sample_grid(self, row0: int, row1: int, col0: int, col1: int) -> ComplexArray:
        """Sample points of a pixel block, shape (rows, cols, s, s); row 0 is the top."""
        s = self.supersample
        sub = (np.arange(s) + 0.5) / s
        x = (np.arange(col0, col1)[:, None] + sub[None, :]) / self.columns - 0.5
        y = 0.5 - (np.arange(row0, row1)[:, None] + sub[None, :]) / self.rows
        re = self.center.real + x * self.width
        im = self.center.imag + y * self.window_height
        return re[None, :, None, :] + 1j * im[:, None, :, None]

    def to_plane(self, z: complex) -> tuple[float, float]:
        """Pixel coordinates (x, y) of a plane point, pixel centers at integers."""
        x = ((z.real - self.center.real) / self.width + 0.5) * self.columns - 0.5
        y = (0.5 - (z.imag - self.center.imag) / self.window_height) * self.rows - 0.5
        return x, y

    def to_dict(self) -> dict[str, Any]:
        return {
            "plane": self.plane.value,
            "center": [self.center.real, self.center.imag],
            "width": self.width,
            "height": self.window_height,
            "resolution": list(self.resolution),
            "parameter": None if self.parameter is None else [self.parameter.real, self.parameter.imag],
            "slice": self.dynamical_slice.value,
            "theta": str(self.rotation),
            "max_iter": self.budget,
            "series_terms": self.series_terms,
            "boundary_samples": self.boundary_samples,
            "supersample": self.supersample,
            "exact": self.exact,
            "palette": asdict(self.palette),
        }


@dataclass(frozen=True, eq=False)
class ImageBuffer:
    """RGB8 pixels (rows, columns, 3) plus the per-class sample histogram."""

    width: int
    height: int
    pixels: NDArray[np.uint8]
    histogram: dict[str, int]
    samples: int = 1

    def __post_init__(self) -> None:
        if self.pixels.shape != (self.height, self.width, 3) or self.pixels.dtype != np.uint8:
            raise ValueError(f"pixels must be uint8 of shape ({self.height}, {self.width}, 3)")
        total = sum(self.histogram.values())
        if self.histogram and total != self.width * self.height * self.samples:
            raise ValueError(f"histogram counts {total} samples, expected {self.width * self.height * self.samples}")

    @classmethod
    def filled(cls, width: int, height: int, color: RGB) -> ImageBuffer:
        pixels = np.empty((height, width, 3), dtype=np.uint8)
        pixels[:] = color
        return cls(width, height, pixels, {})

    def fractions(self) -> dict[str, float]:
        total = sum(self.histogram.values())
        return {k: v / total for k, v in self.histogram.items()} if total else {}

    def pixel(self, x: int, y: int) -> RGB:
        r, g, b = (int(v) for v in self.pixels[y, x])
        return r, g, b


# ---------------------------------------------------------------------------
# Vectorized orbit kernels
# ---------------------------------------------------------------------------

def _step(z: ComplexArray, lam: complex, quad: ComplexArray, cubic: ComplexArray) -> ComplexArray:
    return z * (lam + z * (quad + cubic * z))


def _escape_orbits(
    z0: ComplexArray,
    lam: complex,
    quad: ComplexArray,
    cubic: ComplexArray,
    steps: int,
    radius: float,
    keep: int,
) -> tuple[ComplexArray, NDArray[np.int64], FloatArray, ComplexArray]:
    """Iterate until |z| > radius; returns final z, escape step (0 = bounded), smooth count, first ``keep`` points."""
    count = len(z0)
    final = np.array(z0, dtype=np.complex128)
    escape = np.zeros(count, dtype=np.int64)
    mu = np.zeros(count)
    history = np.full((count, keep), np.nan, dtype=np.complex128)
    active = np.arange(count)
    z = final.copy()
    with np.errstate(all="ignore"):
        for step in range(1, steps + 1):
            if step <= keep:
                history[active, step - 1] = z
            z = _step(z, lam, quad[active], cubic[active])
            mag = np.abs(z)
            out = ~(mag <= radius)
            if out.any():
                idx = active[out]
                escape[idx] = step
                m = mag[out]
                smooth = step + 1.0 - np.log(np.log(m)) / math.log(3.0)
                mu[idx] = np.where(np.isfinite(smooth), smooth, step)
                final[idx] = z[out]
                active, z = active[~out], z[~out]
                if active.size == 0:
                    break
    final[active] = z
    return final, escape, mu, history


def _cycle_periods(
    z: ComplexArray, lam: complex, quad: ComplexArray, cubic: ComplexArray, tol: float, modulus: float
) -> NDArray[np.int64]:
    """Smallest p <= 64 with |P^p(z) - z| < tol and an attracting multiplier, else 0."""
    period = np.zeros(len(z), dtype=np.int64)
    w = z.copy()
    product = np.ones(len(z), dtype=np.complex128)
    with np.errstate(all="ignore"):
        for p in range(1, MAX_PERIOD + 1):
            product *= lam + w * (2.0 * quad + 3.0 * cubic * w)
            w = _step(w, lam, quad, cubic)
            hit = (period == 0) & (np.abs(w - z) < tol) & (np.abs(product) < modulus)
            period[hit] = p
    return period


def _inside_rows(vertices: ComplexArray, z: ComplexArray) -> NDArray[np.bool_]:
    """Even-odd membership of z[i] in the polygon vertices[i]."""
    start = vertices
    end = np.roll(vertices, -1, axis=1)
    x, y = z.real[:, None], z.imag[:, None]
    straddles = (start.imag > y) != (end.imag > y)
    with np.errstate(invalid="ignore", divide="ignore"):
        x_cross = start.real + (y - start.imag) * (end.real - start.real) / (end.imag - start.imag)
    return np.count_nonzero(straddles & (x < x_cross), axis=1) % 2 == 1


def _capture_steps(
    z0: ComplexArray,
    lam: complex,
    quad: ComplexArray,
    cubic: ComplexArray,
    curves: ComplexArray,
    r_in: FloatArray,
    r_out: FloatArray,
    steps: int,
) -> NDArray[np.bool_]:
    """Whether each orbit enters the region bounded by its inner curve within ``steps``."""
    captured = np.zeros(len(z0), dtype=bool)
    active = np.arange(len(z0))
    z = np.array(z0, dtype=np.complex128)
    with np.errstate(all="ignore"):
        for _ in range(steps + 1):
            mag = np.abs(z)
            inside = mag < r_in[active]
            maybe = np.flatnonzero(~inside & (mag <= r_out[active]))
            if maybe.size:
                inside[maybe] = _inside_rows(curves[active[maybe]], z[maybe])
            captured[active[inside]] = True
            keep = ~inside & np.isfinite(z)
            active, z = active[keep], z[keep]
            if active.size == 0:
                break
            z = _step(z, lam, quad[active], cubic[active])
    return captured


def _birkhoff(history: ComplexArray) -> FloatArray:
    with np.errstate(all="ignore"):
        logs = np.log(np.maximum(np.abs(history), TINY))
    return np.exp(np.nanmean(logs, axis=1))


def canonical_parameters(c: ComplexArray) -> ComplexArray:
    """Representative of {c, 1/c} with |c| >= 1, elementwise."""
    r = np.abs(c)
    flip = (r < 1.0) | ((r == 1.0) & (c.imag < 0))
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(flip, 1.0 / c, c)


def a_to_c_batch(a: ComplexArray, rotation: RotationNumber = GOLDEN) -> ComplexArray:
    """Branch with |c| >= 1 of η(c) = a², elementwise."""
    lam = rotation.multiplier
    lead = 3.0 * lam
    mid = 6.0 * lam - 4.0 * a * a
    sq = np.sqrt(mid * mid - 4.0 * lead * lead)
    r1 = (-mid + sq) / (2.0 * lead)
    r2 = (-mid - sq) / (2.0 * lead)
    return np.where(np.abs(r1) >= np.abs(r2), r1, r2)


def classify_parameter_batch(
    c: ComplexArray,
    rotation: RotationNumber = GOLDEN,
    max_iter: int | None = None,
    *,
    terms: int | None = None,
    samples: int | None = None,
) -> tuple[NDArray[np.uint8], FloatArray]:
    """Class codes and smooth escape counts for many c-plane parameters.

    Escape of either critical orbit wins, then an attracting cycle of either
    orbit. For the rest the orbit with the larger Birkhoff radius is taken as
    the boundary orbit and the other one is tested for capture against the
    curve ψ(ρ(1 - 2·margin)e^{2πit}).
    """
    cfg = get_config()
    steps = cfg.render.max_iter if max_iter is None else max_iter
    terms = cfg.render.series_terms if terms is None else terms
    samples = cfg.render.boundary_samples if samples is None else samples
    lcfg, ocfg = cfg.linearization, cfg.orbit

    c = canonical_parameters(np.asarray(c, dtype=np.complex128).ravel())
    count = len(c)
    codes = np.full(count, UNRESOLVED, dtype=np.uint8)
    mu = np.zeros(count)
    valid = np.isfinite(c) & (c != 0)
    if not valid.any():
        return codes, mu
    lam = rotation.multiplier
    with np.errstate(all="ignore"):
        quad = np.where(valid, -lam * (1.0 + 1.0 / c) / 2.0, 0.0)
        cubic = np.where(valid, lam / (3.0 * c), 0.0)
    keep = min(HISTORY, steps)

    z1, e1, mu1, h1 = _escape_orbits(np.ones(count, dtype=np.complex128), lam, quad, cubic, steps, ocfg.escape_radius, keep)
    zc, ec, muc, hc = _escape_orbits(np.where(valid, c, 0.0), lam, quad, cubic, steps, ocfg.escape_radius, keep)
    escaped = valid & ((e1 > 0) | (ec > 0))
    first_one = (e1 > 0) & ((ec == 0) | (e1 <= ec))
    codes[escaped] = ESCAPE
    mu[escaped] = np.where(first_one, mu1, muc)[escaped]

    bounded = np.flatnonzero(valid & ~escaped)
    for z_final in (z1, zc):
        if bounded.size == 0:
            break
        period = _cycle_periods(z_final[bounded], lam, quad[bounded], cubic[bounded], ocfg.cycle_tol, ocfg.cycle_modulus)
        codes[bounded[period > 0]] = CYCLE
        bounded = bounded[period == 0]
    if bounded.size == 0:
        return codes, mu

    coeffs = series_batch(quad[bounded], cubic[bounded], rotation, terms)
    rho0 = tail_radius(coeffs) * lcfg.safety
    rho = trusted_radius(
        coeffs, multiplier_powers(rotation, terms + 1), lam, quad[bounded], cubic[bounded], rho0, lcfg.boundary_residual
    )
    usable = rho > 0
    rest, coeffs, rho = bounded[usable], coeffs[usable], rho[usable]
    if rest.size == 0:
        return codes, mu
    curves = circle_values(coeffs, rho * (1.0 - 2.0 * lcfg.margin), samples)
    mags = np.abs(curves)
    r_in, r_out = 0.98 * mags.min(axis=1), mags.max(axis=1)
    free_is_c = _birkhoff(h1[rest]) >= _birkhoff(hc[rest])
    start = np.where(free_is_c, c[rest], 1.0 + 0j)
    captured = _capture_steps(start, lam, quad[rest], cubic[rest], curves, r_in, r_out, steps)
    codes[rest[captured]] = CAPTURE
    return codes, mu


def _code_of(result: ParamClass) -> tuple[int, float]:
    if result.captured:
        return CAPTURE, 0.0
    for orbit in (result.free_orbit, result.other_orbit):
        if orbit.tag is OrbitTag.ESCAPE:
            return ESCAPE, float(orbit.step or 0)
    if OrbitTag.CYCLE in (result.free_orbit.tag, result.other_orbit.tag):
        return CYCLE, 0.0
    return UNRESOLVED, 0.0


def _classify_exact(job: RenderJob, points: ComplexArray) -> tuple[NDArray[np.uint8], FloatArray]:
    codes = np.empty(len(points), dtype=np.uint8)
    mu = np.zeros(len(points))
    samples = job.boundary_samples if job.boundary_samples and job.boundary_samples >= 64 else None
    # a-plane points arrive already mapped to their c-plane branch
    for i, p in enumerate(points):
        p = complex(p)
        if p == 0 or not cmath.isfinite(p):
            codes[i] = UNRESOLVED
            continue
        codes[i], mu[i] = _code_of(classify_parameter_c(p, job.budget, job.rotation, samples=samples))
    return codes, mu


# ---------------------------------------------------------------------------
# Tiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Tile:
    row0: int
    row1: int
    col0: int
    col1: int


@dataclass(frozen=True, eq=False)
class _TileResult:
    tile: _Tile
    codes: NDArray[np.uint8]
    mu: FloatArray
    phi: FloatArray


def _tiles(job: RenderJob, size: int) -> list[_Tile]:
    return [
        _Tile(r, min(r + size, job.rows), c, min(c + size, job.columns))
        for r in range(0, job.rows, size)
        for c in range(0, job.columns, size)
    ]


def _coarse_axis(length: int, step: int) -> list[int]:
    return sorted(set(range(0, length, step)) | {length - 1})


def _param_tile(job: RenderJob, tile: _Tile) -> _TileResult:
    grid = job.sample_grid(tile.row0, tile.row1, tile.col0, tile.col1)
    shape = grid.shape
    if job.plane is Plane.PARAM_A:
        grid = a_to_c_batch(grid, job.rotation)

    def classify(points: ComplexArray) -> tuple[NDArray[np.uint8], FloatArray]:
        if job.exact:
            return _classify_exact(job, points)
        return classify_parameter_batch(
            points, job.rotation, job.budget, terms=job.series_terms, samples=job.boundary_samples
        )

    step = get_config().render.coarse_step
    rows, cols = shape[0], shape[1]
    if job.exact or job.supersample > 1 or step <= 1 or min(rows, cols) <= step:
        codes, mu = classify(grid.ravel())
        return _TileResult(tile, codes.reshape(shape), mu.reshape(shape), np.zeros(shape))

    # coarse pass on a lattice, refinement inside blocks whose corners disagree
    flat = grid[:, :, 0, 0]
    codes = np.full((rows, cols), UNRESOLVED, dtype=np.uint8)
    mu = np.zeros((rows, cols))
    known = np.zeros((rows, cols), dtype=bool)
    r_idx, c_idx = _coarse_axis(rows, step), _coarse_axis(cols, step)
    lattice = np.ix_(r_idx, c_idx)
    coarse_codes, coarse_mu = classify(flat[lattice].ravel())
    codes[lattice] = coarse_codes.reshape(len(r_idx), len(c_idx))
    mu[lattice] = coarse_mu.reshape(len(r_idx), len(c_idx))
    known[lattice] = True
    for a in range(len(r_idx) - 1):
        for b in range(len(c_idx) - 1):
            r0, r1, c0, c1 = r_idx[a], r_idx[a + 1], c_idx[b], c_idx[b + 1]
            corners = {codes[r0, c0], codes[r0, c1], codes[r1, c0], codes[r1, c1]}
            if len(corners) == 1 and ESCAPE not in corners:
                codes[r0 : r1 + 1, c0 : c1 + 1] = corners.pop()
                known[r0 : r1 + 1, c0 : c1 + 1] = True
    todo = ~known
    if todo.any():
        fine_codes, fine_mu = classify(flat[todo])
        codes[todo] = fine_codes
        mu[todo] = fine_mu
    return _TileResult(tile, codes.reshape(shape), mu.reshape(shape), np.zeros(shape))


def classify_dynamical_batch(
    lin: LinearizationData, z: ComplexArray, max_iter: int, curve: ComplexArray
) -> tuple[NDArray[np.uint8], FloatArray, FloatArray]:
    """Class codes, smooth escape counts and |φ| for dynamical-plane points.

    Points of Δ itself are Siegel samples shaded by |φ|; points whose orbit
    enters the inner curve later are capture samples.
    """
    cfg = get_config()
    z = np.asarray(z, dtype=np.complex128).ravel()
    count = len(z)
    codes = np.full(count, UNRESOLVED, dtype=np.uint8)
    mu = np.zeros(count)
    phi = np.zeros(count)
    lam, quad, cubic = lin.map.coefficients
    quad_v = np.full(count, quad, dtype=np.complex128)
    cubic_v = np.full(count, cubic, dtype=np.complex128)

    near = np.flatnonzero(np.abs(z) <= lin.outer_radius)
    if near.size:
        w, ok = lin.invert(z[near])
        inside = ok & (np.abs(w) < lin.rho * (1.0 - lin.margin)) & point_in_polygon(lin.boundary, z[near])
        codes[near[inside]] = SIEGEL
        phi[near[inside]] = np.abs(w[inside]) / lin.rho

    rest = np.flatnonzero(codes != SIEGEL)
    if rest.size == 0:
        return codes, mu, phi
    final, escape, smooth, _ = _escape_orbits(
        z[rest], lam, quad_v[rest], cubic_v[rest], max_iter, cfg.orbit.escape_radius, 1
    )
    codes[rest[escape > 0]] = ESCAPE
    mu[rest[escape > 0]] = smooth[escape > 0]

    bounded = escape == 0
    rest, final = rest[bounded], final[bounded]
    if rest.size == 0:
        return codes, mu, phi
    mags = np.abs(curve)
    r_in = np.full(rest.size, 0.98 * mags.min())
    r_out = np.full(rest.size, mags.max())
    curves = np.broadcast_to(curve, (rest.size, len(curve)))
    captured = _capture_steps(z[rest], lam, quad_v[rest], cubic_v[rest], curves, r_in, r_out, max_iter)
    codes[rest[captured]] = CAPTURE

    rest, final = rest[~captured], final[~captured]
    if rest.size:
        period = _cycle_periods(final, lam, quad_v[rest], cubic_v[rest], cfg.orbit.cycle_tol, cfg.orbit.cycle_modulus)
        codes[rest[period > 0]] = CYCLE
    return codes, mu, phi


def _dynamical_tile(job: RenderJob, lin: LinearizationData, curve: ComplexArray, tile: _Tile) -> _TileResult:
    grid = job.sample_grid(tile.row0, tile.row1, tile.col0, tile.col1)
    codes, mu, phi = classify_dynamical_batch(lin, grid, job.budget, curve)
    return _TileResult(tile, codes.reshape(grid.shape), mu.reshape(grid.shape), phi.reshape(grid.shape))


def _assemble(job: RenderJob, results: list[_TileResult]) -> ImageBuffer:
    s = job.supersample
    pixels = np.zeros((job.rows, job.columns, 3), dtype=np.uint8)
    counts = np.zeros(len(CLASS_NAMES), dtype=np.int64)
    for result in results:
        t = result.tile
        colors = job.palette.colors(result.codes, result.mu, result.phi, job.budget)
        pixels[t.row0 : t.row1, t.col0 : t.col1] = np.rint(colors.mean(axis=(2, 3))).astype(np.uint8)
        counts += np.bincount(result.codes.ravel(), minlength=len(CLASS_NAMES))
    histogram = {name: int(n) for name, n in zip(CLASS_NAMES, counts)}
    return ImageBuffer(job.columns, job.rows, pixels, histogram, s * s)


def render_parameter_plane(job: RenderJob, *, threads: int | None = None) -> ImageBuffer:
    """Render the c-plane or the a-plane.

    a-plane samples are classified at the single branch of a ↦ c with
    |c| >= 1 (:func:`a_to_c_batch`). The other branch is 1/c, whose map is
    conjugate, so the class is the same up to the c ↦ 1/c symmetry.

    Raises:
        ValueError: For an invalid job or a non-parameter plane.
    """
    job.validate()
    if job.plane is Plane.DYNAMICAL:
        raise ValueError("render_parameter_plane needs a param-c or param-a job")
    cfg = get_config().render
    workers = cfg.threads if threads is None else threads
    tiles = _tiles(job, cfg.tile_size)
    results = run_tasks(lambda tile: _param_tile(job, tile), tiles, workers)
    buf = _assemble(job, results)
    logger.info("rendered %s %dx%d on %d threads: %s", job.plane.value, job.columns, job.rows, workers, buf.histogram)
    return buf


def _overlay(job: RenderJob, buf: ImageBuffer, lin: LinearizationData) -> ImageBuffer:
    image = Image.fromarray(buf.pixels)
    draw = ImageDraw.Draw(image)
    points = [job.to_plane(complex(z)) for z in lin.boundary]
    draw.line(points + points[:1], fill=job.palette.overlay, width=1)
    for z in lin.boundary_points:
        x, y = job.to_plane(complex(z))
        draw.point((round(x), round(y)), fill=job.palette.overlay)
    return ImageBuffer(buf.width, buf.height, np.asarray(image, dtype=np.uint8).copy(), buf.histogram, buf.samples)


def render_dynamical_plane(job: RenderJob, *, threads: int | None = None) -> ImageBuffer:
    """Render the dynamical plane of P_c or f_a with the Siegel boundary overlaid.

    Raises:
        ValueError: For an invalid job or a parameter plane.
        LinearizationError: If the map cannot be linearized.
    """
    job.validate()
    if job.plane is not Plane.DYNAMICAL or job.parameter is None:
        raise ValueError("render_dynamical_plane needs a dyn job with a parameter")
    cfg = get_config()
    workers = cfg.render.threads if threads is None else threads
    if job.dynamical_slice is MapSlice.C_PLANE:
        map = CubicSiegelMap.p_c(job.parameter, job.rotation)
    else:
        map = CubicSiegelMap.f_a(job.parameter, job.rotation)
    lin = cached_linearization(map, job.series_terms, job.boundary_samples)
    curve = lin.series.on_circle(lin.rho * (1.0 - 2.0 * lin.margin), DYNAMICAL_BOUNDARY_SAMPLES)
    tiles = _tiles(job, cfg.render.tile_size)
    results = run_tasks(lambda tile: _dynamical_tile(job, lin, curve, tile), tiles, workers)
    buf = _assemble(job, results)
    if job.overlay:
        buf = _overlay(job, buf, lin)
    logger.info("rendered dyn %s=%s %dx%d: %s", map.slice.value, map.parameter, job.columns, job.rows, buf.histogram)
    return buf


def render(job: RenderJob, *, threads: int | None = None) -> ImageBuffer:
    if job.plane is Plane.DYNAMICAL:
        return render_dynamical_plane(job, threads=threads)
    return render_parameter_plane(job, threads=threads)


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def ppm_bytes(buf: ImageBuffer) -> bytes:
    """Binary P6, maxval 255, rows top to bottom."""
    header = f"P6\n{buf.width} {buf.height}\n255\n".encode("ascii")
    return header + np.ascontiguousarray(buf.pixels).tobytes()


def write_image(buf: ImageBuffer, path: Path | str, format: str | None = None) -> Path:
    """Write PPM (P6) or PNG; the format defaults to the file suffix.

    Raises:
        ValueError: For an unknown format.
        OSError: On write failure, with the path in the message.
    """
    path = Path(path)
    fmt = (format or path.suffix.lstrip(".")).lower()
    if fmt not in ("ppm", "png"):
        raise ValueError(f"Unknown image format {fmt!r}; use ppm or png")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        if fmt == "ppm":
            path.write_bytes(ppm_bytes(buf))
        else:
            Image.fromarray(buf.pixels).save(path, format="PNG")
    except OSError as e:
        raise OSError(f"Cannot write image {path}: {e.strerror or e}") from e
    logger.info("wrote %s (%dx%d %s)", path, buf.width, buf.height, fmt)
    return path


def _ppm_tokens(data: bytes, count: int) -> tuple[list[int], int]:
    tokens: list[int] = []
    pos = 2
    while len(tokens) < count:
        while data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        end = pos
        while end < len(data) and data[end : end + 1].isdigit():
            end += 1
        if end == pos:
            raise ValueError("malformed PPM header")
        tokens.append(int(data[pos:end]))
        pos = end
    return tokens, pos + 1


def read_ppm(path: Path | str) -> ImageBuffer:
    """Read a binary P6 file written by :func:`write_image`."""
    data = Path(path).read_bytes()
    if detect_image_format(data) != "ppm":
        raise ValueError(f"{path} is not a binary PPM file")
    (width, height, maxval), offset = _ppm_tokens(data, 3)
    if maxval != 255:
        raise ValueError(f"unsupported PPM maxval {maxval}")
    body = np.frombuffer(data, dtype=np.uint8, count=width * height * 3, offset=offset)
    return ImageBuffer(width, height, body.reshape(height, width, 3).copy(), {})


def write_sidecar(job: RenderJob, buf: ImageBuffer, path: Path | str, *, threads: int | None = None) -> Path:
    """JSON next to an image: job parameters, class histogram and thread count."""
    payload = job.to_dict()
    payload["histogram"] = buf.histogram
    payload["samples_per_pixel"] = buf.samples
    payload["threads"] = get_config().render.threads if threads is None else threads
    return write_json(path, payload)


def rotate(buf: ImageBuffer, quarter_turns: int) -> ImageBuffer:
    """Rotate counterclockwise by a multiple of 90 degrees."""
    pixels = np.ascontiguousarray(np.rot90(buf.pixels, quarter_turns % 4))
    height, width = pixels.shape[:2]
    return ImageBuffer(width, height, pixels, buf.histogram, buf.samples)
