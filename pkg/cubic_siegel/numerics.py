"""
cubic_siegel.numerics
---------------------

Dense complex polynomials, truncated power series and a simultaneous-iteration
polynomial root finder.

Scalars are Python ``complex`` values (binary64 pairs); coefficient storage is
``numpy.complex128``. Everything here is a pure function of immutable inputs,
so it is safe to share across threads.
"""

from __future__ import annotations

import cmath
import logging
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .config import get_config

logger = logging.getLogger(__name__)

ComplexArray = NDArray[np.complex128]
FloatArray = NDArray[np.float64]

# Veltkamp splitter for binary64 (2**27 + 1)
_SPLITTER = 134217729.0

MIN_SERIES_ORDER = 32
STALL_SWEEPS = 5
ROUNDING_FLOOR_FACTOR = 4.0


class NumericsError(ArithmeticError):
    """Raised when an evaluation leaves the finite binary64 range or a series is unusable."""


class RootFindingError(RuntimeError):
    """Raised when simultaneous iteration stalls; ``indices`` names the stagnating roots."""

    def __init__(self, message: str, indices: Sequence[int]) -> None:
        super().__init__(message)
        self.indices = tuple(int(i) for i in indices)


def _normalized(values: ArrayLike) -> ComplexArray:
    arr = np.atleast_1d(np.array(values, dtype=np.complex128))
    if arr.ndim != 1:
        raise ValueError("coefficients must be a one-dimensional sequence")
    if not np.all(np.isfinite(arr)):
        raise NumericsError("polynomial coefficients must be finite")
    nonzero = np.flatnonzero(arr)
    arr = arr[: nonzero[-1] + 1] if nonzero.size else arr[:0]
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ComplexPolynomial:
    """Polynomial with complex coefficients in ascending powers.

    The trailing coefficient is nonzero after normalization; the zero
    polynomial has an empty coefficient array and degree -1.
    """

    coeffs: ComplexArray

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", _normalized(self.coeffs))

    @classmethod
    def zero(cls) -> ComplexPolynomial:
        return cls(np.zeros(0, dtype=np.complex128))

    @classmethod
    def from_roots(cls, roots: Sequence[complex]) -> ComplexPolynomial:
        """Monic polynomial vanishing at ``roots``."""
        result = cls([1.0])
        for r in roots:
            result = result * cls([-r, 1.0])
        return result

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return len(self.coeffs) == 0

    def __call__(self, z: complex) -> complex:
        return poly_eval(self, z)

    def __add__(self, other: ComplexPolynomial) -> ComplexPolynomial:
        return poly_arith(self, other, "add")

    def __sub__(self, other: ComplexPolynomial) -> ComplexPolynomial:
        return poly_arith(self, other.scale(-1.0), "add")

    def __mul__(self, other: ComplexPolynomial) -> ComplexPolynomial:
        return poly_arith(self, other, "multiply")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ComplexPolynomial):
            return NotImplemented
        return bool(np.array_equal(self.coeffs, other.coeffs))

    def __hash__(self) -> int:
        return hash(self.coeffs.tobytes())

    def scale(self, k: complex) -> ComplexPolynomial:
        return poly_arith(self, None, "scale", k)

    def derivative(self) -> ComplexPolynomial:
        if self.degree < 1:
            return ComplexPolynomial.zero()
        return ComplexPolynomial(self.coeffs[1:] * np.arange(1, len(self.coeffs)))

    def evaluate_many(self, zs: ArrayLike) -> ComplexArray:
        """Vectorized Horner evaluation at every point of ``zs``."""
        z = np.asarray(zs, dtype=np.complex128)
        acc = np.zeros_like(z)
        for a in self.coeffs[::-1]:
            acc = acc * z + a
        return acc


def _two_sum(a: float, b: float) -> tuple[float, float]:
    s = a + b
    bv = s - a
    av = s - bv
    return s, (a - av) + (b - bv)


def _split(a: float) -> tuple[float, float]:
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _two_product(a: float, b: float) -> tuple[float, float]:
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, al * bl - (((p - ah * bh) - al * bh) - ah * bl)


def _complex_two_product(x: complex, y: complex) -> tuple[complex, complex]:
    p1, e1 = _two_product(x.real, y.real)
    p2, e2 = _two_product(-x.imag, y.imag)
    p3, e3 = _two_product(x.real, y.imag)
    p4, e4 = _two_product(x.imag, y.real)
    re, f = _two_sum(p1, p2)
    im, g = _two_sum(p3, p4)
    return complex(re, im), complex(e1 + e2 + f, e3 + e4 + g)


def _complex_two_sum(x: complex, y: complex) -> tuple[complex, complex]:
    re, f = _two_sum(x.real, y.real)
    im, g = _two_sum(x.imag, y.imag)
    return complex(re, im), complex(f, g)


def _horner(coeffs: ComplexArray, z: complex) -> complex:
    acc = 0j
    for a in coeffs[::-1]:
        acc = acc * z + complex(a)
    return acc


def _horner_compensated(coeffs: ComplexArray, z: complex) -> complex:
    """Horner with error-free transformations; the running error is folded back at the end."""
    if len(coeffs) == 0:
        return 0j
    acc = complex(coeffs[-1])
    err = 0j
    for a in coeffs[-2::-1]:
        prod, pe = _complex_two_product(acc, z)
        acc, se = _complex_two_sum(prod, complex(a))
        err = err * z + (pe + se)
    return acc + err


def poly_eval(p: ComplexPolynomial, z: complex, *, compensated: bool | None = None) -> complex:
    """Evaluate ``p`` at ``z`` by Horner's rule.

    Args:
        p: Normalized polynomial.
        z: Evaluation point.
        compensated: Force the compensated scheme on or off. ``None`` enables it
            above the configured degree threshold.

    Returns:
        p(z); exactly the constant for degree 0.

    Raises:
        NumericsError: If the value is not finite.
    """
    if p.is_zero:
        return 0j
    z = complex(z)
    if compensated is None:
        compensated = p.degree > get_config().roots.compensated_degree
    value = _horner_compensated(p.coeffs, z) if compensated else _horner(p.coeffs, z)
    if not cmath.isfinite(value):
        raise NumericsError(f"non-finite value evaluating a degree-{p.degree} polynomial at {z}")
    return value


def poly_arith(
    p: ComplexPolynomial,
    q: ComplexPolynomial | None,
    op: Literal["add", "multiply", "scale"],
    k: complex | None = None,
) -> ComplexPolynomial:
    """Add or multiply two polynomials, or scale ``p`` by ``k``."""
    if op == "add":
        if q is None:
            raise ValueError("add needs a second polynomial")
        n = max(len(p.coeffs), len(q.coeffs))
        total = np.zeros(n, dtype=np.complex128)
        total[: len(p.coeffs)] += p.coeffs
        total[: len(q.coeffs)] += q.coeffs
        return ComplexPolynomial(total)
    if op == "multiply":
        if q is None:
            raise ValueError("multiply needs a second polynomial")
        if p.is_zero or q.is_zero:
            return ComplexPolynomial.zero()
        return ComplexPolynomial(np.convolve(p.coeffs, q.coeffs))
    if op == "scale":
        if k is None:
            raise ValueError("scale needs a factor k")
        return ComplexPolynomial(p.coeffs * complex(k))
    raise ValueError(f"Unknown polynomial operation: {op}")


def circle_values(coeffs: ArrayLike, radius: ArrayLike, count: int) -> ComplexArray:
    """Values of sum_n coeffs[..., n] w^n at w = radius * e^{2 pi i k / count}.

    Leading axes of ``coeffs`` are batch axes and ``radius`` broadcasts against
    them. Powers beyond ``count`` are folded onto their residues, which is exact
    for equally spaced samples.
    """
    c = np.asarray(coeffs, dtype=np.complex128)
    r = np.asarray(radius, dtype=np.float64)[..., None]
    n = np.arange(c.shape[-1])
    weighted = c * r ** n
    pad = (-weighted.shape[-1]) % count
    if pad:
        weighted = np.concatenate(
            [weighted, np.zeros(weighted.shape[:-1] + (pad,), dtype=np.complex128)], axis=-1
        )
    folded = weighted.reshape(weighted.shape[:-1] + (-1, count)).sum(axis=-2)
    return np.fft.ifft(folded, axis=-1) * count


def _powers(w: ArrayLike, order: int) -> ComplexArray:
    z = np.asarray(w, dtype=np.complex128)
    return np.cumprod(np.broadcast_to(z[..., None], z.shape + (order,)), axis=-1)


@dataclass(frozen=True, eq=False)
class PowerSeries:
    """Truncated series a_1 w + a_2 w^2 + ... + a_M w^M.

    ``coeffs[n]`` holds a_n and ``coeffs[0]`` is always zero, so the array is
    directly usable as an ascending coefficient vector.
    """

    coeffs: ComplexArray

    def __post_init__(self) -> None:
        arr = np.array(self.coeffs, dtype=np.complex128)
        if arr.ndim != 1 or len(arr) < 2:
            raise ValueError("series needs at least one term")
        if arr[0] != 0:
            raise ValueError("series must have zero constant term")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @classmethod
    def from_terms(cls, terms: ArrayLike) -> PowerSeries:
        """Build from a_1..a_M."""
        return cls(np.concatenate([[0.0], np.asarray(terms, dtype=np.complex128)]))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def terms(self) -> ComplexArray:
        return self.coeffs[1:]

    def __call__(self, w: ArrayLike) -> ComplexArray:
        return _powers(w, self.order) @ self.terms

    def derivative(self, w: ArrayLike) -> ComplexArray:
        z = np.asarray(w, dtype=np.complex128)
        dcoeffs = self.terms * np.arange(1, self.order + 1)
        if self.order == 1:
            return np.broadcast_to(dcoeffs[0], z.shape).copy()
        lower = _powers(z, self.order - 1) @ dcoeffs[1:]
        return lower + dcoeffs[0]

    def on_circle(self, radius: float, count: int) -> ComplexArray:
        return circle_values(self.coeffs, radius, count)

    def rotated(self, u: complex) -> PowerSeries:
        """Series of w -> s(u w): a_n becomes a_n u^n."""
        return PowerSeries(self.coeffs * complex(u) ** np.arange(len(self.coeffs)))


def _window_estimates(coeffs: ArrayLike, tail_fraction: float, windows: int) -> tuple[FloatArray, FloatArray]:
    """Per-window min |a_n|^{-1/n} over the tail, plus the tail magnitudes."""
    c = np.asarray(coeffs, dtype=np.complex128)
    order = c.shape[-1] - 1
    length = max(int(order * tail_fraction), 8)
    start = order - length + 1
    mags = np.abs(c[..., start:])
    n = np.arange(start, order + 1)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        inverse_roots = np.exp(-np.log(mags) / n)
    chunks = np.array_split(np.arange(length), windows)
    estimates = np.stack([inverse_roots[..., idx].min(axis=-1) for idx in chunks], axis=-1)
    return estimates, mags


def tail_radius(coeffs: ArrayLike, *, tail_fraction: float = 0.25, windows: int = 4) -> FloatArray:
    """Batched 1/limsup |a_n|^{1/n} over the last axis of ``coeffs``.

    Non-finite or all-zero tails give 0.
    """
    estimates, mags = _window_estimates(coeffs, tail_fraction, windows)
    radius = estimates.min(axis=-1)
    valid = np.all(np.isfinite(mags), axis=-1) & np.any(mags > 0, axis=-1)
    return np.where(valid & np.isfinite(radius), radius, 0.0)


def radius_of_convergence(
    s: PowerSeries, *, tail_fraction: float = 0.25, windows: int = 4
) -> float:
    """Estimate 1/limsup |a_n|^{1/n} from the tail of the series.

    The tail (last quarter by default) is split into windows; each window
    contributes min |a_n|^{-1/n} over its terms and the smallest window value
    is reported. The spread between windows is logged as a convergence hint.

    Raises:
        ValueError: If the series has fewer than 32 terms.
        NumericsError: If every tail coefficient vanishes or any is non-finite.
    """
    order = s.order
    if order < MIN_SERIES_ORDER:
        raise ValueError(f"series needs at least {MIN_SERIES_ORDER} terms, got {order}")
    length = max(int(order * tail_fraction), 8)
    mags = np.abs(s.coeffs[order - length + 1 :])
    if not np.all(np.isfinite(mags)):
        raise NumericsError("series has non-finite coefficients")
    if not np.any(mags > 0):
        raise NumericsError("series too short")
    estimates, _ = _window_estimates(s.coeffs, tail_fraction, windows)
    radius = float(estimates.min())
    logger.debug(
        "radius of convergence %.6g from %d tail terms (window spread %.3g)",
        radius, length, float(estimates.max() - radius),
    )
    return radius


@dataclass(frozen=True)
class RootEstimate:
    root: complex
    residual: float
    derivative: float


@dataclass(frozen=True)
class RootReport:
    """Roots from :func:`find_roots`, with index clusters closer than the cluster distance."""

    estimates: tuple[RootEstimate, ...]
    clusters: tuple[tuple[int, ...], ...] = ()
    sweeps: int = 0

    def __iter__(self) -> Iterator[RootEstimate]:
        return iter(self.estimates)

    def __len__(self) -> int:
        return len(self.estimates)

    def __getitem__(self, index: int) -> RootEstimate:
        return self.estimates[index]

    @property
    def roots(self) -> ComplexArray:
        return np.array([e.root for e in self.estimates], dtype=np.complex128)


def root_bounds(p: ComplexPolynomial) -> tuple[float, float]:
    """Fujiwara bounds (lower, upper) on the moduli of the roots of ``p``."""
    if p.degree < 1:
        raise ValueError("root bounds need degree >= 1")

    def upper(coeffs: ComplexArray) -> float:
        n = len(coeffs) - 1
        with np.errstate(divide="ignore"):
            logs = np.log(np.abs(coeffs))
        lead = logs[-1]
        k = np.arange(1, n + 1)
        exps = (logs[n - k] - lead) / k
        exps[-1] = (logs[0] - math.log(2.0) - lead) / n
        return 2.0 * math.exp(float(np.max(exps)))

    hi = upper(p.coeffs)
    if p.coeffs[0] == 0:
        return 0.0, hi
    lo = 1.0 / upper(p.coeffs[::-1].copy())
    return lo, hi


def _horner_pair(coeffs: ComplexArray, z: ComplexArray) -> tuple[ComplexArray, ComplexArray]:
    value = np.full(z.shape, coeffs[-1], dtype=np.complex128)
    slope = np.zeros_like(value)
    for a in coeffs[-2::-1]:
        slope = slope * z + value
        value = value * z + a
    return value, slope


def _newton_ratio(coeffs: ComplexArray, z: ComplexArray) -> ComplexArray:
    """p(z)/p'(z); points outside the unit disk go through the reversed polynomial."""
    out = np.empty_like(z)
    inner = np.abs(z) <= 1.0
    with np.errstate(all="ignore"):
        if inner.any():
            value, slope = _horner_pair(coeffs, z[inner])
            out[inner] = value / slope
        outer = ~inner
        if outer.any():
            zo = z[outer]
            w = 1.0 / zo
            n = len(coeffs) - 1
            q, dq = _horner_pair(coeffs[::-1].copy(), w)
            out[outer] = zo * q / (n * q - w * dq)
    return out


def _relative_residual(coeffs: ComplexArray, z: ComplexArray) -> FloatArray:
    """|p(z)| / sum |a_k||z|^k, evaluated through the reversed polynomial for |z| > 1."""
    out = np.empty(z.shape, dtype=np.float64)
    inner = np.abs(z) <= 1.0
    with np.errstate(all="ignore"):
        for mask, c, w in (
            (inner, coeffs, z[inner]),
            (~inner, coeffs[::-1].copy(), 1.0 / z[~inner]),
        ):
            if not mask.any():
                continue
            value, _ = _horner_pair(c, w)
            scale, _ = _horner_pair(np.abs(c).astype(np.complex128), np.abs(w).astype(np.complex128))
            out[mask] = np.abs(value) / np.maximum(scale.real, np.finfo(np.float64).tiny)
    return out


def _newton_ratio_scalar(coeffs: ComplexArray, z: complex, compensated: bool) -> complex:
    deriv = coeffs[1:] * np.arange(1, len(coeffs))
    if abs(z) <= 1.0:
        value = _horner_compensated(coeffs, z) if compensated else _horner(coeffs, z)
        slope = _horner(deriv, z)
        return value / slope if slope != 0 else 0j
    w = 1.0 / z
    rev = coeffs[::-1].copy()
    n = len(coeffs) - 1
    q = _horner_compensated(rev, w) if compensated else _horner(rev, w)
    dq = _horner(rev[1:] * np.arange(1, len(rev)), w)
    denom = n * q - w * dq
    return z * q / denom if denom != 0 else 0j


def _evaluation_scale(coeffs: ComplexArray, z: complex) -> float:
    r = abs(z)
    acc = 0.0
    for a in coeffs[::-1]:
        acc = acc * r + abs(a)
    return acc


def _clusters(roots: ComplexArray, distance: float) -> tuple[tuple[int, ...], ...]:
    n = len(roots)
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    gaps = np.abs(roots[:, None] - roots[None, :])
    for i, j in zip(*np.nonzero(np.triu(gaps < distance, k=1))):
        parent[find(int(i))] = find(int(j))
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return tuple(tuple(g) for g in groups.values() if len(g) > 1)


def find_roots(
    p: ComplexPolynomial,
    tol: float = 1e-10,
    *,
    max_sweeps: int | None = None,
    step_tol: float | None = None,
    cluster_distance: float | None = None,
    polish_steps: int = 3,
) -> RootReport:
    """Find all roots of ``p`` by Aberth-Ehrlich iteration followed by Newton polishing.

    Start points are equally spaced on the circle whose radius is the geometric
    mean of the Fujiwara bounds. All roots are updated together each sweep; a
    root is frozen once its correction drops below ``step_tol * (1 + |root|)``,
    once its relative residual reaches the rounding floor of Horner's scheme,
    or once its correction has stopped shrinking for ``STALL_SWEEPS`` sweeps
    while already below ``sqrt(step_tol) * (1 + |root|)``. Frozen roots are
    left to the Newton polishing pass.

    Args:
        p: Polynomial of degree >= 1.
        tol: Residual threshold. The check is relative: a root passes when
            |p(z)| <= tol * max(1, sum |a_k||z|^k), so large roots of high
            degree polynomials may carry a large absolute residual.
        max_sweeps: Iteration budget (config default 1000).
        step_tol: Per-root convergence threshold (config default 1e-13).
        cluster_distance: Roots closer than this are reported as a cluster.
        polish_steps: Newton steps applied to each root after convergence.

    Returns:
        RootReport with one estimate per root.

    Raises:
        ValueError: If ``p`` is constant.
        RootFindingError: If some roots do not converge or keep a large residual.
    """
    if p.degree < 1:
        raise ValueError("find_roots needs a polynomial of degree >= 1")
    cfg = get_config().roots
    max_sweeps = cfg.max_sweeps if max_sweeps is None else max_sweeps
    step_tol = cfg.step_tol if step_tol is None else step_tol
    cluster_distance = cfg.cluster_distance if cluster_distance is None else cluster_distance

    n = p.degree
    coeffs = p.coeffs / np.max(np.abs(p.coeffs))
    if n == 1:
        z = np.array([-coeffs[0] / coeffs[1]])
        sweeps = 0
    else:
        lo, hi = root_bounds(p)
        radius = math.sqrt(lo * hi) if lo > 0 else 0.5 * hi
        z = radius * np.exp(1j * (2.0 * np.pi * np.arange(n) / n + 0.4))
        converged = np.zeros(n, dtype=bool)
        previous = np.full(n, np.inf)
        stalls = np.zeros(n, dtype=np.int64)
        floor = ROUNDING_FLOOR_FACTOR * n * np.finfo(np.float64).eps
        stall_tol = math.sqrt(step_tol)
        sweeps = 0
        for sweeps in range(1, max_sweeps + 1):
            idx = np.flatnonzero(~converged)
            zi = z[idx]
            ratio = _newton_ratio(coeffs, zi)
            with np.errstate(all="ignore"):
                diff = zi[:, None] - z[None, :]
                diff[np.arange(len(idx)), idx] = np.inf
                repulsion = (1.0 / diff).sum(axis=1)
                step = ratio / (1.0 - ratio * repulsion)
            step[~np.isfinite(step)] = 0.0
            z[idx] = zi - step
            size = np.abs(step)
            bound = 1.0 + np.abs(z[idx])
            stalled = (size >= 0.5 * previous[idx]) & (size > 0)
            stalls[idx] = np.where(stalled, stalls[idx] + 1, 0)
            previous[idx] = size
            done = (
                (size < step_tol * bound)
                | (_relative_residual(coeffs, z[idx]) <= floor)
                | ((stalls[idx] >= STALL_SWEEPS) & (size < stall_tol * bound))
            )
            converged[idx[done]] = True
            if converged.all():
                break
        else:
            stagnating = np.flatnonzero(~converged)
            raise RootFindingError(
                f"{len(stagnating)} of {n} roots did not converge in {max_sweeps} sweeps: "
                f"indices {stagnating.tolist()}",
                stagnating,
            )
        logger.debug("Aberth iteration converged after %d sweeps (degree %d)", sweeps, n)

    compensated = n > cfg.compensated_degree
    roots = z.astype(np.complex128)
    for i in range(n):
        r = complex(roots[i])
        best = abs(_horner(coeffs, r)) if abs(r) <= 1 else abs(_horner(coeffs[::-1].copy(), 1 / r))
        for _ in range(polish_steps):
            candidate = r - _newton_ratio_scalar(coeffs, r, compensated)
            if not cmath.isfinite(candidate):
                break
            value = (
                abs(_horner(coeffs, candidate))
                if abs(candidate) <= 1
                else abs(_horner(coeffs[::-1].copy(), 1 / candidate))
            )
            if value > best:
                break
            r, best = candidate, value
        roots[i] = r

    deriv = p.derivative()
    estimates = []
    failing = []
    for i, r in enumerate(roots):
        r = complex(r)
        residual = abs(poly_eval(p, r, compensated=compensated))
        scale = max(1.0, _evaluation_scale(p.coeffs, r))
        if not residual <= tol * scale:
            failing.append(i)
        estimates.append(RootEstimate(r, residual, abs(poly_eval(deriv, r))))
    if failing:
        raise RootFindingError(
            f"residual above {tol:g} after polishing at indices {failing}", failing
        )

    clusters = _clusters(roots, cluster_distance)
    if clusters:
        logger.warning("root clusters closer than %g: %s", cluster_distance, clusters)
    return RootReport(tuple(estimates), clusters, sweeps)
