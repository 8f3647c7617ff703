"""
cubic_siegel.classify
---------------------

Orbit and parameter classification for the cubic Siegel families.

An orbit escapes, is captured by the Siegel disk (its level is the first
iterate that lands strictly inside), is attracted to a cycle, or stays
unresolved within the iteration budget. A parameter combines the boundary
verdict with the classes of both critical orbits.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any

import numpy as np

from .config import get_config
from .family import GOLDEN, CubicSiegelMap, RotationNumber, a_to_c
from .siegel import (
    BoundaryCriticalVerdict,
    BoundaryVerdict,
    InteriorVerdict,
    LinearizationData,
    LinearizationError,
    build_linearization,
    canonical_parameter,
    verdict_from_linearization,
)

logger = logging.getLogger(__name__)

ANNULUS = (1.0 / 30.0, 30.0)


class OrbitTag(str, Enum):
    ESCAPE = "escape"
    CAPTURE = "capture"
    CYCLE = "cycle"
    UNRESOLVED = "unresolved"


@dataclass(frozen=True)
class PointClass:
    """Verdict for one orbit.

    Only the field belonging to ``tag`` is set: ``step`` for escape, ``level``
    for capture, ``period`` and ``modulus`` for a cycle, ``budget`` when
    unresolved.
    """

    tag: OrbitTag
    step: int | None = None
    level: int | None = None
    period: int | None = None
    modulus: float | None = None
    budget: int | None = None

    @classmethod
    def escapes(cls, step: int) -> PointClass:
        return cls(OrbitTag.ESCAPE, step=step)

    @classmethod
    def capture(cls, level: int) -> PointClass:
        return cls(OrbitTag.CAPTURE, level=level)

    @classmethod
    def cycle(cls, period: int, modulus: float) -> PointClass:
        return cls(OrbitTag.CYCLE, period=period, modulus=modulus)

    @classmethod
    def unresolved(cls, budget: int) -> PointClass:
        return cls(OrbitTag.UNRESOLVED, budget=budget)

    @property
    def resolved(self) -> bool:
        return self.tag is not OrbitTag.UNRESOLVED

    def key(self) -> tuple[str, int | None]:
        """Comparison key: tag plus level or period (escape steps are ignored)."""
        if self.tag is OrbitTag.CAPTURE:
            return self.tag.value, self.level
        if self.tag is OrbitTag.CYCLE:
            return self.tag.value, self.period
        return self.tag.value, None

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"tag": self.tag.value}
        for name in ("step", "level", "period", "modulus", "budget"):
            value = getattr(self, name)
            if value is not None:
                out[name] = value
        return out


@dataclass(frozen=True)
class ParamClass:
    """Boundary verdict and critical-orbit classes of one parameter c."""

    parameter: complex
    boundary: BoundaryCriticalVerdict
    free_point: complex
    free_orbit: PointClass
    other_orbit: PointClass

    @property
    def captured(self) -> bool:
        """Membership in the capture set: some critical orbit meets Δ."""
        return OrbitTag.CAPTURE in (self.free_orbit.tag, self.other_orbit.tag)

    @property
    def resolved(self) -> bool:
        return self.boundary.verdict is not BoundaryVerdict.UNRESOLVED and self.free_orbit.resolved

    def swapped(self, parameter: complex) -> ParamClass:
        """The same verdict read at the mirror parameter, critical roles exchanged."""
        scale = self.parameter
        return ParamClass(
            parameter=complex(parameter),
            boundary=self.boundary.swapped(complex(parameter)),
            free_point=self.free_point / scale,
            free_orbit=self.free_orbit,
            other_orbit=self.other_orbit,
        )

    def agrees_with(self, other: ParamClass) -> bool:
        return (
            self.boundary.verdict is other.boundary.verdict
            and self.free_orbit.key() == other.free_orbit.key()
            and self.other_orbit.key() == other.other_orbit.key()
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "parameter": [self.parameter.real, self.parameter.imag],
            "boundary": self.boundary.to_dict(),
            "free_point": [self.free_point.real, self.free_point.imag],
            "free_orbit": self.free_orbit.to_dict(),
            "other_orbit": self.other_orbit.to_dict(),
            "captured": self.captured,
        }


def _cycle_modulus(map: CubicSiegelMap, z: complex, period: int) -> float:
    product = 1.0 + 0j
    for _ in range(period):
        product *= map.derivative(z)
        z = map.evaluate(z)
    return abs(product)


def classify_orbit(
    map: CubicSiegelMap,
    lin: LinearizationData,
    z0: complex,
    n_max: int | None = None,
    *,
    escape_radius: float | None = None,
) -> PointClass:
    """Classify the orbit of ``z0``.

    Checks run in the order escape, capture, cycle at every step. A starting
    point already inside Δ is reported as ``CaptureSiegel(0)``. NearBoundary
    never counts as inside. Cycles come from Brent's algorithm with the
    configured distance tolerance and must have multiplier modulus below the
    configured threshold over one period.
    """
    cfg = get_config().orbit
    n_max = cfg.max_iter if n_max is None else n_max
    radius = cfg.escape_radius if escape_radius is None else escape_radius
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    lam = map.multiplier

    z = complex(z0)
    verdict, w = lin.locate(z)
    if verdict is InteriorVerdict.INSIDE:
        return PointClass.capture(0)

    tortoise = z
    power = lam_len = 1
    for step in range(1, n_max + 1):
        z = map.evaluate(z)
        if not cmath.isfinite(z) or abs(z) > radius:
            return PointClass.escapes(step)
        verdict, w = lin.locate(z, None if w is None else lam * w)
        if verdict is InteriorVerdict.INSIDE:
            return PointClass.capture(step)
        if abs(z - tortoise) < cfg.cycle_tol:
            modulus = _cycle_modulus(map, z, lam_len)
            if modulus < cfg.cycle_modulus:
                return PointClass.cycle(lam_len, modulus)
        if power == lam_len:
            tortoise = z
            power *= 2
            lam_len = 0
        lam_len += 1
    return PointClass.unresolved(n_max)


def _unresolved_param(c: complex, reason: str, budget: int) -> ParamClass:
    boundary = BoundaryCriticalVerdict(BoundaryVerdict.UNRESOLVED, (math.nan, math.nan), c, reason)
    return ParamClass(c, boundary, c, PointClass.unresolved(budget), PointClass.unresolved(budget))


def classify_parameter_c(
    c: complex,
    n_max: int | None = None,
    rotation: RotationNumber = GOLDEN,
    *,
    terms: int | None = None,
    samples: int | None = None,
    canonical: bool = True,
) -> ParamClass:
    """Classify the parameter c of P_c.

    With ``canonical`` (the default) the work happens at the representative
    of {c, 1/c} with |c| >= 1 and the result is role swapped; pass False to
    compute directly at c.
    """
    if c == 0:
        raise ValueError("c-plane parameter must be nonzero")
    c = complex(c)
    budget = get_config().orbit.max_iter if n_max is None else n_max
    if canonical:
        rep, inverted = canonical_parameter(c)
        if inverted:
            return classify_parameter_c(rep, budget, rotation, terms=terms, samples=samples).swapped(c)
    map = CubicSiegelMap.p_c(c, rotation)
    try:
        lin = build_linearization(map, terms=terms, samples=samples)
    except (LinearizationError, ArithmeticError) as exc:
        logger.warning("parameter c=%s unresolved: %s", c, exc)
        return _unresolved_param(c, str(exc), budget)
    boundary = verdict_from_linearization(lin)
    free, other = (1.0 + 0j, c) if boundary.verdict is BoundaryVerdict.ON_BOUNDARY_C else (c, 1.0 + 0j)
    return ParamClass(
        parameter=c,
        boundary=boundary,
        free_point=free,
        free_orbit=classify_orbit(map, lin, free, budget),
        other_orbit=classify_orbit(map, lin, other, budget),
    )


def classify_parameter_a(
    a: complex,
    n_max: int | None = None,
    rotation: RotationNumber = GOLDEN,
    *,
    terms: int | None = None,
    samples: int | None = None,
) -> ParamClass:
    """Classify f_a through the c-plane.

    Both solutions of a² = η(c) are conjugate to each other under c ↦ 1/c, so
    the verdict is taken on the branch with |c| >= 1 and the other branch is
    its role swap.
    """
    c1, c2 = a_to_c(a, rotation)
    branch = c1 if abs(c1) >= abs(c2) else c2
    return classify_parameter_c(branch, n_max, rotation, terms=terms, samples=samples)


def capture_level(c: complex, n_max: int | None = None, rotation: RotationNumber = GOLDEN) -> int | None:
    """Level of the free critical orbit if it is captured within the budget."""
    result = classify_parameter_c(c, n_max, rotation)
    if result.free_orbit.tag is OrbitTag.CAPTURE:
        return result.free_orbit.level
    return None


@dataclass(frozen=True)
class SymmetryReport:
    samples: int
    resolved: int
    agreeing: int

    @property
    def fraction(self) -> float:
        return self.agreeing / self.resolved if self.resolved else 1.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "samples": self.samples,
            "resolved": self.resolved,
            "agreeing": self.agreeing,
            "fraction": self.fraction,
        }


def annulus_samples(count: int, seed: int = 0) -> np.ndarray:
    """Parameters spread log-uniformly in radius over 1/30 < |c| < 30."""
    rng = np.random.default_rng(seed)
    lo, hi = (math.log(r) for r in ANNULUS)
    radius = np.exp(rng.uniform(lo, hi, count))
    angle = rng.uniform(0.0, 2.0 * math.pi, count)
    return radius * np.exp(1j * angle)


def symmetry_agreement(
    samples: int,
    seed: int = 0,
    n_max: int | None = None,
    rotation: RotationNumber = GOLDEN,
    *,
    terms: int | None = None,
    boundary_samples: int | None = None,
) -> SymmetryReport:
    """Compare direct classifications at c and 1/c for random annulus parameters.

    Both sides are computed without canonicalization, so the check exercises
    the numerics rather than the shortcut.
    """
    resolved = agreeing = 0
    for c in annulus_samples(samples, seed):
        c = complex(c)
        direct = classify_parameter_c(c, n_max, rotation, terms=terms, samples=boundary_samples, canonical=False)
        mirror = classify_parameter_c(1.0 / c, n_max, rotation, terms=terms, samples=boundary_samples, canonical=False)
        if not (direct.resolved and mirror.resolved):
            continue
        resolved += 1
        if direct.agrees_with(mirror.swapped(c)):
            agreeing += 1
        else:
            logger.debug("symmetry mismatch at c=%s: %s vs %s", c, direct.to_dict(), mirror.to_dict())
    report = SymmetryReport(samples, resolved, agreeing)
    logger.info("symmetry agreement %d/%d (%.3f)", agreeing, resolved, report.fraction)
    return report
