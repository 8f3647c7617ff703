"""
cubic_siegel.family
-------------------

Rotation numbers and the two cubic Siegel families:

* the critically marked slice P_c(z) = λz + Az² + Bz³ with A = -λ(1+1/c)/2 and
  B = λ/(3c), whose critical points are exactly 1 and c;
* the monic slice f_a(z) = λz + az² + z³.

Both fix 0 with multiplier λ = e^{2πiθ}. P_c is conjugate to f_a through
z ↦ uz with u² = λ/(3c) whenever a² = η(c).
"""

from __future__ import annotations

import cmath
import logging
import math
import re
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Any

from .config import get_config

logger = logging.getLogger(__name__)

UNROLLED_QUOTIENTS = 64

_CF_PATTERN = re.compile(r"^\[\s*0\s*;(?P<body>[^\[\]]*)\]$")
_INT_PATTERN = re.compile(r"^[+-]?\d+$")


@dataclass(frozen=True)
class RotationNumber:
    """θ = [0; a_1, a_2, ...] with an eventually periodic list of quotients.

    ``value`` is computed from the first 64 quotients and ``multiplier`` is
    e^{2πiθ}.
    """

    preperiod: tuple[int, ...]
    period: tuple[int, ...]
    value: float = field(init=False, compare=False)
    multiplier: complex = field(init=False, compare=False)

    def __post_init__(self) -> None:
        if not self.period:
            raise ValueError("rotation number needs a nonempty periodic block")
        for q in self.preperiod + self.period:
            if q < 1:
                raise ValueError(f"partial quotient {q} must be a positive integer")
        x = 0.0
        for q in reversed(self.digits(UNROLLED_QUOTIENTS)):
            x = 1.0 / (q + x)
        object.__setattr__(self, "value", x)
        object.__setattr__(self, "multiplier", cmath.exp(2j * math.pi * x))

    def digits(self, count: int) -> list[int]:
        """First ``count`` partial quotients a_1..a_count."""
        out = list(self.preperiod[:count])
        while len(out) < count:
            out.extend(self.period)
        return out[:count]

    def convergents(self, count: int) -> list[tuple[int, int]]:
        """Convergents p_k/q_k for k = 1..count."""
        p_prev, p = 1, 0
        q_prev, q = 0, 1
        out = []
        for a in self.digits(count):
            p_prev, p = p, a * p + p_prev
            q_prev, q = q, a * q + q_prev
            out.append((p, q))
        return out

    def __str__(self) -> str:
        head = "".join(f"{q}," for q in self.preperiod)
        return f"[0;{head}({','.join(str(q) for q in self.period)})]"


GOLDEN = RotationNumber((), (1,))


def _parse_quotients(text: str) -> tuple[int, ...]:
    tokens = [t.strip() for t in text.split(",") if t.strip()]
    out = []
    for token in tokens:
        if not _INT_PATTERN.match(token):
            raise ValueError(f"partial quotient {token!r} is not an integer")
        q = int(token)
        if q < 1:
            raise ValueError(f"partial quotient {q} must be a positive integer")
        out.append(q)
    return tuple(out)


def make_rotation(literal: str) -> RotationNumber:
    """Parse ``"golden"`` or a literal such as ``"[0;2,1,(1,3)]"``.

    The parenthesized block repeats forever. Decimal values are rejected since
    bounded type cannot be read off a decimal expansion.

    Raises:
        ValueError: On malformed input, non-positive quotients or a missing
            periodic block.
    """
    text = literal.strip()
    if text.lower() == "golden":
        return GOLDEN
    match = _CF_PATTERN.match(text)
    if match is None:
        raise ValueError(
            f"Invalid rotation number {literal!r}: use 'golden' or a continued fraction "
            "like '[0;(2)]' (decimal input is not accepted)"
        )
    body = match["body"]
    # validate every quotient before looking at the block structure
    _parse_quotients(body.replace("(", ",").replace(")", ","))
    open_at = body.find("(")
    if open_at < 0 or body.count("(") != 1 or not body.rstrip().endswith(")"):
        raise ValueError(f"Invalid rotation number {literal!r}: a trailing periodic block '(...)' is required")
    pre = _parse_quotients(body[:open_at])
    per = _parse_quotients(body[open_at + 1 : body.rindex(")")])
    return RotationNumber(pre, per)


class MapSlice(str, Enum):
    """Which one-parameter slice a map belongs to."""
    C_PLANE = "c"
    A_PLANE = "a"


@dataclass(frozen=True)
class CubicSiegelMap:
    """One cubic polynomial with a Siegel fixed point at 0.

    ``evaluate`` and ``derivative`` accept Python scalars and numpy arrays.
    """

    slice: MapSlice
    parameter: complex
    rotation: RotationNumber

    def __post_init__(self) -> None:
        object.__setattr__(self, "parameter", complex(self.parameter))
        if self.slice is MapSlice.C_PLANE and self.parameter == 0:
            raise ValueError("c-plane parameter must be nonzero")
        if not cmath.isfinite(self.parameter):
            raise ValueError("parameter must be finite")

    @classmethod
    def p_c(cls, c: complex, rotation: RotationNumber = GOLDEN) -> CubicSiegelMap:
        return cls(MapSlice.C_PLANE, c, rotation)

    @classmethod
    def f_a(cls, a: complex, rotation: RotationNumber = GOLDEN) -> CubicSiegelMap:
        return cls(MapSlice.A_PLANE, a, rotation)

    @property
    def multiplier(self) -> complex:
        return self.rotation.multiplier

    @cached_property
    def coefficients(self) -> tuple[complex, complex, complex]:
        """(λ, A, B) with map z ↦ λz + Az² + Bz³."""
        lam = self.multiplier
        if self.slice is MapSlice.C_PLANE:
            c = self.parameter
            return lam, -lam * (1.0 + 1.0 / c) / 2.0, lam / (3.0 * c)
        return lam, self.parameter, 1.0 + 0j

    @cached_property
    def critical_points(self) -> tuple[complex, complex]:
        if self.slice is MapSlice.C_PLANE:
            return 1.0 + 0j, self.parameter
        a = self.parameter
        root = cmath.sqrt(a * a - 3.0 * self.multiplier)
        return (-a + root) / 3.0, (-a - root) / 3.0

    def evaluate(self, z: Any) -> Any:
        lam, a, b = self.coefficients
        return z * (lam + z * (a + b * z))

    def derivative(self, z: Any) -> Any:
        lam, a, b = self.coefficients
        return lam + z * (2.0 * a + 3.0 * b * z)

    def mirror(self) -> CubicSiegelMap:
        """P_{1/c}, conjugate to P_c through z ↦ cz with the critical points swapped."""
        if self.slice is not MapSlice.C_PLANE:
            raise ValueError("mirror is defined on the c-plane only")
        return CubicSiegelMap.p_c(1.0 / self.parameter, self.rotation)


def evaluate(map: CubicSiegelMap, z: complex) -> complex:
    """One step λz + Az² + Bz³ by Horner's rule."""
    return map.evaluate(z)


def derivative(map: CubicSiegelMap, z: complex) -> complex:
    return map.derivative(z)


def eta(c: complex, rotation: RotationNumber = GOLDEN) -> complex:
    """η(c) = (3λ/4)(c + 1/c + 2); P_c is conjugate to f_a exactly when a² = η(c)."""
    if c == 0:
        raise ValueError("eta is undefined at c = 0")
    return 0.75 * rotation.multiplier * (c + 1.0 / c + 2.0)


def a_to_c(a: complex, rotation: RotationNumber = GOLDEN) -> tuple[complex, complex]:
    """Both parameters c with η(c) = a², i.e. roots of 3λc² + (6λ-4a²)c + 3λ.

    The pair multiplies to 1; a numerically vanishing discriminant returns the
    double root twice.
    """
    lam = rotation.multiplier
    a2 = complex(a) ** 2
    lead = 3.0 * lam
    mid = 6.0 * lam - 4.0 * a2
    disc = mid * mid - 4.0 * lead * lead
    if abs(disc) <= 1e-14 * max(abs(mid) ** 2, abs(lead) ** 2):
        root = -mid / (2.0 * lead)
        return root, root
    sq = cmath.sqrt(disc)
    # pick the sign that avoids cancellation, then use the unit product
    big = (-mid - sq) if abs(-mid - sq) >= abs(-mid + sq) else (-mid + sq)
    c1 = big / (2.0 * lead)
    return c1, 1.0 / c1


def conjugacy_witness(c: complex, rotation: RotationNumber = GOLDEN) -> tuple[complex, complex]:
    """(u, a) with u² = λ/(3c) (principal root) and f_a(uz) = u·P_c(z)."""
    if c == 0:
        raise ValueError("conjugacy is undefined at c = 0")
    lam = rotation.multiplier
    u = cmath.sqrt(lam / (3.0 * c))
    a = -lam * (1.0 + 1.0 / c) / (2.0 * u)
    return u, a


def conjugate_parameters(c: complex, rotation: RotationNumber = GOLDEN) -> tuple[complex, complex]:
    """The two a-plane parameters ±a with a² = η(c)."""
    _, a = conjugacy_witness(c, rotation)
    return a, -a


@dataclass(frozen=True)
class OrbitBuffer:
    """Forward orbit z_0, z_1, ... with the running product of P'(z_k)."""

    points: tuple[complex, ...]
    derivative_product: complex
    escaped_at: int | None = None

    @property
    def escaped(self) -> bool:
        return self.escaped_at is not None


def iterate_orbit(
    map: CubicSiegelMap,
    z0: complex,
    n_max: int,
    escape_radius: float | None = None,
) -> OrbitBuffer:
    """Iterate up to ``n_max`` steps, stopping once |z| exceeds ``escape_radius``."""
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    radius = get_config().orbit.escape_radius if escape_radius is None else escape_radius
    z = complex(z0)
    points = [z]
    product = 1.0 + 0j
    escaped_at = None
    for step in range(1, n_max + 1):
        product *= map.derivative(z)
        z = map.evaluate(z)
        points.append(z)
        if not cmath.isfinite(z) or abs(z) > radius:
            escaped_at = step
            break
    if escaped_at is not None:
        logger.debug("orbit of %s escaped at step %d", z0, escaped_at)
    return OrbitBuffer(tuple(points), product, escaped_at)

