"""Hyperbolic trigonometry and SL(2, R) arithmetic in the upper half-plane.

Isometries are unit-determinant real 2x2 matrices acting by Moebius
transformations.  Geodesics are recorded by their two endpoints on the
extended real line; ``math.inf`` stands for the point at infinity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import InvalidSideLength, NonHyperbolicElement, TangentAtInfinity

DET_TOL = 1e-12
HYPERBOLIC_TOL = 1e-12
FAR_ENDPOINT = 1e11

INF = math.inf


@dataclass(frozen=True, slots=True)
class Mat2:
    """Unit-determinant 2x2 real matrix ``[[a, b], [c, d]]``."""

    a: float
    b: float
    c: float
    d: float

    @classmethod
    def identity(cls) -> Mat2:
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def translation(cls, t: float) -> Mat2:
        """Translate by hyperbolic distance ``t`` along the imaginary axis, towards infinity."""
        e = math.exp(0.5 * t)
        return cls(e, 0.0, 0.0, 1.0 / e)

    @classmethod
    def rotation(cls, theta: float) -> Mat2:
        """Rotate tangent vectors at ``i`` counterclockwise by ``theta``."""
        c, s = math.cos(0.5 * theta), math.sin(0.5 * theta)
        return cls(c, s, -s, c)

    @classmethod
    def from_rows(cls, rows) -> Mat2:
        (a, b), (c, d) = rows
        return cls(float(a), float(b), float(c), float(d)).normalized()

    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def trace(self) -> float:
        return self.a + self.d

    def normalized(self) -> Mat2:
        det = self.det()
        if det <= 0.0:
            raise ValueError(f"matrix has non-positive determinant {det!r}")
        if abs(det - 1.0) <= DET_TOL:
            return self
        r = math.sqrt(det)
        return Mat2(self.a / r, self.b / r, self.c / r, self.d / r)

    def inverse(self) -> Mat2:
        return Mat2(self.d, -self.b, -self.c, self.a)

    def mirrored(self) -> Mat2:
        """Conjugate by the reflection ``z -> -conj(z)`` across the imaginary axis."""
        return Mat2(self.a, -self.b, -self.c, self.d)

    def __matmul__(self, other: Mat2) -> Mat2:
        a = self.a * other.a + self.b * other.c
        b = self.a * other.b + self.b * other.d
        c = self.c * other.a + self.d * other.c
        d = self.c * other.b + self.d * other.d
        out = Mat2(a, b, c, d)
        det = a * d - b * c
        if abs(det - 1.0) > DET_TOL and det > 0.0:
            r = math.sqrt(det)
            out = Mat2(a / r, b / r, c / r, d / r)
        return out

    def conjugate_by(self, g: Mat2) -> Mat2:
        """Return ``g @ self @ g^-1``."""
        return g @ self @ g.inverse()

    def apply(self, z):
        """Moebius action on a complex number or a point of the extended real line."""
        if isinstance(z, float) and math.isinf(z):
            return INF if self.c == 0.0 else self.a / self.c
        den = self.c * z + self.d
        if den == 0:
            return INF
        return (self.a * z + self.b) / den

    def is_hyperbolic(self) -> bool:
        return abs(self.trace()) > 2.0 + HYPERBOLIC_TOL

    def as_rows(self) -> tuple[tuple[float, float], tuple[float, float]]:
        return ((self.a, self.b), (self.c, self.d))

    def max_abs(self) -> float:
        return max(abs(self.a), abs(self.b), abs(self.c), abs(self.d))


def reflection_product(f: Mat2, g: Mat2) -> Mat2:
    """Composite of the reflections in the geodesics ``f(iR+)`` and ``g(iR+)``.

    Reflecting first in ``g``'s line and then in ``f``'s line gives the
    orientation-preserving isometry ``f J f^-1 g J g^-1`` with ``J`` the
    reflection in the imaginary axis.
    """
    return f @ (f.inverse() @ g).mirrored() @ g.inverse()


def trace_to_length(t: float) -> float:
    """Translation length of a hyperbolic element with trace ``t``."""
    at = abs(t)
    if not at > 2.0 + HYPERBOLIC_TOL:
        raise NonHyperbolicElement(f"|trace| = {at!r} is not > 2")
    return 2.0 * math.acosh(0.5 * at)


def translation_length(m: Mat2) -> float:
    return trace_to_length(m.trace())


class HexagonSides(NamedTuple):
    """Right-angled hexagon: alternate sides and the sides opposite them."""

    alternate: tuple[float, float, float]
    opposite: tuple[float, float, float]

    def residuals(self) -> tuple[float, float, float]:
        """Residuals of ``cosh a' sinh b sinh c = cosh a + cosh b cosh c`` and rotations."""
        out = []
        for i in range(3):
            a, b, c = (self.alternate[(i + k) % 3] for k in range(3))
            ap = self.opposite[i]
            lhs = math.cosh(ap) * math.sinh(b) * math.sinh(c)
            rhs = math.cosh(a) + math.cosh(b) * math.cosh(c)
            out.append(abs(lhs - rhs) / max(1.0, abs(rhs)))
        return tuple(out)

    def cyclic_sides(self) -> tuple[float, ...]:
        """Sides in boundary order ``a, c', b, a', c, b'``."""
        (a, b, c), (ap, bp, cp) = self.alternate, self.opposite
        return (a, cp, b, ap, c, bp)


def hexagon_solve(a: float, b: float, c: float) -> HexagonSides:
    """Solve the right-angled hexagon with alternate sides ``a, b, c``."""
    sides = (float(a), float(b), float(c))
    for s in sides:
        if not (s > 0.0 and math.isfinite(s)):
            raise InvalidSideLength(f"side lengths must be positive and finite, got {sides}")
    ch = [math.cosh(s) for s in sides]
    sh = [math.sinh(s) for s in sides]
    opposite = []
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        opposite.append(math.acosh((ch[i] + ch[j] * ch[k]) / (sh[j] * sh[k])))
    return HexagonSides(sides, tuple(opposite))


@dataclass(frozen=True, slots=True)
class GeodesicAxis:
    """Oriented geodesic from ``p`` (repelling) to ``q`` (attracting)."""

    p: float
    q: float

    def __post_init__(self):
        if self.p == self.q:
            raise ValueError("axis endpoints must differ")

    def point_and_direction(self, z: complex) -> tuple[float, float]:
        """Unit tangent (dx, dy) of the oriented geodesic at a point ``z`` on it."""
        p, q = self.p, self.q
        if math.isinf(q):
            return (0.0, 1.0)
        if math.isinf(p):
            return (0.0, -1.0)
        m = 0.5 * (p + q)
        x, y = z.real - m, z.imag
        tx, ty = (y, -x) if p < q else (-y, x)
        n = math.hypot(tx, ty)
        return (tx / n, ty / n)


def axis(m: Mat2) -> GeodesicAxis:
    """Translation axis of a hyperbolic element, oriented along its translation."""
    if not m.is_hyperbolic():
        raise NonHyperbolicElement(f"trace {m.trace()!r} is not hyperbolic")
    if m.trace() < 0:
        m = Mat2(-m.a, -m.b, -m.c, -m.d)
    a, b, c, d = m.a, m.b, m.c, m.d
    if c == 0.0:
        finite = b / (d - a)
        # z -> (a/d) z + b/d expands away from the finite point when a > d
        return GeodesicAxis(finite, INF) if a > d else GeodesicAxis(INF, finite)
    disc = math.sqrt((d - a) ** 2 + 4.0 * b * c)
    # numerically stable roots of c z^2 + (d - a) z - b = 0
    s = (a - d) + math.copysign(disc, a - d) if a != d else disc
    r1 = s / (2.0 * c)
    r2 = -2.0 * b / s if s != 0.0 else -r1
    # a root this far out is infinity up to rounding in c
    r1, r2 = (INF if abs(r) > FAR_ENDPOINT else r for r in (r1, r2))
    if math.isinf(r1) or math.isinf(r2):
        finite = r2 if math.isinf(r1) else r1
        return GeodesicAxis(finite, INF) if _expands_from(m, finite) else GeodesicAxis(INF, finite)
    # attracting fixed point has |c z + d| > 1
    if abs(c * r1 + d) > abs(c * r2 + d):
        return GeodesicAxis(r2, r1)
    return GeodesicAxis(r1, r2)


def _expands_from(m: Mat2, x: float) -> bool:
    """True when the fixed point ``x`` of ``m`` is repelling."""
    return abs(m.c * x + m.d) < 1.0


def _interleaved(p1, q1, p2, q2) -> bool:
    lo, hi = min(p1, q1), max(p1, q1)
    return (lo < p2 < hi) != (lo < q2 < hi)


def intersection_point(ax1: GeodesicAxis, ax2: GeodesicAxis) -> complex | None:
    """Crossing point of two geodesics in the upper half-plane, or ``None`` if disjoint."""
    ends = (ax1.p, ax1.q, ax2.p, ax2.q)
    if len({ax1.p, ax1.q} & {ax2.p, ax2.q}) > 0:
        raise TangentAtInfinity(f"axes share an endpoint: {ends}")
    if not _interleaved(*ends):
        return None
    v1, v2 = math.isinf(ax1.p) or math.isinf(ax1.q), math.isinf(ax2.p) or math.isinf(ax2.q)
    if v1 or v2:
        line, circ = (ax1, ax2) if v1 else (ax2, ax1)
        x = line.q if math.isinf(line.p) else line.p
        m, r = 0.5 * (circ.p + circ.q), 0.5 * abs(circ.q - circ.p)
        return complex(x, math.sqrt(max(r * r - (x - m) ** 2, 0.0)))
    m1, r1 = 0.5 * (ax1.p + ax1.q), 0.5 * abs(ax1.q - ax1.p)
    m2, r2 = 0.5 * (ax2.p + ax2.q), 0.5 * abs(ax2.q - ax2.p)
    x = (r1 * r1 - r2 * r2 + m2 * m2 - m1 * m1) / (2.0 * (m2 - m1))
    return complex(x, math.sqrt(max(r1 * r1 - (x - m1) ** 2, 0.0)))


def crossing_angle(ax1: GeodesicAxis, ax2: GeodesicAxis) -> float | None:
    """Counterclockwise angle in (0, pi) from the line of ``ax1`` to the line of ``ax2``.

    The result depends only on the unoriented lines.  Returns ``None`` when the
    geodesics are disjoint.
    """
    z = intersection_point(ax1, ax2)
    if z is None:
        return None
    d1x, d1y = ax1.point_and_direction(z)
    d2x, d2y = ax2.point_and_direction(z)
    phi = math.atan2(d1x * d2y - d1y * d2x, d1x * d2x + d1y * d2y)
    return phi % math.pi


def hyperbolic_distance(z: complex, w: complex) -> float:
    num = abs(z - w) ** 2
    return math.acosh(1.0 + num / (2.0 * z.imag * w.imag))
