"""Length functions, the catalog systole, coordinate gradients and the twist-derivative check."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .curves import CurveClass, CurveSystem, default_catalog
from .errors import AngleSearchFailed, WeightMismatch
from .fenchel import GENERATORS, FNPoint, Holonomy, build_holonomy, invert_letter, twist
from .hypkernel import (INF, GeodesicAxis, Mat2, axis, crossing_angle, intersection_point,
                        translation_length)

DEFAULT_TOL_SYSTOLE = 1e-7
DEFAULT_STEP = 1e-5


def _curve(c, system: CurveSystem | None) -> CurveClass:
    if isinstance(c, CurveClass):
        return c
    return (system or default_catalog())[c]


def _curves(C, system: CurveSystem | None) -> tuple[CurveClass, ...]:
    system = system or default_catalog()
    if C is None:
        return system.curves
    if isinstance(C, CurveSystem):
        return C.curves
    return tuple(_curve(c, system) for c in C)


def length(c: CurveClass | str, x: FNPoint, system: CurveSystem | None = None) -> float:
    """Length of the closed geodesic in the class ``c`` on the surface ``x``."""
    c = _curve(c, system)
    return build_holonomy(x).length(c.word)


def lengths_at(x: FNPoint, C=None, system: CurveSystem | None = None) -> dict[str, float]:
    hol = build_holonomy(x)
    return {c.id: hol.length(c.word) for c in _curves(C, system)}


@dataclass(frozen=True)
class WeightVector:
    """Positive weights indexed by curve ids."""

    ids: tuple[str, ...]
    weights: tuple[float, ...]
    normalized: bool = False

    def __post_init__(self):
        ids = tuple(self.ids)
        w = tuple(float(v) for v in self.weights)
        if len(ids) != len(w):
            raise WeightMismatch(f"{len(w)} weights for {len(ids)} curves")
        if not all(v > 0.0 and math.isfinite(v) for v in w):
            raise ValueError(f"weights must be positive, got {w}")
        if self.normalized:
            s = sum(w)
            w = tuple(v / s for v in w)
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, ids: Sequence[str], normalized: bool = True) -> WeightVector:
        return cls(tuple(ids), (1.0,) * len(ids), normalized)

    def scaled(self, k: float) -> WeightVector:
        return WeightVector(self.ids, tuple(k * v for v in self.weights))

    def as_array(self) -> np.ndarray:
        return np.array(self.weights)


def _check_weights(A: WeightVector, curves: Sequence[CurveClass]):
    if tuple(c.id for c in curves) != A.ids:
        raise WeightMismatch(f"weights indexed by {A.ids}, curves are {tuple(c.id for c in curves)}")


def weighted_length(A: WeightVector, C, x: FNPoint, system: CurveSystem | None = None) -> float:
    """``sum_j a_j L(c_j)(x)``."""
    curves = _curves(C, system)
    _check_weights(A, curves)
    hol = build_holonomy(x)
    return float(sum(a * hol.length(c.word) for a, c in zip(A.weights, curves)))


@dataclass(frozen=True)
class SystoleResult:
    value: float
    systoles: tuple[str, ...]
    tolerance: float
    lengths: dict

    def to_json(self) -> dict:
        return {"value": self.value, "systoles": list(self.systoles), "tolerance": self.tolerance,
                "lengths": dict(sorted(self.lengths.items()))}


def systole(x: FNPoint, tol_rel: float = DEFAULT_TOL_SYSTOLE, system: CurveSystem | None = None,
            C=None) -> SystoleResult:
    """Shortest catalog length at ``x`` and the curves within ``tol_rel`` of it."""
    if not 0.0 < tol_rel <= 1e-3:
        raise ValueError(f"tol_rel must lie in (0, 1e-3], got {tol_rel}")
    ls = lengths_at(x, C, system)
    value = min(ls.values())
    sys_ids = tuple(k for k, v in ls.items() if v <= value * (1.0 + tol_rel))
    return SystoleResult(value, sys_ids, tol_rel, ls)


@dataclass(frozen=True)
class GradientSet:
    point: FNPoint
    ids: tuple[str, ...]
    rows: np.ndarray
    step: float

    def __post_init__(self):
        if self.rows.shape != (len(self.ids), 6):
            raise ValueError(f"rows have shape {self.rows.shape}, expected ({len(self.ids)}, 6)")
        if not self.step > 0:
            raise ValueError("step must be positive")
        self.rows.setflags(write=False)

    def subset(self, ids: Iterable[str]) -> GradientSet:
        ids = tuple(ids)
        idx = [self.ids.index(i) for i in ids]
        return GradientSet(self.point, ids, self.rows[idx].copy(), self.step)

    def row(self, cid: str) -> np.ndarray:
        return self.rows[self.ids.index(cid)]

    def to_json(self) -> dict:
        return {"point": self.point.to_json(), "step": self.step,
                "rows": {i: [float(v) for v in r] for i, r in zip(self.ids, self.rows)}}


def gradients(C, x: FNPoint, h: float = DEFAULT_STEP, system: CurveSystem | None = None) -> GradientSet:
    """Central-difference partials of each ``L(c)`` in the six FN coordinates."""
    if not 1e-7 <= h <= 1e-3:
        raise ValueError(f"finite-difference step must lie in [1e-7, 1e-3], got {h}")
    curves = _curves(C, system)
    base = x.as_array()
    rows = np.zeros((len(curves), 6))
    for k in range(6):
        e = np.zeros(6)
        e[k] = h
        plus = build_holonomy(FNPoint.from_array(base + e))
        minus = build_holonomy(FNPoint.from_array(base - e))
        for j, c in enumerate(curves):
            rows[j, k] = (plus.length(c.word) - minus.length(c.word)) / (2 * h)
    return GradientSet(x, tuple(c.id for c in curves), rows, h)


# -- axes, translates and crossings --------------------------------------

@lru_cache(maxsize=None)
def _reduced_words(n: int) -> tuple[tuple[str, ...], ...]:
    """All freely reduced words of length <= n, shortest first."""
    letters = [g for g in GENERATORS] + [g.upper() for g in GENERATORS]
    out = [()]
    frontier = [()]
    for _ in range(n):
        nxt = []
        for w in frontier:
            for ch in letters:
                if w and ch == invert_letter(w[-1]):
                    continue
                nxt.append(w + (ch,))
        out.extend(nxt)
        frontier = nxt
    return tuple(out)


def translate_axis(g: Mat2, ax: GeodesicAxis) -> GeodesicAxis:
    return GeodesicAxis(g.apply(ax.p), g.apply(ax.q))


def normalizing_map(ax: GeodesicAxis) -> Mat2:
    """Isometry sending ``ax.p`` to 0 and ``ax.q`` to infinity."""
    p, q = ax.p, ax.q
    if math.isinf(q):
        return Mat2(1.0, -p, 0.0, 1.0)
    if math.isinf(p):
        return Mat2(0.0, -1.0, 1.0, -q)
    rows = ((1.0, -p), (1.0, -q)) if q < p else ((1.0, -p), (-1.0, q))
    return Mat2.from_rows(rows)


_STANDARD_AXIS = GeodesicAxis(0.0, INF)


@dataclass(frozen=True)
class Crossing:
    element: tuple[str, ...]
    height: float
    angle: float
    position: float


def axis_crossings(hol: Holonomy, base_word, other_word, radius: int = 6, first_only: bool = False) -> list[Crossing]:
    """Translates ``g(axis(other))`` crossing ``axis(base)`` for reduced ``g`` of length <= radius.

    Everything is moved by the isometry taking the base axis to the
    imaginary axis.  Only crossings within one period of ``i`` are kept, which
    is where they can be located accurately; ``position`` is the arclength
    coordinate reduced modulo the period, so crossings that project to the
    same point of the surface share a position.
    """
    a_mat = hol.word(base_word)
    period = translation_length(a_mat)
    f = normalizing_map(axis(a_mat))
    b_ax = axis(hol.word(other_word))
    out = []
    for w in _reduced_words(radius):
        g = f @ hol.word(w) if w else f
        t_ax = translate_axis(g, b_ax)
        try:
            z = intersection_point(_STANDARD_AXIS, t_ax)
        except ValueError:
            continue
        if z is None or not 0.0 < z.imag:
            continue
        s = math.log(z.imag)
        if abs(s) > period:
            continue
        ang = crossing_angle(_STANDARD_AXIS, t_ax)
        out.append(Crossing(w, z.imag, ang, s % period))
        if first_only:
            break
    return out


def crossing_count(hol: Holonomy, base_word, other_word, radius: int = 5, tol: float = 1e-6) -> int:
    """Number of distinct crossings of the two closed geodesics found in the ball."""
    period = translation_length(hol.word(base_word))
    positions: list[float] = []
    for cr in axis_crossings(hol, base_word, other_word, radius):
        if not any(min(abs(cr.position - p), period - abs(cr.position - p)) < tol for p in positions):
            positions.append(cr.position)
    return len(positions)


@dataclass(frozen=True)
class WolpertResult:
    curve: str
    cuff: int
    fd: float
    anglesum: float
    angle: float | None

    @property
    def residual(self) -> float:
        return abs(self.fd - self.anglesum)


def twist_derivative(c, cuff: int, x: FNPoint, h: float = DEFAULT_STEP, system: CurveSystem | None = None) -> float:
    c = _curve(c, system)
    return (length(c, twist(x, cuff, h)) - length(c, twist(x, cuff, -h))) / (2 * h)


def wolpert_check(c, cuff: int, x: FNPoint, system: CurveSystem | None = None,
                  h: float = DEFAULT_STEP, radius: int = 6) -> WolpertResult:
    """Twist derivative of ``L(c)`` about cuff ``cuff`` against the cosine of the crossing angle."""
    system = system or default_catalog()
    c = _curve(c, system)
    cuff_curve = system.cuffs()[cuff]
    fd = twist_derivative(c, cuff, x, h, system)
    n = system.intersection(c.id, cuff_curve.id)
    if n == 0:
        return WolpertResult(c.id, cuff, fd, 0.0, None)
    if n != 1:
        raise ValueError("the twist check is implemented for single crossings only")
    hol = build_holonomy(x)
    found = axis_crossings(hol, cuff_curve.word, c.word, radius, first_only=True)
    if not found:
        raise AngleSearchFailed(f"no translate of {c.id} within word length {radius} crosses cuff {cuff}")
    theta = found[0].angle
    return WolpertResult(c.id, cuff, fd, math.cos(theta), theta)


# -- global sanity probes -------------------------------------------------

def bers_check(x: FNPoint, bound: float, system: CurveSystem | None = None) -> bool:
    """True when the catalog systole at ``x`` respects the upper bound ``bound``."""
    return systole(x, system=system).value <= bound


def twist_escape_probe(C, x: FNPoint, t_max: float = 50.0, steps: int = 5,
                       system: CurveSystem | None = None) -> dict | None:
    """Look for a cuff twist leaving every length in ``C`` fixed.

    Such a twist moves ``x`` arbitrarily far while the lengths of ``C`` stay
    constant, so the sublevel sets of ``max L(c)`` over ``C`` are not
    compact.  Returns ``None`` when every cuff meets some curve of ``C``.
    """
    system = system or default_catalog()
    curves = _curves(C, system)
    for idx, cuff in sorted(system.cuffs().items()):
        if any(system.intersection(c.id, cuff.id) for c in curves):
            continue
        base = lengths_at(x, curves, system)
        drift = 0.0
        for t in np.linspace(-t_max, t_max, 2 * steps + 1):
            moved = lengths_at(twist(x, idx, float(t)), curves, system)
            drift = max(drift, max(abs(moved[k] - base[k]) for k in base))
        return {"cuff": idx, "t_max": t_max, "max_length_drift": drift}
    return None
