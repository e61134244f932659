"""Genus-2 surfaces from Fenchel-Nielsen coordinates.

The pants decomposition is fixed: three non-separating cuffs ``k1, k2, k3``
bound two pairs of pants ``P1`` and ``P2``.  Each pants is the double of a
right-angled hexagon ``H`` whose alternate sides are the half-cuffs
``l1/2, l2/2, l3/2``.  The hexagon ``H`` of ``P1`` is placed with its first
vertex at ``i`` and its first side running up the imaginary axis.

``P2`` is glued to ``P1`` across cuff ``j`` by the orientation-reversing map
``M_j = T_j(tau_j) R_j``: reflection ``R_j`` in the line of cuff ``j``
followed by translation ``T_j`` along it.  With all twists zero the surface is
the double of ``P1`` and the three seams of ``P1`` close up with their mirror
images into closed geodesics meeting the cuffs orthogonally.

With ``X_j`` the holonomy of cuff ``j`` seen from ``P1`` and
``g_j = M_j M_1^-1`` the surface group is generated by::

    a1 = g3,   b1 = g2^-1 X2^-1 g2 X1^-1,   a2 = g2^-1,   b2 = X2^-1

and ``[a1, b1][a2, b2] = 1`` holds identically.  Cuff words are then::

    k1 = B1 a2 b2 A2,   k2 = B2,   k3 = b2 a2 B2 A2 b1

where capitals denote inverses.
"""
from __future__ import annotations

import decimal
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import NonHyperbolicElement
from .hypkernel import HYPERBOLIC_TOL, Mat2, hexagon_solve

GENERATORS = ("a1", "b1", "a2", "b2")

#: twist sign making the Wolpert derivative equal to +cos(angle from cuff to curve)
TWIST_SIGN = -1.0


@dataclass(frozen=True)
class FNPoint:
    """A point of genus-2 Teichmueller space: three cuff lengths and three twists."""

    lengths: tuple[float, float, float]
    twists: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        lengths = tuple(float(v) for v in self.lengths)
        twists = tuple(float(v) for v in self.twists)
        if len(lengths) != 3 or len(twists) != 3:
            raise ValueError("an FNPoint has exactly three lengths and three twists")
        if not all(v > 0.0 and math.isfinite(v) for v in lengths):
            raise ValueError(f"cuff lengths must be positive, got {lengths}")
        if not all(math.isfinite(v) for v in twists):
            raise ValueError(f"twists must be finite, got {twists}")
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "twists", twists)

    @classmethod
    def from_array(cls, x: Sequence[float]) -> FNPoint:
        x = [float(v) for v in x]
        if len(x) != 6:
            raise ValueError(f"expected 6 coordinates, got {len(x)}")
        return cls(tuple(x[:3]), tuple(x[3:]))

    def as_array(self) -> np.ndarray:
        return np.array(self.lengths + self.twists)

    def to_json(self) -> dict:
        return {"lengths": list(self.lengths), "twists": list(self.twists)}

    @classmethod
    def from_json(cls, obj: dict) -> FNPoint:
        return cls(tuple(obj["lengths"]), tuple(obj["twists"]))


def twist(x: FNPoint, cuff: int, t: float) -> FNPoint:
    """Flow for time ``t`` along the twist around cuff ``cuff`` (1-based)."""
    if cuff not in (1, 2, 3):
        raise ValueError(f"cuff index must be 1, 2 or 3, got {cuff}")
    tw = list(x.twists)
    tw[cuff - 1] += t
    return replace(x, twists=tuple(tw))


@dataclass(frozen=True)
class PantsDecomposition:
    """The hard-wired genus-2 gluing scheme described in the module docstring."""

    name: str
    cuff_words: tuple[str, str, str]


STANDARD_DECOMPOSITION = PantsDecomposition(
    name="theta-3",
    cuff_words=("B1 a2 b2 A2", "B2", "b2 a2 B2 A2 b1"),
)


def parse_word(word: str | Iterable[str]) -> tuple[str, ...]:
    """Split ``"B1 a2 b2 A2"`` into letters; capitals are inverses."""
    letters = tuple(word.split()) if isinstance(word, str) else tuple(word)
    for ch in letters:
        if ch.lower() not in GENERATORS:
            raise ValueError(f"unknown letter {ch!r} in word {word!r}")
    return letters


def invert_letter(ch: str) -> str:
    return ch.lower() if ch[0].isupper() else ch.upper()


def invert_word(word: Sequence[str]) -> tuple[str, ...]:
    return tuple(invert_letter(ch) for ch in reversed(word))


#: working precision (decimal digits) of the holonomy construction
WIDE_DIGITS = 40
_CTX = decimal.Context(prec=WIDE_DIGITS)
_D = _CTX.create_decimal
_ONE, _ZERO, _HALF = _D(1), _D(0), _D("0.5")


@dataclass(frozen=True)
class Holonomy:
    """Images of the standard generators ``a1, b1, a2, b2``.

    ``cuff_frames`` are the frames at the start of the three half-cuff sides
    of the first hexagon; they locate the cuff axes.  The generators are also
    kept at ``WIDE_DIGITS`` decimal digits (``wide``) for length evaluation:
    long words cancel through intermediate products of size 1e7 or more, which
    in double precision would swamp finite-difference derivatives.
    """

    point: FNPoint
    a1: Mat2
    b1: Mat2
    a2: Mat2
    b2: Mat2
    cuff_frames: tuple[Mat2, Mat2, Mat2]
    wide: dict = field(default_factory=dict, compare=False, repr=False)

    def letter(self, ch: str) -> Mat2:
        m = getattr(self, ch.lower())
        return m.inverse() if ch[0].isupper() else m

    def word(self, word: str | Sequence[str]) -> Mat2:
        out = Mat2.identity()
        for ch in parse_word(word):
            out = out @ self.letter(ch)
        return out

    def wide_word(self, word: str | Sequence[str]) -> tuple:
        out = (_ONE, _ZERO, _ZERO, _ONE)
        with decimal.localcontext(_CTX):
            for ch in parse_word(word):
                out = _w_mul(out, self.wide[ch])
        return out

    def trace(self, word: str | Sequence[str]) -> float:
        m = self.wide_word(word)
        return float(_CTX.add(m[0], m[3]))

    def length(self, word: str | Sequence[str]) -> float:
        """Translation length of the word, evaluated at the working precision."""
        m = self.wide_word(word)
        tr = abs(_CTX.add(m[0], m[3]))
        if not float(tr) > 2.0 + HYPERBOLIC_TOL:
            raise NonHyperbolicElement(f"|trace| = {float(tr)!r} is not > 2 for word {word!r}")
        with decimal.localcontext(_CTX):
            return float(2 * _w_acosh(tr / 2))

    def wide_matrix(self, word: str | Sequence[str]) -> Mat2:
        """The word evaluated at working precision, rounded once to double."""
        return Mat2(*(float(v) for v in self.wide_word(word)))

    def relator(self) -> Mat2:
        return self.wide_matrix("a1 b1 A1 B1 a2 b2 A2 B2")

    def cuff(self, i: int) -> Mat2:
        # double-precision products of the longer cuff words lose up to ~1e-4 at large twists
        return self.wide_matrix(STANDARD_DECOMPOSITION.cuff_words[i - 1])

    def generators(self) -> dict[str, Mat2]:
        return {g: getattr(self, g) for g in GENERATORS}


# 2x2 matrices at working precision, stored as tuples (a, b, c, d)

def _w_mul(m, n):
    a, b, c, d = m
    e, f, g, h = n
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def _w_inv(m):
    a, b, c, d = m
    return (d, -b, -c, a)


def _w_mirror(m):
    a, b, c, d = m
    return (a, -b, -c, d)


def _w_chain(*ms):
    out = ms[0]
    for m in ms[1:]:
        out = _w_mul(out, m)
    return out


def _w_translation(t):
    e = _CTX.exp(_D(t) / 2)
    return (e, _ZERO, _ZERO, _ONE / e)


def _w_acosh(y):
    return _CTX.ln(y + _CTX.sqrt(y * y - 1))


def _w_cosh_sinh(s):
    e = _CTX.exp(s)
    return (e + 1 / e) / 2, (e - 1 / e) / 2


_W_QUARTER_TURN = (_CTX.sqrt(_HALF), _CTX.sqrt(_HALF), -_CTX.sqrt(_HALF), _CTX.sqrt(_HALF))


def _w_reflection_product(f, g):
    return _w_chain(f, _w_mirror(_w_mul(_w_inv(f), g)), _w_inv(g))


def _w_hexagon(a, b, c) -> tuple:
    sides = [a, b, c]
    cs = [_w_cosh_sinh(s) for s in sides]
    opp = []
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        opp.append(_w_acosh((cs[i][0] + cs[j][0] * cs[k][0]) / (cs[j][1] * cs[k][1])))
    # boundary order a, c', b, a', c, b'
    return (sides[0], opp[2], sides[1], opp[0], sides[2], opp[1])


def _to_mat2(m) -> Mat2:
    return Mat2(*(float(v) for v in m))


@lru_cache(maxsize=4096)
def _holonomy_cached(lengths: tuple[float, float, float], twists: tuple[float, float, float]) -> Holonomy:
    hexagon_solve(*(0.5 * v for v in lengths))  # validates the side lengths
    with decimal.localcontext(_CTX):
        frames = []
        f = (_ONE, _ZERO, _ZERO, _ONE)
        for side in _w_hexagon(*(_D(v) / 2 for v in lengths)):
            frames.append(f)
            f = _w_chain(f, _w_translation(side), _W_QUARTER_TURN)
        # sides: 0 cuff1/2, 1 seam12, 2 cuff2/2, 3 seam23, 4 cuff3/2, 5 seam31
        x1 = _w_reflection_product(frames[5], frames[1])
        x2 = _w_reflection_product(frames[1], frames[3])
        shifts = [_w_chain(frames[k], _w_translation(_D(TWIST_SIGN) * _D(t)), _w_inv(frames[k]))
                  for k, t in zip((0, 2, 4), twists)]
        # g_j = T_j R_j R_1 T_1^-1
        t1_inv = _w_inv(shifts[0])
        g2 = _w_chain(shifts[1], _w_reflection_product(frames[2], frames[0]), t1_inv)
        g3 = _w_chain(shifts[2], _w_reflection_product(frames[4], frames[0]), t1_inv)
        g2_inv, x2_inv = _w_inv(g2), _w_inv(x2)
        gens = {"a1": g3, "b1": _w_chain(g2_inv, x2_inv, g2, _w_inv(x1)), "a2": g2_inv, "b2": x2_inv}
    wide = {}
    for k, m in gens.items():
        wide[k] = m
        wide[k.upper()] = _w_inv(m)
    return Holonomy(
        point=FNPoint(lengths, twists),
        a1=_to_mat2(gens["a1"]), b1=_to_mat2(gens["b1"]),
        a2=_to_mat2(gens["a2"]), b2=_to_mat2(gens["b2"]),
        cuff_frames=tuple(_to_mat2(frames[k]) for k in (0, 2, 4)),
        wide=wide,
    )


def build_holonomy(x: FNPoint, decomposition: PantsDecomposition = STANDARD_DECOMPOSITION) -> Holonomy:
    """Holonomy representation of the surface with Fenchel-Nielsen coordinates ``x``."""
    if decomposition is not STANDARD_DECOMPOSITION:
        raise ValueError("only the standard genus-2 decomposition is implemented")
    return _holonomy_cached(x.lengths, x.twists)


def cuff_axis_frame(hol: Holonomy, i: int) -> Mat2:
    """Frame whose image of the imaginary axis is the axis of cuff ``i``."""
    return hol.cuff_frames[i - 1]
