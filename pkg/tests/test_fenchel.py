import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import random_points
from systolelab.fenchel import (FNPoint, STANDARD_DECOMPOSITION, PantsDecomposition, build_holonomy,
                                invert_word, parse_word, twist)
from systolelab.hypkernel import trace_to_length

lengths3 = st.tuples(*[st.floats(0.5, 3.0)] * 3)
twists3 = st.tuples(*[st.floats(-2.0, 2.0)] * 3)


def test_fnpoint_validation():
    with pytest.raises(ValueError):
        FNPoint((1.0, 0.0, 1.0))
    with pytest.raises(ValueError):
        FNPoint((1.0, 1.0, 1.0), (0.0, math.nan, 0.0))
    with pytest.raises(ValueError):
        FNPoint.from_array([1, 2, 3])
    x = FNPoint((1.0, 2.0, 3.0), (0.1, 0.2, 0.3))
    assert FNPoint.from_json(x.to_json()) == x
    assert np.array_equal(FNPoint.from_array(x.as_array()).as_array(), x.as_array())


def test_words():
    assert parse_word("B1 a2 b2 A2") == ("B1", "a2", "b2", "A2")
    assert invert_word(parse_word("B1 a2 b2 A2")) == ("a2", "B2", "A2", "b1")
    with pytest.raises(ValueError):
        parse_word("a3")


def test_only_standard_decomposition():
    with pytest.raises(ValueError):
        build_holonomy(FNPoint((1.0, 1.0, 1.0)), PantsDecomposition("other", ("a1", "b1", "a2")))


@pytest.mark.parametrize("l", [0.5, 1.0, 2 * math.acosh(2.0), 4.0])
def test_symmetric_cuff_traces(l):
    hol = build_holonomy(FNPoint((l, l, l)))
    for i in (1, 2, 3):
        assert abs(hol.trace(STANDARD_DECOMPOSITION.cuff_words[i - 1])) == pytest.approx(2 * math.cosh(l / 2), abs=1e-8)


@given(lengths3, twists3)
def test_holonomy_invariants(ls, ts):
    hol = build_holonomy(FNPoint(ls, ts))
    for i in (1, 2, 3):
        tr = abs(hol.cuff(i).trace())
        assert tr == pytest.approx(2 * math.cosh(ls[i - 1] / 2), abs=1e-8)
        assert trace_to_length(tr) == pytest.approx(ls[i - 1], abs=1e-8)
    r = hol.relator()
    sign = math.copysign(1.0, r.trace())
    assert max(abs(r.a - sign), abs(r.b), abs(r.c), abs(r.d - sign)) <= 1e-8
    assert abs(abs(r.trace()) - 2.0) <= 1e-7


def test_relator_at_random_points():
    for x in random_points(100, 11):
        assert abs(abs(build_holonomy(x).relator().trace()) - 2.0) <= 1e-7


@given(lengths3, twists3, st.integers(1, 3))
def test_full_twist_keeps_cuff_traces(ls, ts, i):
    x = FNPoint(ls, ts)
    y = twist(x, i, ls[i - 1])
    h0, h1 = build_holonomy(x), build_holonomy(y)
    for k in (1, 2, 3):
        assert abs(h1.cuff(k).trace()) == pytest.approx(abs(h0.cuff(k).trace()), abs=1e-8)


@given(lengths3, twists3, st.integers(1, 3), st.floats(-3, 3), st.floats(-3, 3))
def test_twist_flow(ls, ts, i, s, t):
    x = FNPoint(ls, ts)
    assert twist(x, i, 0.0) == x
    a, b = twist(twist(x, i, s), i, t), twist(x, i, s + t)
    assert np.allclose(a.as_array(), b.as_array(), atol=1e-12)
    other = [k for k in range(3) if k != i - 1]
    assert all(a.twists[k] == x.twists[k] for k in other) and a.lengths == x.lengths
    with pytest.raises(ValueError):
        twist(x, 4, 1.0)


def test_holonomy_continuity():
    h = 1e-6
    for x in random_points(10, 12):
        base = build_holonomy(x)
        for k in range(6):
            e = np.zeros(6)
            e[k] = h
            moved = build_holonomy(FNPoint.from_array(x.as_array() + e))
            for g in ("a1", "b1", "a2", "b2"):
                m0, m1 = base.letter(g), moved.letter(g)
                jump = max(abs(u - v) for u, v in zip((m0.a, m0.b, m0.c, m0.d), (m1.a, m1.b, m1.c, m1.d)))
                assert jump <= 10 * h * max(1.0, m0.max_abs())


def test_wide_and_float_words_agree():
    hol = build_holonomy(FNPoint((1.2, 2.1, 1.7), (0.3, -0.4, 0.9)))
    for w in ("a1", "B1 a2 b2 A2", "b2 a2 B2 A2 b1", "a1 a2 b1"):
        assert hol.trace(w) == pytest.approx(hol.word(w).trace(), rel=1e-9)
