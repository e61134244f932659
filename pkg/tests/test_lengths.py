import itertools
import math

import numpy as np
import pytest

from conftest import SCHMUTZ_LENGTH, random_points
from systolelab.errors import AngleSearchFailed, WeightMismatch
from systolelab.fenchel import FNPoint, build_holonomy, invert_word, twist
from systolelab.lengths import (WeightVector, bers_check, crossing_count, gradients, length, lengths_at, systole,
                                twist_derivative, twist_escape_probe, weighted_length, wolpert_check)
from systolelab.optimize import DEFAULT_BOX

# sign of the cuff word in the Dehn-twist image c -> c k^sign of a full positive twist
DEHN = {("c2", 1): 1, ("c2", 2): -1, ("c4", 2): -1, ("c4", 3): 1, ("c6", 1): -1, ("c6", 3): 1}


def crossing_pairs(system):
    return [(c.id, i) for c in system.curves for i, k in system.cuffs().items()
            if system.intersection(c.id, k.id) == 1]


def disjoint_pairs(system):
    return [(c.id, i) for c in system.curves for i, k in system.cuffs().items()
            if system.intersection(c.id, k.id) == 0]


def test_cuff_lengths(system):
    for x in random_points(10, 1):
        for i, k in system.cuffs().items():
            assert length(k, x) == pytest.approx(x.lengths[i - 1], abs=1e-8)


def test_schmutz_lengths(system, schmutz):
    ls = lengths_at(schmutz)
    assert all(v == pytest.approx(SCHMUTZ_LENGTH, abs=1e-4) for v in ls.values())
    A = WeightVector.uniform(system.ids)
    assert weighted_length(A, None, schmutz) == pytest.approx(SCHMUTZ_LENGTH, abs=1e-4)


def test_dehn_twist_images(system):
    assert set(DEHN) == set(crossing_pairs(system))
    for x in random_points(10, 2):
        hol = build_holonomy(x)
        for (cid, i), sign in DEHN.items():
            k = system.cuffs()[i].word
            image = system[cid].word + (k if sign > 0 else invert_word(k))
            assert length(cid, twist(x, i, x.lengths[i - 1])) == pytest.approx(hol.length(image), abs=1e-9)
        for cid, i in disjoint_pairs(system):
            assert length(cid, twist(x, i, x.lengths[i - 1])) == pytest.approx(length(cid, x), abs=1e-9)


def test_twist_invariance_of_disjoint_curves(system):
    for x in random_points(50, 3):
        for cid, i in disjoint_pairs(system):
            L0 = length(cid, x)
            for t in (0.3, -0.3, 1.7, -1.7):
                assert abs(length(cid, twist(x, i, t)) - L0) <= 1e-9


def test_weighted_length(system):
    x = random_points(1, 4)[0]
    assert weighted_length(WeightVector(("c2",), (1.0,)), ["c2"], x) == pytest.approx(length("c2", x))
    A = WeightVector(("c1", "c2"), (0.3, 0.9))
    assert weighted_length(A.scaled(2.0), ["c1", "c2"], x) == pytest.approx(2 * weighted_length(A, ["c1", "c2"], x))
    with pytest.raises(WeightMismatch):
        weighted_length(A, ["c1", "c3"], x)
    with pytest.raises(WeightMismatch):
        WeightVector(("c1",), (1.0, 2.0))
    with pytest.raises(ValueError):
        WeightVector(("c1",), (0.0,))
    assert sum(WeightVector(("a", "b"), (1.0, 3.0), normalized=True).weights) == pytest.approx(1.0)


def test_systole_examples(system, schmutz):
    s = systole(schmutz)
    assert set(s.systoles) == set(system.ids) and s.value == pytest.approx(SCHMUTZ_LENGTH, abs=1e-4)
    assert systole(FNPoint((0.3, 2.0, 2.5), (0.2, -0.1, 0.4))).systoles == ("c1",)
    for x in random_points(20, 5):
        assert systole(x, 1e-6).systoles == systole(x, 1e-9).systoles
        s = systole(x)
        assert all(s.value <= v for v in lengths_at(x).values())
    with pytest.raises(ValueError):
        systole(schmutz, 1e-2)


def test_bers_bound_over_box():
    rng = np.random.default_rng(6)
    for _ in range(100):
        assert bers_check(FNPoint.from_array(DEFAULT_BOX.sample(rng)), 6.0)


def test_gradient_rows(system):
    for x in random_points(5, 7):
        gs = gradients(system.ids, x)
        for i, k in system.cuffs().items():
            e = np.zeros(6)
            e[i - 1] = 1.0
            assert np.abs(gs.row(k.id) - e).max() <= 1e-6
        for cid, i in disjoint_pairs(system):
            assert abs(gs.row(cid)[2 + i]) <= 1e-9
        assert gs.subset(["c2"]).rows.shape == (1, 6)
        assert not gs.rows.flags.writeable
    with pytest.raises(ValueError):
        gradients(["c1"], x, 1e-2)


def test_richardson(system):
    """Central differences at h and h/2 differ as the h^2 error model predicts."""
    h = 5e-4
    for x in random_points(20, 8):
        d = {s: gradients(system.ids, x, s).rows for s in (2 * h, h, h / 2)}
        predicted = np.abs(d[2 * h] - d[h]) / 4.0
        observed = np.abs(d[h] - d[h / 2])
        assert np.all(observed <= 4.0 * predicted + 1e-9)


def test_crossing_counts_match_table(system):
    x = FNPoint((1.7, 2.2, 1.9), (0.37, -0.21, 0.55))
    hol = build_holonomy(x)
    for a, b in itertools.combinations(system.ids, 2):
        n = crossing_count(hol, system[a].word, system[b].word, radius=4)
        assert n == system.intersection(a, b), (a, b)


def test_wolpert_generic(system):
    for x in random_points(20, 9):
        for cid, i in crossing_pairs(system):
            r = wolpert_check(cid, i, x)
            assert abs(abs(r.fd) - abs(r.anglesum)) <= 1e-4
            assert r.residual <= 1e-4
        for cid, i in disjoint_pairs(system):
            r = wolpert_check(cid, i, x)
            assert abs(r.fd) <= 1e-9 and r.anglesum == 0.0 and r.angle is None


def test_wolpert_right_angles(system, schmutz):
    for cid, i in crossing_pairs(system):
        r = wolpert_check(cid, i, schmutz)
        assert abs(r.fd) <= 1e-4 and abs(r.anglesum) <= 1e-4
        assert r.angle == pytest.approx(math.pi / 2, abs=1e-6)


def test_wolpert_search_radius(system):
    x = random_points(2, 9)[1]
    with pytest.raises(AngleSearchFailed):
        wolpert_check("c4", 3, x, radius=0)
    assert wolpert_check("c4", 3, x, radius=3).residual <= 1e-4


def test_convexity_along_segments(system):
    rng = np.random.default_rng(10)
    lo, hi = np.array([0.5, 0.5, 0.5, -2, -2, -2]), np.array([3, 3, 3, 2, 2, 2])
    for _ in range(50):
        a, b = rng.uniform(lo, hi), rng.uniform(lo, hi)
        ts = np.linspace(0.0, 1.0, 7)
        vals = np.array([list(lengths_at(FNPoint.from_array(a + t * (b - a))).values()) for t in ts])
        second = vals[:-2] - 2 * vals[1:-1] + vals[2:]
        assert second.min() >= -1e-7


def test_twist_escape_probe(system):
    x = FNPoint((1.5, 1.5, 1.5))
    probe = twist_escape_probe(["c1"], x)
    assert probe["cuff"] == 1 and probe["max_length_drift"] <= 1e-9
    assert twist_escape_probe(system.ids, x) is None
    assert twist_derivative("c1", 1, x) == pytest.approx(0.0, abs=1e-9)
