import numpy as np
import pytest

from conftest import SCHMUTZ_LENGTH, random_points
from systolelab import FNPoint
from systolelab.cones import ConeProblem, is_eutactic
from systolelab.errors import DivergedAsExpected, NotFilling
from systolelab.lengths import WeightVector, gradients, lengths_at
from systolelab.optimize import (LocusSpec, classify_locus, classify_point, min_cell_probe, minimize_weighted,
                                 project_to_locus, restricted_minimize, sample_stratum)

SIX = ("c1", "c2", "c3", "c4", "c5", "c6")
C1 = ("c1", "c2", "c3", "c4")
START = FNPoint((2.0, 3.0, 2.4), (0.4, -0.3, 0.2))


@pytest.fixture(scope="module")
def six_min(system):
    return minimize_weighted(WeightVector.uniform(SIX), SIX, START, system=system)


def test_six_uniform_minimum(six_min):
    assert six_min.converged
    ls = np.array(list(lengths_at(six_min.point).values()))
    assert np.ptp(ls) <= 1e-4 and ls.mean() == pytest.approx(SCHMUTZ_LENGTH, abs=1e-4)
    assert is_eutactic(ConeProblem.from_gradients(gradients(SIX, six_min.point))).verdict is True


def test_descent_monotone(six_min):
    h = np.array(six_min.history)
    assert np.all(np.diff(h) < 0)


def test_stationarity(six_min):
    A = WeightVector.uniform(SIX).as_array()
    assert np.linalg.norm(A @ gradients(SIX, six_min.point).rows) <= 1e-6


def test_doubled_weights_same_argmin(six_min):
    res = minimize_weighted(WeightVector.uniform(SIX).scaled(2.0), SIX, START)
    assert np.linalg.norm(res.point.as_array() - six_min.point.as_array()) <= 1e-6


def test_weight_continuity(schmutz):
    rng = np.random.default_rng(4)
    w = 1.0 + 1e-4 * rng.uniform(-1, 1, 6)
    res = minimize_weighted(WeightVector(SIX, tuple(w)), SIX, schmutz, tol=1e-9)
    assert res.converged
    assert np.linalg.norm(res.point.as_array() - schmutz.as_array()) <= 1e-2


def test_single_cuff_diverges():
    with pytest.warns(RuntimeWarning), pytest.raises(DivergedAsExpected) as exc:
        minimize_weighted(WeightVector.uniform(("c1",)), ("c1",), START)
    assert exc.value.point.lengths[0] < START.lengths[0]


def test_restricted_uniqueness():
    spec = LocusSpec(C1, (0, 0, 0, 0))
    a = restricted_minimize(spec, FNPoint((2.0, 2.0, 2.0), (0.5, 0.5, 0.5)))
    b = restricted_minimize(spec, FNPoint((3.2, 2.8, 3.0), (-1.0, -0.6, 0.8)))
    assert a.converged and b.converged and a.residual <= 1e-9 and b.residual <= 1e-9
    assert np.linalg.norm(a.point.as_array() - b.point.as_array()) <= 1e-5


def test_restricted_six_curves():
    res = restricted_minimize(LocusSpec(SIX, (0,) * 6), START)
    assert res.residual <= 1e-9
    assert res.value == pytest.approx(SCHMUTZ_LENGTH, abs=1e-4)


def test_restricted_two_disjoint_curves():
    spec = LocusSpec(("c1", "c3"), (0, 0))
    x0 = FNPoint((2.2, 2.8, 2.5), (0.2, 0.1, -0.2))
    res = restricted_minimize(spec, x0, max_iter=30)
    ls = lengths_at(res.point)
    assert ls["c1"] == pytest.approx(ls["c3"], abs=1e-9)
    # second difference of L(c1) along a locus tangent direction
    x = res.point.as_array()
    rows = gradients(spec.C, res.point).rows
    diff = rows[1] - rows[0]
    rng = np.random.default_rng(0)
    for _ in range(5):
        v = rng.normal(size=6)
        v -= (v @ diff) / (diff @ diff) * diff
        v /= np.linalg.norm(v)
        t = 1e-2
        vals = []
        for s in (-t, 0.0, t):
            y = project_to_locus(spec, x + s * v)
            vals.append(lengths_at(FNPoint.from_array(y))["c1"])
        assert vals[0] - 2 * vals[1] + vals[2] >= -1e-7


@pytest.mark.parametrize("h", [1e-4, 1e-5, 1e-6])
def test_classify_schmutz(schmutz, h):
    rep = classify_point(schmutz, h=h)
    assert rep.kind == "critical" and rep.index == 3 and set(rep.systoles) == set(SIX)


def test_classify_random_regular():
    for x in random_points(3, 11):
        rep = classify_point(x)
        if rep.kind == "regular":
            cert = rep.certificates["full_cone"]
            assert cert.verdict is True
            G = gradients(rep.systoles, x).rows
            assert np.all(G @ cert.witness >= 1 - 1e-9)
        else:
            assert rep.kind in ("boundary", "critical")
    assert any(classify_point(x).kind == "regular" for x in random_points(3, 11))


def test_classify_sys_c1_regular(schmutz):
    pts = sample_stratum(C1, schmutz, np.random.default_rng(0), 3)
    for x in pts:
        rep = classify_point(x)
        assert rep.kind == "regular" and set(rep.systoles) == set(C1)


def test_classify_locus_inner():
    rng = np.random.default_rng(5)
    for _ in range(2):
        xs = FNPoint.from_array(rng.uniform((2, 2, 2, -0.5, -0.5, -0.5), (3, 3, 3, 0.5, 0.5, 0.5)))
        ls = lengths_at(xs)
        d = tuple(ls[c] - ls["c1"] for c in C1)
        assert classify_locus(LocusSpec(C1, d), xs).label == "inner"
    assert classify_locus(LocusSpec(SIX, (0,) * 6), START).label == "inner"


def test_classify_locus_certificates_consistent():
    rng = np.random.default_rng(6)
    xs = FNPoint.from_array(rng.uniform((1.5, 1.5, 1.5, -1, -1, -1), (3.5, 3.5, 3.5, 1, 1, 1)))
    ls = lengths_at(xs)
    spec = LocusSpec(SIX, tuple(ls[c] - ls["c1"] for c in SIX))
    rep = classify_locus(spec, xs)
    G = gradients(SIX, rep.minimum.point).rows
    eut = rep.certificates["eutactic"]
    if rep.label == "inner":
        assert eut.verdict is True and np.linalg.norm(eut.witness @ G) <= 1e-8
    elif rep.label == "outer":
        assert eut.verdict is False
        down = rep.certificates["decrease_cone"]
        assert down.verdict is True and np.all(-G @ down.witness >= 1 - 1e-9)
    else:
        assert rep.label == "borderline"


def test_classify_locus_not_filling():
    with pytest.raises(NotFilling):
        classify_locus(LocusSpec(("c1", "c3"), (0, 0)))


def test_min_cell_probe(schmutz):
    p = min_cell_probe(SIX, schmutz)
    assert p.jacobian_rank == 3 and p.kernel_dim == 3 and p.argmin_span_dim == 3
