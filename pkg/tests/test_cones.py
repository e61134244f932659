import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from systolelab.cones import (ConeProblem, descendents, descendents_from_problem, full_cone_exists, is_balanced,
                              is_eutactic, is_V_eutactic, locus_tangent, mixed_cone_exists, orthogonal_complement,
                              rank_and_index)
from systolelab.errors import DegenerateGradient, EmptySubspace, NotCritical
from systolelab.lengths import gradients
from systolelab.optimize import sample_stratum
from systolelab.testbed import analytic_gradients

C1 = ("c1", "c2", "c3", "c4")


def P(rows, **kw):
    return ConeProblem(np.array(rows, dtype=float), **kw)


def check_certificate(cert, G, tol=1e-9):
    """Re-substitute the witness into its defining inequalities."""
    G = np.asarray(G, dtype=float)
    if cert.kind == "coefficients":
        lam = cert.witness
        assert lam.min() >= -1e-12 and lam.sum() == pytest.approx(1.0)
        assert np.linalg.norm(lam @ G) <= tol * max(1.0, np.abs(G).max())
        if cert.query != "full_cone":
            assert lam.min() >= 1e-9
    else:
        ev = G @ cert.witness
        if cert.query in ("full_cone", "mixed_cone", "decrease_cone"):
            assert ev.min() >= 1.0 - 1e-9
        else:
            assert ev.min() >= -1e-9 * np.linalg.norm(cert.witness) and ev.max() > 0


def test_full_cone_examples():
    c = full_cone_exists(P([[1, 0], [0, 1]]))
    assert c.verdict is True and np.all(np.array([[1, 0], [0, 1]]) @ c.witness >= 1 - 1e-12)
    c = full_cone_exists(P([[1, 0], [-1, 0]]))
    assert c.verdict is False and c.witness == pytest.approx([0.5, 0.5])
    with pytest.raises(DegenerateGradient):
        P([[0, 0], [1, 0]])


def test_mixed_cone_examples():
    assert mixed_cone_exists(P([[1, 0], [1, 0]], sense=(-1, 1))).verdict is False
    assert mixed_cone_exists(P([[1, 0], [0, 1]], sense=(-1, 1))).verdict is True
    with pytest.raises(ValueError):
        mixed_cone_exists(P([[1, 0], [0, 1]]))


def test_testbed_cones():
    rng = np.random.default_rng(1)
    for _ in range(20):
        G = analytic_gradients(rng.uniform(-2, 2, 4))
        assert full_cone_exists(P(G)).verdict is True
        for i in range(4):
            s = [1] * 4
            s[i] = -1
            assert mixed_cone_exists(P(G, sense=tuple(s))).verdict is True


def test_eutactic_examples():
    c = is_eutactic(P([[1, 0], [-1, 0], [0, 1], [0, -1]]))
    assert c.verdict is True and c.witness == pytest.approx([0.25] * 4)
    c = is_eutactic(P([[1, 0], [0, 1]]))
    assert c.verdict is False and c.kind == "direction"
    check_certificate(c, [[1, 0], [0, 1]])


def test_v_eutactic_examples():
    rows = [[1, 1], [-1, 1]]
    assert is_V_eutactic(P(rows), V=[[0, 1]]).verdict is False
    assert is_V_eutactic(P(rows), V=[[1, 0]]).verdict is True
    assert is_eutactic(P(rows, V=[[1, 0]])).verdict is True
    with pytest.raises(EmptySubspace):
        P(rows, V=np.zeros((1, 2)))


def test_balanced_examples():
    c = is_balanced(P([[1, 1], [-1, 1]]))
    assert c.verdict is True and c.extra["v_C"] == pytest.approx([0, 1]) and c.witness == pytest.approx([0.5, 0.5])
    assert is_balanced(P([[1, 0], [2, 0]])).verdict is False
    with pytest.raises(EmptySubspace):
        is_balanced(P([[1, 0], [0, 1], [1, 1]]), tangent=np.zeros((1, 2)))


def test_rank_examples():
    r = rank_and_index([[1, 0, 0], [0, 1, 0]])
    assert (r.rank, r.h_property) == (2, True)
    assert r.index == r.rank
    x = np.array([0.3, 0.7, -0.2, 0.7])
    r = rank_and_index(analytic_gradients(x))
    assert (r.rank, r.h_property) == (3, False)


def test_simplex_descendent():
    rows = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float)
    rep = descendents_from_problem(P(rows))
    assert rep.descendents == (("r0", "r1", "r2", "r3"),) and rep.subdescendents == ()
    assert rep.index == 3 and rep.cardinality_ok
    with pytest.raises(NotCritical):
        descendents_from_problem(P([[1, 0], [0, 1]]))


def test_schmutz_cones(schmutz, system):
    gs = gradients(None, schmutz)
    cert = is_eutactic(ConeProblem.from_gradients(gs))
    assert cert.verdict is True
    check_certificate(cert, gs.rows)
    rep = descendents(system.ids, schmutz)
    quads = {frozenset(system.ids[(i + k) % 6] for k in range(4)) for i in range(6)}
    assert {frozenset(d) for d in rep.descendents} == quads
    assert rep.subdescendents == () and rep.cardinality_ok
    # every five-curve complement contains a eutactic quadruple, so no direction
    # can lengthen those five while shortening the sixth
    for c in system.ids:
        ids = (c,) + tuple(o for o in system.ids if o != c)
        cert = mixed_cone_exists(ConeProblem.from_gradients(gs, ids, (-1,) + (1,) * 5))
        assert cert.verdict is False and cert.kind == "coefficients"


def test_sys_c1_probes(schmutz):
    pts = sample_stratum(C1, schmutz, np.random.default_rng(0), 10)
    assert len(pts) == 10
    for x in pts:
        gs = gradients(C1, x)
        prob = ConeProblem.from_gradients(gs)
        bal = is_balanced(prob, locus_tangent(gs.rows))
        assert bal.verdict is True and bal.extra["tangent_defect"] <= 1e-8
        check_certificate(bal, gs.rows @ orthogonal_complement(locus_tangent(gs.rows), 6).T)
        V = orthogonal_complement(bal.extra["v_C"][None, :], 6)
        assert is_V_eutactic(prob, V=V).verdict is True
        assert is_eutactic(prob).verdict is False


def _random_rows(rng, n, k):
    return rng.normal(size=(k, n))


def test_duality_exclusivity():
    rng = np.random.default_rng(2)
    for _ in range(500):
        n, k = int(rng.integers(1, 7)), int(rng.integers(1, 13))
        G = _random_rows(rng, n, k)
        for query in (full_cone_exists, is_eutactic):
            c = query(P(G))
            assert c.verdict is not None
            assert (c.kind == "direction") == (c.verdict is (query is full_cone_exists))
            check_certificate(c, G)


def _sampling_not_eutactic(G, rng, n=10_000):
    """True when some direction strictly increases every row.

    Dense sampling first; the best samples are then polished by Nelder-Mead on
    the worst normalized row value, which catches thin cones that a uniform
    grid of 10^4 directions misses.  Independent of the LP code.
    """
    from scipy.optimize import minimize

    Gn = G / np.linalg.norm(G, axis=1)[:, None]
    v = rng.normal(size=(n, G.shape[1]))
    v /= np.linalg.norm(v, axis=1)[:, None]
    margin = (v @ Gn.T).min(axis=1)
    if margin.max() > 0:
        return True

    def worst(w):
        return -(Gn @ w).min() / max(np.linalg.norm(w), 1e-300)

    for start in v[np.argsort(margin)[-20:]]:
        r = minimize(worst, start, method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
        if -r.fun > 1e-9:
            return True
    return False


def test_eutactic_sampling_oracle():
    rng = np.random.default_rng(3)
    for i in range(100):
        n = 2 + i % 2
        G = _random_rows(rng, n, int(rng.integers(2, 7)))
        assert is_eutactic(P(G)).verdict is (not _sampling_not_eutactic(G, rng))


@given(st.integers(0, 10_000))
def test_scaling_invariance(seed):
    rng = np.random.default_rng(seed)
    n, k = int(rng.integers(1, 5)), int(rng.integers(1, 8))
    G = rng.normal(size=(k, n))
    S = G * rng.uniform(0.01, 100.0, k)[:, None]
    for q in (full_cone_exists, is_eutactic):
        assert q(P(G)).verdict == q(P(S)).verdict
    V = rng.normal(size=(max(1, n - 1), n))
    assert is_V_eutactic(P(G), V=V).verdict == is_V_eutactic(P(S), V=V).verdict


def test_certificate_json():
    c = is_eutactic(P([[1, 0], [-1, 0]]))
    d = c.to_json()
    assert d["verdict"] == "true" and d["kind"] == "coefficients" and len(d["witness"]) == 2
