import itertools

import pytest

from systolelab.curves import (CurveClass, dual_curve, fills, filling_subsets, load_catalog, minimal_filling,
                               minimal_filling_subsets, parse_catalog)
from systolelab.errors import CatalogError, CatalogIncomplete, EmptySystem, NotFilling

IDS = ("c1", "c2", "c3", "c4", "c5", "c6")
QUADRUPLES = {frozenset(IDS[(i + k) % 6] for k in range(4)) for i in range(6)}


def oracle_fills(system, sub):
    """Independent face count: darts from raw strand tokens, faces as orbits of alpha o sigma^-1."""
    keep = set(sub)
    rot = {v: cyc for v, cyc in system.rotation.items() if {t.split(".")[0] for t in cyc} <= keep}
    # darts at each vertex, in rotation order
    ends = {}
    for v, cyc in system.rotation.items():
        for k, t in enumerate(cyc):
            ends.setdefault(t, []).append((v, k))

    def along(v, k):
        """Walk the strand leaving dart (v, k) to the next kept vertex."""
        while True:
            t = system.rotation[v][k]
            (v1, k1), (v2, k2) = ends[t]
            v, k = (v2, k2) if (v1, k1) == (v, k) else (v1, k1)
            if v in rot:
                return v, k
            k = (k + 2) % 4

    alpha = {(v, k): along(v, k) for v in rot for k in range(4)}
    face_of = {}
    faces = 0
    # reversed traversal order: step backwards around the vertex, then across the edge
    for d in sorted(alpha):
        if d in face_of:
            continue
        faces += 1
        while d not in face_of:
            face_of[d] = faces
            d = alpha[(d[0], (d[1] - 1) % 4)]
    V = len(rot)
    E = len(alpha) // 2
    # connectivity by search over edges
    comp, todo = set(), [next(iter(rot))] if rot else []
    while todo:
        v = todo.pop()
        if v in comp:
            continue
        comp.add(v)
        todo.extend(alpha[(v, k)][0] for k in range(4))
    isolated = [c for c in sub if not any(system.intersection(c, o) for o in sub)]
    ok = bool(rot) and not isolated and len(comp) == V and V - E + faces == -2
    return ok, V, E, faces


def test_catalog_structure(system):
    assert system.ids == IDS
    assert [c.id for c in system.cuffs().values()] == ["c1", "c3", "c5"]
    for i, j in itertools.combinations(range(6), 2):
        want = 1 if (j - i) % 6 in (1, 5) else 0
        assert system.intersection(IDS[i], IDS[j]) == want == system.intersection(IDS[j], IDS[i])
    assert all(system.intersection(c, c) == 0 for c in IDS)


def test_full_system_face_count(system):
    r = fills(system, IDS)
    assert (r.V, r.E, r.F, r.euler, r.fills) == (6, 12, 4, -2, True)
    assert r.E == 2 * r.V


def test_examples(system):
    assert not fills(system, ["c1"]).fills
    assert fills(system, ["c1"]).isolated == ("c1",)
    assert fills(system, ["c1", "c2", "c3", "c4"]).fills
    assert minimal_filling(system, ["c1", "c2", "c3", "c4"])
    assert not minimal_filling(system, IDS)
    with pytest.raises(NotFilling):
        minimal_filling(system, ["c1", "c2", "c3"])
    with pytest.raises(EmptySystem):
        fills(system, [])
    assert fills(system, ["c1", "c2", "c3", "c4"], check_minimal=True).minimal


def test_brute_force_against_oracle(system):
    for r in range(1, 7):
        for sub in itertools.combinations(IDS, r):
            rep = fills(system, sub)
            ok, V, E, F = oracle_fills(system, sub)
            assert rep.fills == ok, sub
            if V:
                assert (rep.V, rep.E, rep.F) == (V, E, F), sub
            assert rep.E == 2 * rep.V
            assert rep.euler == rep.V - rep.E + rep.F


def test_minimal_filling_sets(system):
    assert {frozenset(s) for s in minimal_filling_subsets(system)} == QUADRUPLES
    filling = {frozenset(s) for s in filling_subsets(system)}
    # the hand rule: fills iff it contains four cyclically consecutive curves
    for r in range(1, 7):
        for sub in itertools.combinations(IDS, r):
            assert (frozenset(sub) in filling) == any(q <= set(sub) for q in QUADRUPLES)


def test_dual_curves(system):
    d = dual_curve(system, "c1", ["c1", "c2", "c3", "c4"])
    assert system.intersection(d.id, "c1") == 1
    assert all(system.intersection(d.id, o) == 0 for o in ("c2", "c3", "c4"))
    d = dual_curve(system, "c1", ["c1"])
    assert system.intersection(d.id, "c1") == 1
    with pytest.raises(CatalogIncomplete):
        dual_curve(system, "c1", IDS)


def test_word_validation():
    with pytest.raises(CatalogError):
        CurveClass("x", ())
    with pytest.raises(CatalogError):
        CurveClass("x", ("a1", "b1", "A1"))


CAT = """
[CURVES]
p = a1   | cuff=1
q = b1
[INTERSECT]
p q
[ROTATION]
v: p.a q.a p.a q.a
"""


def test_parser_strictness(tmp_path):
    s = parse_catalog(CAT)
    assert s.ids == ("p", "q") and s.intersection("p", "q") == 1
    with pytest.raises(CatalogError):
        parse_catalog(CAT + "[EXTRA]\n")
    with pytest.raises(CatalogError):
        parse_catalog(CAT.replace("v: p.a q.a p.a q.a", "v: p.a p.a q.a q.a"))
    with pytest.raises(CatalogError):
        parse_catalog(CAT.replace("p q\n", ""))
    f = tmp_path / "x.cat"
    f.write_text(CAT)
    assert load_catalog(f).ids == ("p", "q")
