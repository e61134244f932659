"""Equal-length loci near the critical point.

For the quadruple C1 = {c1, c2, c3, c4} the locus where their lengths agree
(up to fixed offsets) always meets Min(C1): a minimal filling set has only
inner loci.  We also sample the stratum where exactly C1 are systoles and
check that it is balanced there.
"""
import numpy as np

from systolelab import FNPoint, LocusSpec, classify_locus, classify_point, gradients, lengths_at
from systolelab.cones import ConeProblem, is_balanced, locus_tangent
from systolelab.optimize import sample_stratum

C1 = ("c1", "c2", "c3", "c4")
rng = np.random.default_rng(0)
for k in range(3):
    xs = FNPoint.from_array(rng.uniform((2, 2, 2, -0.5, -0.5, -0.5), (3, 3, 3, 0.5, 0.5, 0.5)))
    ls = lengths_at(xs)
    d = tuple(ls[c] - ls["c1"] for c in C1)
    rep = classify_locus(LocusSpec(C1, d), xs)
    lam = rep.certificates["eutactic"].witness
    print(f"offsets {np.round(d, 3)} -> {rep.label}, weights {np.round(lam, 3)}")

p = FNPoint((2 * np.arccosh(2.0),) * 3)
pts = sample_stratum(C1, p, np.random.default_rng(1), 4)
print(f"\n{len(pts)} points near the critical point whose systoles are exactly C1:")
for x in pts:
    gs = gradients(C1, x)
    bal = is_balanced(ConeProblem.from_gradients(gs), locus_tangent(gs.rows))
    kind = classify_point(x).kind
    print(f"  systole {min(lengths_at(x, C1).values()):.5f}: balanced {bal.verdict}, {kind}")
