"""The closed-form four-function example in R^4.

    f1 = e^x1 + e^-x2    f2 = e^x2 + e^-x3
    f3 = e^-x3 + e^x4    f4 = e^-x4 + e^x1

The gradients are independent except on the hyperplane x2 = x4, yet at every
point some direction increases all four.  On the hyperplane, keeping f1 and
f2 fixed forces f3 and f4 to move in opposite directions.
"""
import numpy as np

from systolelab.cones import ConeProblem, full_cone_exists, is_V_eutactic, orthogonal_complement, rank_and_index
from systolelab.testbed import analytic_gradients, determinant, verify_claims

for x in ([0.0, 1.0, 0.0, 0.0], [0.3, -0.7, 1.1, -0.7]):
    x = np.array(x)
    G = analytic_gradients(x)
    cone = full_cone_exists(ConeProblem(G))
    print(f"x = {x}: det {determinant(x):+.4f}, rank {rank_and_index(G).rank}")
    print(f"   all-increase direction {np.round(cone.witness, 4)} gives rates {np.round(G @ cone.witness, 4)}")

x = np.array([0.3, -0.7, 1.1, -0.7])
G = analytic_gradients(x)
V = orthogonal_complement(G[:2], 4)
face = is_V_eutactic(ConeProblem(G[2:], ("f3", "f4")), V=V)
print(f"\non x2 = x4, with f1, f2 held fixed: f3/f4 opposed = {face.verdict}, weights {np.round(face.witness, 4)}")

rep = verify_claims(200, 7)
print("\nsampled checks:", ", ".join(f"{k} {v['pass']}/{v['total']}" for k, v in rep.checks.items()))
