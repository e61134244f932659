"""Locate the six-systole critical point of genus 2 and look at it.

Start from an arbitrary surface, minimize the sum of the six catalog curve
lengths, then ask the cone machinery what kind of point we landed on.
"""
import math

import numpy as np

from systolelab import FNPoint, WeightVector, classify_point, default_catalog, gradients, lengths_at, minimize_weighted
from systolelab.cones import ConeProblem, descendents_from_problem
from systolelab.lengths import wolpert_check
from systolelab.optimize import min_cell_probe

system = default_catalog()
ids = system.ids
start = FNPoint((2.0, 3.0, 2.4), (0.4, -0.3, 0.2))
print("start lengths:", {k: round(v, 4) for k, v in lengths_at(start).items()})

res = minimize_weighted(WeightVector.uniform(ids), ids, start)
x = res.point
print(f"\nminimum after {res.iterations} iterations, |grad| = {res.gradient_norm:.1e}")
print("point:", np.round(x.as_array(), 10))
ls = lengths_at(x)
print(f"six lengths agree to {max(ls.values()) - min(ls.values()):.1e}; "
      f"value {np.mean(list(ls.values())):.12f} vs 2 arccosh 2 = {2 * math.acosh(2):.12f}")

# every non-cuff curve crosses its cuffs at right angles, so twists do nothing to first order
for c in system.curves:
    for i, cuff in system.cuffs().items():
        if system.intersection(c.id, cuff.id) == 1:
            print(f"  d L({c.id}) / d twist{i} = {wolpert_check(c, i, x).fd:+.1e}")

rep = classify_point(x)
print(f"\nclassification: {rep.kind}, gradient rank {rep.rank}, index {rep.index}")
lam = rep.certificates["eutactic"].witness
print("eutactic weights:", np.round(lam, 6))

desc = descendents_from_problem(ConeProblem.from_gradients(gradients(ids, x)))
print("descendents:", [" ".join(d) for d in desc.descendents])
print("subdescendents:", desc.subdescendents or "none")

probe = min_cell_probe(ids, x)
print(f"\nlength map rank {probe.jacobian_rank}, kernel dimension {probe.kernel_dim}; "
      f"moving the weights moves the minimizer in a {probe.argmin_span_dim}-dimensional family")
