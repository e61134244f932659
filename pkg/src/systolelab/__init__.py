"""Numerical experiments on the systole function of genus-2 hyperbolic surfaces.

Fenchel-Nielsen coordinates are turned into holonomy matrices, lengths of a
catalog of closed curves are read off from traces, and the critical points
of the systole are located and classified with small linear programs.
"""
__version__ = "0.1.0"

from .curves import CurveClass, CurveSystem, default_catalog, fills, load_catalog
from .fenchel import FNPoint, build_holonomy, twist
from .hypkernel import Mat2, hexagon_solve
from .lengths import WeightVector, gradients, length, lengths_at, systole
from .cones import ConeProblem, full_cone_exists, is_balanced, is_eutactic, is_V_eutactic, rank_and_index
from .optimize import LocusSpec, classify_locus, classify_point, minimize_weighted, restricted_minimize

__all__ = [
    "ConeProblem", "CurveClass", "CurveSystem", "FNPoint", "LocusSpec", "Mat2", "WeightVector",
    "build_holonomy", "classify_locus", "classify_point", "default_catalog", "fills", "full_cone_exists",
    "gradients", "hexagon_solve", "is_V_eutactic", "is_balanced", "is_eutactic", "length", "lengths_at",
    "load_catalog", "minimize_weighted", "rank_and_index", "restricted_minimize", "systole", "twist",
]
