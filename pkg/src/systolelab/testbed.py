"""Four explicit functions on R^4 whose gradients are independent except on ``x2 = x4``.

    f1 = e^{x1} + e^{-x2}     f2 = e^{x2} + e^{-x3}
    f3 = e^{-x3} + e^{x4}     f4 = e^{-x4} + e^{x1}

The gradients are closed form, which makes this a trusted target for the
cone engine before it meets finite-difference length gradients.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cones import ConeProblem, full_cone_exists, is_V_eutactic, mixed_cone_exists, orthogonal_complement, rank_and_index
from .config import rng_for

PLANE_TOL = 1e-8


@dataclass(frozen=True)
class R4Point:
    x: tuple[float, float, float, float]

    def __post_init__(self):
        x = tuple(float(v) for v in self.x)
        if len(x) != 4 or not np.all(np.isfinite(x)):
            raise ValueError(f"an R4Point has four finite coordinates, got {self.x}")
        object.__setattr__(self, "x", x)

    def as_array(self) -> np.ndarray:
        return np.array(self.x)


def _arr(p) -> np.ndarray:
    return p.as_array() if isinstance(p, R4Point) else np.asarray(p, dtype=float)


def f_values(p) -> np.ndarray:
    x1, x2, x3, x4 = _arr(p)
    return np.array([np.exp(x1) + np.exp(-x2), np.exp(x2) + np.exp(-x3),
                     np.exp(-x3) + np.exp(x4), np.exp(-x4) + np.exp(x1)])


def analytic_gradients(p) -> np.ndarray:
    x1, x2, x3, x4 = _arr(p)
    e1, e2, e3, e4 = np.exp(x1), np.exp(x2), np.exp(-x3), np.exp(x4)
    return np.array([
        [e1, -1.0 / e2, 0.0, 0.0],
        [0.0, e2, -e3, 0.0],
        [0.0, 0.0, -e3, e4],
        [e1, 0.0, 0.0, -1.0 / e4],
    ])


def determinant(p) -> float:
    """``e^{x1} e^{-x3} (e^{x2 - x4} - e^{x4 - x2})``, zero exactly on ``x2 = x4``."""
    x1, x2, x3, x4 = _arr(p)
    return float(np.exp(x1 - x3) * (np.exp(x2 - x4) - np.exp(x4 - x2)))


def fd_gradients(p, h: float = 1e-5) -> np.ndarray:
    x = _arr(p)
    out = np.zeros((4, 4))
    for k in range(4):
        e = np.zeros(4)
        e[k] = h
        out[:, k] = (f_values(x + e) - f_values(x - e)) / (2 * h)
    return out


def _cone(rows, sense=()) -> ConeProblem:
    return ConeProblem(rows, ("f1", "f2", "f3", "f4")[: len(rows)], tuple(sense))


@dataclass
class TestbedReport:
    samples: int
    seed: int
    checks: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    max_fd_error: float = 0.0
    indeterminate: int = 0

    @property
    def all_pass(self) -> bool:
        return not self.failures and all(c["pass"] == c["total"] for c in self.checks.values())

    def to_json(self) -> dict:
        return {"samples": self.samples, "seed": self.seed, "all_pass": self.all_pass,
                "checks": self.checks, "max_fd_error": self.max_fd_error,
                "indeterminate": self.indeterminate, "failures": self.failures[:20]}


def sample_points(samples: int, seed: int) -> list[np.ndarray]:
    """Points in ``[-2, 2]^4``; every second one is moved onto the plane ``x2 = x4``."""
    rng = rng_for(seed, "testbed-r4")
    pts = []
    for i in range(samples):
        x = rng.uniform(-2.0, 2.0, 4)
        if i % 2:
            x[3] = x[1]
        pts.append(x)
    return pts


def verify_claims(samples: int = 200, seed: int = 7, fd_tol: float = 1e-6) -> TestbedReport:
    """Check rank, cone and face claims at sampled points."""
    if samples < 1:
        raise ValueError("need at least one sample")
    rep = TestbedReport(samples, seed)
    names = ["rank", "determinant_agrees", "full_cone", "mixed_cones", "plane_face", "fd_gradients"]
    rep.checks = {n: {"pass": 0, "total": 0} for n in names}

    def record(name, ok, i, detail=None):
        rep.checks[name]["total"] += 1
        if ok:
            rep.checks[name]["pass"] += 1
        else:
            rep.failures.append({"check": name, "sample": i, "detail": detail})

    for i, x in enumerate(sample_points(samples, seed)):
        G = analytic_gradients(x)
        on_plane = abs(x[1] - x[3]) <= PLANE_TOL
        rk = rank_and_index(G).rank
        record("rank", rk == (3 if on_plane else 4), i, {"rank": rk, "x": list(x)})
        det = determinant(x)
        record("determinant_agrees", (rk == 4) == (abs(det) > 0.0), i, {"det": det})

        fc = full_cone_exists(_cone(G))
        rep.indeterminate += fc.verdict is None
        record("full_cone", fc.verdict is True, i)
        ok = True
        for j in range(4):
            sense = [1, 1, 1, 1]
            sense[j] = -1
            mc = mixed_cone_exists(_cone(G, sense))
            rep.indeterminate += mc.verdict is None
            ok &= mc.verdict is True
        record("mixed_cones", ok, i)
        if on_plane:
            # keep f1 and f2 stationary; then f3 and f4 cannot both be non-decreasing with one increasing
            V = orthogonal_complement(G[:2], 4)
            face = is_V_eutactic(ConeProblem(G[2:], ("f3", "f4")), V=V)
            rep.indeterminate += face.verdict is None
            record("plane_face", face.verdict is True, i)
        err = float(np.abs(fd_gradients(x) - G).max())
        rep.max_fd_error = max(rep.max_fd_error, err)
        record("fd_gradients", err <= fd_tol, i, {"error": err})
    return rep
