"""First-order certificates for families of length gradients.

Every verdict comes from solving both sides of a theorem of the alternative
as separate linear programs:

* full cone (Gordan): a direction ``v`` with ``s_i g_i . v > 0`` for all ``i``,
  or weights ``lam >= 0``, ``sum lam = 1`` with ``sum lam_i s_i g_i = 0``;
* eutactic (Stiemke): weights ``lam > 0`` with ``sum lam_i g_i = 0``, or a
  direction ``v`` with all ``g_i . v >= 0`` and at least one positive.

Exactly one side clearing the margin gives the verdict.  When neither or both
do, the verdict is ``None`` (indeterminate).  Rows are scaled to unit length
and expressed in coordinates on their numerical row space before the LPs
run; that makes verdicts invariant under positive rescaling of rows and keeps
finite-difference noise out of the null directions.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateGradient, EmptySubspace, NotCritical
from .lp import linprog

LP_MARGIN = 1e-9
RANK_TOL = 1e-8
ZERO_ROW = 1e-12


@dataclass(frozen=True)
class ConeProblem:
    rows: np.ndarray
    ids: tuple[str, ...] = ()
    sense: tuple[int, ...] = ()
    V: np.ndarray | None = None

    def __post_init__(self):
        rows = np.atleast_2d(np.asarray(self.rows, dtype=float))
        if rows.shape[0] == 0 or rows.size == 0:
            raise ValueError("a cone problem needs at least one row")
        norms = np.linalg.norm(rows, axis=1)
        if np.any(norms <= ZERO_ROW):
            bad = [self.ids[i] if self.ids else str(i) for i in np.flatnonzero(norms <= ZERO_ROW)]
            raise DegenerateGradient(f"all-zero gradient rows: {bad}")
        ids = tuple(self.ids) or tuple(f"r{i}" for i in range(rows.shape[0]))
        sense = tuple(self.sense) or (1,) * rows.shape[0]
        if len(ids) != rows.shape[0] or len(sense) != rows.shape[0]:
            raise ValueError("ids and sense must match the number of rows")
        if any(s not in (1, -1) for s in sense):
            raise ValueError("sense flags are +1 (increase) or -1 (decrease)")
        V = self.V
        if V is not None:
            V = np.atleast_2d(np.asarray(V, dtype=float))
            if V.size == 0:
                raise EmptySubspace("subspace basis is empty")
            V = orthonormal_basis(V)
            if V.shape[0] == 0:
                raise EmptySubspace("subspace basis has rank 0")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "sense", sense)
        object.__setattr__(self, "V", V)

    @classmethod
    def from_gradients(cls, gs, ids: Sequence[str] | None = None, sense=(), V=None) -> ConeProblem:
        if ids is not None:
            gs = gs.subset(ids)
        return cls(np.array(gs.rows), gs.ids, tuple(sense), V)

    @property
    def signed_rows(self) -> np.ndarray:
        return self.rows * np.array(self.sense, dtype=float)[:, None]


@dataclass
class ConeCertificate:
    query: str
    verdict: bool | None
    kind: str  # "direction" | "coefficients" | "none"
    witness: np.ndarray | None
    margin: float
    primal_value: float
    dual_value: float
    ids: tuple[str, ...] = ()
    extra: dict = field(default_factory=dict)

    @property
    def indeterminate(self) -> bool:
        return self.verdict is None

    @property
    def label(self) -> str:
        return {True: "true", False: "false", None: "indeterminate"}[self.verdict]

    def to_json(self) -> dict:
        out = {"query": self.query, "verdict": self.label, "kind": self.kind,
               "witness": None if self.witness is None else [float(v) for v in self.witness],
               "margin": self.margin, "primal_value": self.primal_value,
               "dual_value": self.dual_value, "ids": list(self.ids)}
        for k, v in self.extra.items():
            out[k] = [float(t) for t in v] if isinstance(v, np.ndarray) else v
        return out


def orthonormal_basis(B: np.ndarray, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal rows spanning the row space of ``B``."""
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if B.size == 0:
        return np.zeros((0, B.shape[1] if B.ndim == 2 else 0))
    _, s, vt = np.linalg.svd(B, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((0, B.shape[1]))
    r = int(np.sum(s > tol * s[0]))
    return vt[:r]


def orthogonal_complement(B: np.ndarray, dim: int, tol: float = RANK_TOL) -> np.ndarray:
    B = np.atleast_2d(np.asarray(B, dtype=float)).reshape(-1, dim)
    if B.shape[0] == 0:
        return np.eye(dim)
    _, s, vt = np.linalg.svd(B, full_matrices=True)
    r = int(np.sum(s > tol * s[0])) if s.size and s[0] > 0 else 0
    return vt[r:]


def _unit_rows(rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    norms = np.linalg.norm(rows, axis=1)
    safe = np.where(norms > ZERO_ROW * max(1.0, norms.max(initial=0.0)), norms, 0.0)
    out = np.zeros_like(rows)
    nz = safe > 0
    out[nz] = rows[nz] / safe[nz, None]
    return out, safe


def _row_coordinates(rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    basis = orthonormal_basis(rows)
    return rows @ basis.T, basis


# -- LP kernels on unit rows in row-space coordinates ----------------------

def _max_common_margin(R: np.ndarray) -> tuple[float, np.ndarray]:
    """max t subject to R v >= t, |v|_inf <= 1, t <= 1."""
    k, r = R.shape
    if r == 0:
        return 0.0, np.zeros(0)
    c = np.zeros(r + 1)
    c[-1] = -1.0
    A = [np.hstack([-R, np.ones((k, 1))])]
    b = [np.zeros(k)]
    eye = np.eye(r)
    A += [np.hstack([eye, np.zeros((r, 1))]), np.hstack([-eye, np.zeros((r, 1))])]
    b += [np.ones(r), np.ones(r)]
    A.append(np.eye(1, r + 1, r))
    b.append(np.ones(1))
    res = linprog(c, np.vstack(A), np.concatenate(b), free=np.ones(r + 1, dtype=bool))
    return float(res.x[-1]), res.x[:r]


def _min_convex_residual(R: np.ndarray) -> tuple[float, np.ndarray]:
    """min |R^T lam|_inf over the simplex ``lam >= 0, sum lam = 1``."""
    k, r = R.shape
    if r == 0:
        return 0.0, np.full(k, 1.0 / k)
    c = np.zeros(k + 1)
    c[-1] = 1.0
    A = np.vstack([np.hstack([R.T, -np.ones((r, 1))]), np.hstack([-R.T, -np.ones((r, 1))])])
    b = np.zeros(2 * r)
    A_eq = np.hstack([np.ones((1, k)), np.zeros((1, 1))])
    res = linprog(c, A, b, A_eq, np.ones(1))
    return float(res.x[-1]), res.x[:k]


def _max_positive_weight(R: np.ndarray) -> tuple[float, np.ndarray | None]:
    """max eps with lam_i >= eps, sum lam = 1, R^T lam = 0."""
    k, r = R.shape
    # variables: mu (k, >= 0) and eps (free); lam = mu + eps
    c = np.zeros(k + 1)
    c[-1] = -1.0
    A_eq = [np.hstack([np.ones((1, k)), np.full((1, 1), float(k))])]
    b_eq = [np.ones(1)]
    if r:
        A_eq.append(np.hstack([R.T, R.sum(axis=0)[:, None]]))
        b_eq.append(np.zeros(r))
    A_ub = np.eye(1, k + 1, k)
    free = np.zeros(k + 1, dtype=bool)
    free[-1] = True
    res = linprog(c, A_ub, np.ones(1), np.vstack(A_eq), np.concatenate(b_eq), free=free)
    if not res.ok:
        return -np.inf, None
    eps = float(res.x[-1])
    return eps, res.x[:k] + eps


def _max_nonneg_image(R: np.ndarray) -> tuple[float, np.ndarray]:
    """max sum s with R v = s, 0 <= s <= 1, v free."""
    k, r = R.shape
    if r == 0:
        return 0.0, np.zeros(0)
    c = np.concatenate([np.zeros(r), -np.ones(k)])
    A_eq = np.hstack([R, -np.eye(k)])
    A_ub = np.hstack([np.zeros((k, r)), np.eye(k)])
    free = np.concatenate([np.ones(r, dtype=bool), np.zeros(k, dtype=bool)])
    res = linprog(c, A_ub, np.ones(k), A_eq, np.zeros(k), free=free)
    return float(-res.value), res.x[:r]


def _decide(primal_yes: bool, dual_yes: bool) -> bool | None:
    if primal_yes == dual_yes:
        return None
    return primal_yes


# -- public certificates ---------------------------------------------------

def full_cone_exists(P: ConeProblem, margin: float = LP_MARGIN, query: str = "full_cone") -> ConeCertificate:
    """Is there a direction increasing (or, per sense flag, decreasing) every row?"""
    G = P.signed_rows
    U, norms = _unit_rows(G)
    R, basis = _row_coordinates(U)
    t, v_r = _max_common_margin(R)
    u, lam = _min_convex_residual(R)
    verdict = _decide(t > margin, u <= margin)
    if verdict is True or (verdict is None and t > margin):
        v = basis.T @ v_r
        v = v / np.min(G @ v)
        return ConeCertificate(query, verdict, "direction", v, t, t, u, P.ids,
                               {"evaluations": G @ v})
    lam_raw = lam / norms
    lam_raw /= lam_raw.sum()
    return ConeCertificate(query, verdict, "coefficients", lam_raw, u, t, u, P.ids,
                           {"residual": float(np.linalg.norm(lam_raw @ G))})


def mixed_cone_exists(P: ConeProblem, margin: float = LP_MARGIN) -> ConeCertificate:
    """Direction decreasing the single row flagged -1 and increasing the rest."""
    if sum(1 for s in P.sense if s < 0) != 1:
        raise ValueError("mixed cone query needs exactly one decreasing row")
    return full_cone_exists(P, margin, query="mixed_cone")


def _eutactic_on(G: np.ndarray, ids, margin: float, query: str, back=None) -> ConeCertificate:
    U, norms = _unit_rows(G)
    R, basis = _row_coordinates(U)
    eps, lam = _max_positive_weight(R)
    total, v_r = _max_nonneg_image(R)
    verdict = _decide(eps > margin, total > margin)
    if verdict is True or (verdict is None and lam is not None and eps > margin):
        lam_raw = np.where(norms > 0, lam / np.where(norms > 0, norms, 1.0), lam)
        lam_raw = lam_raw / lam_raw.sum()
        return ConeCertificate(query, verdict, "coefficients", lam_raw, eps, eps, total, tuple(ids),
                               {"residual": float(np.linalg.norm(lam_raw @ G))})
    v = basis.T @ v_r
    if back is not None:
        v = back(v)
    return ConeCertificate(query, verdict, "direction", v, total, eps, total, tuple(ids),
                           {"evaluations": U @ (basis.T @ v_r) * norms})


def is_eutactic(P: ConeProblem, margin: float = LP_MARGIN) -> ConeCertificate:
    """Is zero a strictly positive combination of the rows?"""
    if P.V is not None:
        return is_V_eutactic(P, margin=margin)
    return _eutactic_on(P.signed_rows, P.ids, margin, "eutactic")


def is_V_eutactic(P: ConeProblem, V: np.ndarray | None = None, margin: float = LP_MARGIN) -> ConeCertificate:
    """Eutactic test applied to the rows projected into the subspace ``V``."""
    Q = P.V if V is None else orthonormal_basis(np.atleast_2d(V))
    if Q is None or Q.shape[0] == 0:
        raise EmptySubspace("V-eutactic test needs a nonzero subspace")
    G = P.signed_rows @ Q.T
    return _eutactic_on(G, P.ids, margin, "V_eutactic", back=lambda v: Q.T @ v)


def locus_tangent(rows: np.ndarray, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis of ``{w : g_i . w equal for all i}``."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    diffs = rows[1:] - rows[0]
    return orthogonal_complement(diffs, rows.shape[1], tol) if diffs.size else np.eye(rows.shape[1])


def is_balanced(P: ConeProblem, tangent: np.ndarray | None = None, margin: float = LP_MARGIN) -> ConeCertificate:
    """Does a strictly positive convex combination of the rows lie in the locus tangent?

    With ``N`` spanning the complement of the tangent this says the rows
    projected by ``N`` are eutactic; the witness ``v_C`` is the combination.
    """
    G = P.signed_rows
    n = G.shape[1]
    T = locus_tangent(G) if tangent is None else orthonormal_basis(np.atleast_2d(tangent))
    if T.shape[0] == 0:
        raise EmptySubspace("the locus tangent space is trivial")
    N = orthogonal_complement(T, n)
    if N.shape[0] == 0:
        lam = np.full(G.shape[0], 1.0 / G.shape[0])
        return ConeCertificate("balanced", True, "coefficients", lam, 1.0 / G.shape[0], 1.0, 0.0, P.ids,
                               {"v_C": lam @ G, "tangent_defect": 0.0})
    cert = _eutactic_on(G @ N.T, P.ids, margin, "balanced", back=lambda v: N.T @ v)
    if cert.kind == "coefficients":
        v_c = cert.witness @ G
        cert.extra["v_C"] = v_c
        cert.extra["tangent_defect"] = float(np.linalg.norm(N @ v_c))
    return cert


@dataclass(frozen=True)
class RankReport:
    rank: int
    index: int
    h_property: bool
    singular_values: tuple[float, ...]

    def to_json(self) -> dict:
        return {"rank": self.rank, "index": self.index, "h_property": self.h_property,
                "singular_values": list(self.singular_values)}


def rank_and_index(rows, tol: float = RANK_TOL) -> RankReport:
    """Numerical rank of the gradient span, the Morse index it carries, and the H-property flag.

    The index of a critical point is the dimension of the span of the
    systole gradients, which is also one less than the size of each
    descendent.
    """
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    s = np.linalg.svd(rows, compute_uv=False)
    r = int(np.sum(s > tol * s[0])) if s.size and s[0] > 0 else 0
    return RankReport(r, r, r == rows.shape[0], tuple(float(v) for v in s))


@dataclass(frozen=True)
class DescendentReport:
    index: int
    descendents: tuple[tuple[str, ...], ...]
    subdescendents: tuple[tuple[str, ...], ...]
    certificates: tuple[ConeCertificate, ...] = ()

    @property
    def cardinality_ok(self) -> bool:
        return all(len(d) == self.index + 1 for d in self.descendents)

    def to_json(self) -> dict:
        return {"index": self.index, "descendents": [list(d) for d in self.descendents],
                "subdescendents": [list(d) for d in self.subdescendents],
                "cardinality_ok": self.cardinality_ok}


def _minimal(sets):
    fs = [frozenset(s) for s in sets]
    return [s for s, a in zip(sets, fs) if not any(b < a for b in fs)]


def descendents_from_problem(P: ConeProblem, margin: float = LP_MARGIN) -> DescendentReport:
    top = is_eutactic(P, margin)
    if top.verdict is not True:
        raise NotCritical(f"systole gradients are not eutactic (verdict {top.label})")
    full = rank_and_index(P.rows)
    ids = P.ids
    eut, certs = [], []
    for r in range(1, len(ids) + 1):
        for sub in itertools.combinations(range(len(ids)), r):
            rows = P.rows[list(sub)]
            cert = is_eutactic(ConeProblem(rows, tuple(ids[i] for i in sub)), margin)
            if cert.verdict:
                eut.append(tuple(ids[i] for i in sub))
                certs.append(cert)
    rank_of = {s: rank_and_index(P.rows[[ids.index(c) for c in s]]).rank for s in eut}
    desc = _minimal([s for s in eut if rank_of[s] == full.rank])
    sub = _minimal([s for s in eut if rank_of[s] < full.rank])
    keep = set(desc) | set(sub)
    return DescendentReport(full.index, tuple(desc), tuple(sub),
                            tuple(c for s, c in zip(eut, certs) if s in keep))


def descendents(C, x, system=None, h: float | None = None, margin: float = LP_MARGIN) -> DescendentReport:
    """Descendents and subdescendents of the critical point ``x`` with systole set ``C``."""
    from .lengths import DEFAULT_STEP, gradients

    gs = gradients(C, x, h or DEFAULT_STEP, system)
    return descendents_from_problem(ConeProblem.from_gradients(gs), margin)
