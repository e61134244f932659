"""Small dense linear programs: two-phase tableau simplex with Bland's rule.

Problems are tiny (tens of variables), so the tableau is kept dense and
pivoting follows Bland's smallest-index rule, which cannot cycle and makes
every run deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-11
MAX_PIVOTS = 5000


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None
    value: float | None
    pivots: int

    @property
    def ok(self) -> bool:
        return self.status == "optimal"


def _pivot(T: np.ndarray, r: int, k: int):
    T[r] /= T[r, k]
    col = T[:, k].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])


def _simplex(T: np.ndarray, basis: list[int], n_cols: int, budget: int) -> tuple[str, int]:
    """Minimize the objective in the last row of ``T`` over columns ``< n_cols``."""
    m = T.shape[0] - 1
    pivots = 0
    while True:
        cost = T[-1, :n_cols]
        entering = next((j for j in range(n_cols) if cost[j] < -PIVOT_TOL), None)
        if entering is None:
            return "optimal", pivots
        col = T[:m, entering]
        best, leave = None, None
        for i in range(m):
            if col[i] > PIVOT_TOL:
                ratio = T[i, -1] / col[i]
                if best is None or ratio < best - 1e-14 or (abs(ratio - best) <= 1e-14 and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            return "unbounded", pivots
        _pivot(T, leave, entering)
        basis[leave] = entering
        pivots += 1
        if pivots > budget:
            raise RuntimeError("simplex pivot budget exhausted")


def linprog(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, free=None) -> LPResult:
    """Minimize ``c @ x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq``.

    Variables are non-negative except those flagged in the boolean mask
    ``free``, which are split into positive and negative parts.
    """
    c = np.asarray(c, dtype=float)
    n = c.size
    A_ub = np.zeros((0, n)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, dtype=float))
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).ravel()
    A_eq = np.zeros((0, n)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, dtype=float))
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).ravel()
    free = np.zeros(n, dtype=bool) if free is None else np.asarray(free, dtype=bool)
    free_idx = np.flatnonzero(free)

    # split free variables: x = x+ - x-, the x- columns appended after the originals
    def expand(M):
        return np.hstack([M, -M[:, free_idx]])

    cc = np.concatenate([c, -c[free_idx]])
    Aub, Aeq = expand(A_ub), expand(A_eq)
    n_x = cc.size
    m_ub, m_eq = Aub.shape[0], Aeq.shape[0]
    m = m_ub + m_eq
    # rows [A_ub | I] (slacks) and [A_eq | 0]
    A = np.zeros((m, n_x + m_ub))
    A[:m_ub, :n_x] = Aub
    A[:m_ub, n_x:] = np.eye(m_ub)
    A[m_ub:, :n_x] = Aeq
    b = np.concatenate([b_ub, b_eq])
    neg = b < 0
    A[neg] *= -1.0
    b = np.where(neg, -b, b)
    n_std = A.shape[1]

    # phase 1 tableau with one artificial per row
    T = np.zeros((m + 1, n_std + m + 1))
    T[:m, :n_std] = A
    T[:m, n_std:n_std + m] = np.eye(m)
    T[:m, -1] = b
    T[-1, n_std:n_std + m] = 1.0
    T[-1] -= T[:m].sum(axis=0)
    basis = list(range(n_std, n_std + m))
    status, p1 = _simplex(T, basis, n_std + m, MAX_PIVOTS)
    scale = max(1.0, float(np.abs(b).max(initial=0.0)))
    if -T[-1, -1] > 1e-9 * scale:
        return LPResult("infeasible", None, None, p1)
    # drive remaining artificials out of the basis where possible
    keep = []
    for i in range(m):
        if basis[i] >= n_std:
            k = next((j for j in range(n_std) if abs(T[i, j]) > PIVOT_TOL), None)
            if k is None:
                continue  # redundant constraint row
            _pivot(T, i, k)
            basis[i] = k
        keep.append(i)
    T2 = np.zeros((len(keep) + 1, n_std + 1))
    T2[:-1, :n_std] = T[keep, :n_std]
    T2[:-1, -1] = T[keep, -1]
    basis = [basis[i] for i in keep]
    cost = np.zeros(n_std)
    cost[:n_x] = cc
    T2[-1, :n_std] = cost
    for i, j in enumerate(basis):
        T2[-1] -= cost[j] * T2[i]
    status, p2 = _simplex(T2, basis, n_std, MAX_PIVOTS)
    if status == "unbounded":
        return LPResult("unbounded", None, None, p1 + p2)
    z = np.zeros(n_std)
    for i, j in enumerate(basis):
        z[j] = T2[i, -1]
    x = z[:n].copy()
    x[free_idx] -= z[n:n_x]
    return LPResult("optimal", x, float(c @ x), p1 + p2)
