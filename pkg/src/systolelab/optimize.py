"""Minimizing weighted lengths, restricted minima on equal-difference loci,
and first-order classification of points of the systole function."""
from __future__ import annotations

import itertools
import logging
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .cones import (LP_MARGIN, ConeCertificate, ConeProblem, full_cone_exists, is_eutactic,
                    rank_and_index)
from .curves import CurveSystem, default_catalog, fills
from .errors import (DivergedAsExpected, Indeterminate, LocusProjectionFailed, MinimizationFailed,
                     NotFilling, WeightMismatch)
from .fenchel import FNPoint
from .lengths import (DEFAULT_STEP, DEFAULT_TOL_SYSTOLE, WeightVector, _curves, gradients,
                      lengths_at, systole)

log = logging.getLogger(__name__)

GRAD_TOL = 1e-7
RESIDUAL_TOL = 1e-9
MAX_ITER = 10_000


@dataclass(frozen=True)
class SearchBox:
    lo: tuple[float, ...] = (0.1, 0.1, 0.1, -6.0, -6.0, -6.0)
    hi: tuple[float, ...] = (6.0, 6.0, 6.0, 6.0, 6.0, 6.0)

    def __post_init__(self):
        if len(self.lo) != 6 or len(self.hi) != 6 or any(a >= b for a, b in zip(self.lo, self.hi)):
            raise ValueError("search box must be six well-ordered intervals")
        if min(self.lo[:3]) <= 0:
            raise ValueError("cuff lengths in the search box must stay positive")

    def contains(self, x: np.ndarray) -> bool:
        return bool(np.all(x >= np.array(self.lo)) and np.all(x <= np.array(self.hi)))

    def sample(self, rng: np.random.Generator, shrink: float = 1.0) -> np.ndarray:
        lo, hi = np.array(self.lo), np.array(self.hi)
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo) * shrink
        return rng.uniform(mid - half, mid + half)


DEFAULT_BOX = SearchBox()


@dataclass(frozen=True)
class LocusSpec:
    C: tuple[str, ...]
    d: tuple[float, ...] = ()

    def __post_init__(self):
        C = tuple(self.C)
        d = tuple(float(v) for v in self.d) or (0.0,) * len(C)
        if len(C) < 2:
            raise ValueError("a locus needs at least two curves")
        if len(d) != len(C):
            raise ValueError(f"{len(d)} offsets for {len(C)} curves")
        if not np.all(np.isfinite(d)):
            raise ValueError("offsets must be finite")
        d = tuple(v - d[0] for v in d)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "d", d)


@dataclass(frozen=True)
class MinimizeResult:
    point: FNPoint
    value: float
    gradient_norm: float
    iterations: int
    converged: bool
    tol: float = GRAD_TOL
    residual: float = 0.0
    history: tuple[float, ...] = field(default=(), repr=False)

    def to_json(self) -> dict:
        return {"point": self.point.to_json(), "value": self.value, "gradient_norm": self.gradient_norm,
                "iterations": self.iterations, "converged": self.converged, "residual": self.residual}


# -- objective plumbing ------------------------------------------------------

def _weighted(A: np.ndarray, curves, h: float):
    ids = [c.id for c in curves]

    def f(x: np.ndarray) -> float:
        ls = lengths_at(FNPoint.from_array(x), curves)
        return float(sum(a * ls[i] for a, i in zip(A, ids)))

    def grad(x: np.ndarray) -> np.ndarray:
        return A @ gradients(curves, FNPoint.from_array(x), h).rows

    return f, grad


def _valid(x: np.ndarray) -> bool:
    return bool(np.all(np.isfinite(x)) and np.all(x[:3] > 0))


def _bfgs(f: Callable, grad: Callable, x0: np.ndarray, box: SearchBox, tol: float, max_iter: int,
          on_escape: Callable[[np.ndarray, np.ndarray, int], None]) -> MinimizeResult:
    x = np.array(x0, dtype=float)
    fx, g = f(x), grad(x)
    H = np.eye(x.size)
    history = [fx]
    it = 0
    gnorm = float(np.linalg.norm(g))
    while gnorm > tol and it < max_iter:
        it += 1
        p = -H @ g
        if g @ p >= 0:  # lost descent; restart from steepest descent
            H = np.eye(x.size)
            p = -g
        step, accepted = 1.0, False
        while step > 1e-16:
            xn = x + step * p
            if not box.contains(xn) or not _valid(xn):
                on_escape(x, xn, it)
                step *= 0.5
                continue
            fn = f(xn)
            if fn <= fx + 1e-4 * step * (g @ p) and fn < fx:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            log.debug("line search stalled at iteration %d, |g| = %.3e", it, gnorm)
            break
        gn = grad(xn)
        s, y = xn - x, gn - g
        sy = s @ y
        if sy > 1e-14 * np.linalg.norm(s) * np.linalg.norm(y):
            rho = 1.0 / sy
            V = np.eye(x.size) - rho * np.outer(s, y)
            H = V @ H @ V.T + rho * np.outer(s, s)
        assert fn < fx, "accepted step must decrease the objective"
        x, fx, g = xn, fn, gn
        gnorm = float(np.linalg.norm(g))
        history.append(fx)
    return MinimizeResult(FNPoint.from_array(x), fx, gnorm, it, gnorm <= tol, tol, 0.0, tuple(history))


def minimize_weighted(A: WeightVector, C, x0: FNPoint, *, system: CurveSystem | None = None,
                      box: SearchBox = DEFAULT_BOX, tol: float = GRAD_TOL, max_iter: int = MAX_ITER,
                      h: float = DEFAULT_STEP, polish: bool = True) -> MinimizeResult:
    """Quasi-Newton descent on ``L(A, C)`` from ``x0`` inside the search box.

    For a non-filling ``C`` the weighted length has no minimum; the first
    line-search probe leaving the box raises :class:`DivergedAsExpected`.
    With ``polish`` a converged minimum is handed to :func:`refine_stationary`
    so that the stationarity residual sits well below LP tolerances.
    ``history`` records the descent steps only.
    """
    system = system or default_catalog()
    curves = _curves(C, system)
    if tuple(c.id for c in curves) != A.ids:
        raise WeightMismatch(f"weights indexed by {A.ids}, curves are {tuple(c.id for c in curves)}")
    filling = fills(system, [c.id for c in curves]).fills
    if not filling:
        warnings.warn(f"{[c.id for c in curves]} does not fill; expect the iterate to leave the box",
                      RuntimeWarning, stacklevel=2)

    def on_escape(x, xn, it):
        if not filling:
            raise DivergedAsExpected(f"iterate left the search box after {it} iterations (probe {xn})",
                                     FNPoint.from_array(x), it)

    f, grad = _weighted(A.as_array(), curves, h)
    x = x0.as_array()
    if not box.contains(x):
        raise ValueError(f"start point {x} lies outside the search box")
    res = _bfgs(f, grad, x, box, tol, max_iter, on_escape)
    if polish and filling and res.gradient_norm <= max(tol, GRAD_TOL):
        fine = refine_stationary(A, curves, res.point, system=system, h=h, box=box)
        if fine.gradient_norm < res.gradient_norm:
            res = replace(res, point=fine.point, value=fine.value, gradient_norm=fine.gradient_norm,
                          iterations=res.iterations + fine.iterations, converged=fine.gradient_norm <= tol)
    return res


def refine_stationary(A: WeightVector, C, x: FNPoint, *, system: CurveSystem | None = None,
                      tol: float = 1e-11, max_iter: int = 20, h: float = DEFAULT_STEP,
                      hess_step: float = 1e-4, box: SearchBox = DEFAULT_BOX) -> MinimizeResult:
    """Newton iteration on ``grad L(A, C) = 0`` started near a minimum.

    Near the minimum the objective changes by less than its rounding error,
    so line searches stall around ``|g| ~ 1e-8``; Newton steps on the
    gradient alone keep converging.  A step is accepted only if it reduces
    the gradient norm.
    """
    system = system or default_catalog()
    curves = _curves(C, system)
    f, grad = _weighted(A.as_array(), curves, h)
    xv = x.as_array()
    g = grad(xv)
    gnorm = float(np.linalg.norm(g))
    it = 0
    while gnorm > tol and it < max_iter:
        it += 1
        H = np.zeros((6, 6))
        for k in range(6):
            e = np.zeros(6)
            e[k] = hess_step
            H[:, k] = (grad(xv + e) - grad(xv - e)) / (2 * hess_step)
        H = 0.5 * (H + H.T)
        xn = xv - np.linalg.lstsq(H, g, rcond=1e-12)[0]
        if not (_valid(xn) and box.contains(xn)):
            break
        gn = grad(xn)
        if np.linalg.norm(gn) >= gnorm:
            break
        xv, g, gnorm = xn, gn, float(np.linalg.norm(gn))
    return MinimizeResult(FNPoint.from_array(xv), f(xv), gnorm, it, gnorm <= max(tol, GRAD_TOL), tol)


def start_points(n: int, rng: np.random.Generator, box: SearchBox = DEFAULT_BOX, shrink: float = 0.5) -> list[FNPoint]:
    """``n`` deterministic start points drawn from the central part of the box."""
    return [FNPoint.from_array(box.sample(rng, shrink)) for _ in range(n)]


def minimize_multistart(A: WeightVector, C, starts: Sequence[FNPoint], **kw) -> tuple[MinimizeResult, list[MinimizeResult]]:
    """Run from each start; keep the lowest value, ties broken by coordinates."""
    runs = [minimize_weighted(A, C, x0, **kw) for x0 in starts]
    best = min(runs, key=lambda r: (round(r.value, 12), tuple(r.point.as_array())))
    return best, runs


# -- restricted minimization on E(C, d) ---------------------------------------

def _locus_residual(spec: LocusSpec, curves, x: np.ndarray) -> np.ndarray:
    ls = lengths_at(FNPoint.from_array(x), curves)
    vals = np.array([ls[c.id] for c in curves])
    return vals[1:] - vals[0] - np.array(spec.d[1:])


def _locus_jacobian(curves, x: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    rows = gradients(curves, FNPoint.from_array(x), h).rows
    return rows, rows[1:] - rows[0]


def project_to_locus(spec: LocusSpec, x: np.ndarray, *, system: CurveSystem | None = None,
                     tol: float = RESIDUAL_TOL, max_iter: int = 100, h: float = DEFAULT_STEP,
                     box: SearchBox = DEFAULT_BOX) -> np.ndarray:
    """Gauss-Newton (minimum-norm) projection onto ``L(c_i) - L(c_1) = d_i``."""
    curves = _curves(spec.C, system)
    x = np.array(x, dtype=float)
    r = _locus_residual(spec, curves, x)
    for _ in range(max_iter):
        if np.linalg.norm(r, np.inf) <= tol:
            return x
        _, J = _locus_jacobian(curves, x, h)
        dx = -np.linalg.lstsq(J, r, rcond=1e-10)[0]
        step = 1.0
        while True:
            xn = x + step * dx
            if _valid(xn) and box.contains(xn):
                rn = _locus_residual(spec, curves, xn)
                if np.linalg.norm(rn) < np.linalg.norm(r) or step < 1e-3:
                    break
            step *= 0.5
            if step < 1e-8:
                raise LocusProjectionFailed("projection step left the search box")
        x, r = xn, rn
    if np.linalg.norm(r, np.inf) <= tol:
        return x
    raise LocusProjectionFailed(f"constraint residual {np.linalg.norm(r, np.inf):.3e} after {max_iter} steps")


def sample_stratum(C, center: FNPoint, rng: np.random.Generator, n: int, *, scale=(0.1, 0.1, 0.1, 0.3, 0.3, 0.3),
                   system: CurveSystem | None = None, tol_rel: float = 1e-9, max_tries: int = 1000) -> list[FNPoint]:
    """Points of Sys(C) near ``center``: perturb, project onto E(C), keep those whose systoles are exactly C."""
    system = system or default_catalog()
    spec = LocusSpec(tuple(C))
    want = set(spec.C)
    out = []
    for _ in range(max_tries):
        x0 = center.as_array() + rng.normal(size=6) * np.asarray(scale)
        if not (_valid(x0) and DEFAULT_BOX.contains(x0)):
            continue
        try:
            x = FNPoint.from_array(project_to_locus(spec, x0, system=system))
        except LocusProjectionFailed:
            continue
        if set(systole(x, tol_rel, system).systoles) == want:
            out.append(x)
            if len(out) == n:
                break
    return out


def _tangent_projector(J: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    n = J.shape[1]
    if J.size == 0:
        return np.eye(n)
    _, s, vt = np.linalg.svd(J, full_matrices=True)
    r = int(np.sum(s > tol * max(1.0, s[0]))) if s.size else 0
    N = vt[r:]
    return N.T @ N


def restricted_minimize(spec: LocusSpec, x0: FNPoint, *, system: CurveSystem | None = None,
                        box: SearchBox = DEFAULT_BOX, tol: float = GRAD_TOL, max_iter: int = MAX_ITER,
                        h: float = DEFAULT_STEP, res_tol: float = RESIDUAL_TOL, polish: bool = True) -> MinimizeResult:
    """Minimize the common (offset) length over ``E(C, d)``.

    Alternates a quasi-Newton step along the tangent of the locus with a
    Gauss-Newton projection back onto it.  The objective is the mean of
    ``L(c_i) - d_i``, which on the locus equals ``L(c_1)``.  With ``polish``
    a converged result is finished by :func:`refine_restricted`.
    """
    system = system or default_catalog()
    curves = _curves(spec.C, system)
    d = np.array(spec.d)
    k = len(curves)

    def phi(x):
        ls = lengths_at(FNPoint.from_array(x), curves)
        return float(np.mean([ls[c.id] for c in curves] - d))

    def proj(x):
        return project_to_locus(spec, x, system=system, tol=res_tol, h=h, box=box)

    x = proj(x0.as_array())
    fx = phi(x)
    H = np.eye(6)
    history = [fx]
    it, pg_prev, x_prev = 0, None, None
    pg_norm = np.inf
    while it < max_iter:
        rows, J = _locus_jacobian(curves, x, h)
        P = _tangent_projector(J)
        pg = P @ (rows.mean(axis=0))
        pg_norm = float(np.linalg.norm(pg))
        if pg_norm <= tol:
            break
        if pg_prev is not None:
            s, y = x - x_prev, pg - pg_prev
            sy = s @ y
            if sy > 1e-14 * np.linalg.norm(s) * np.linalg.norm(y):
                rho = 1.0 / sy
                V = np.eye(6) - rho * np.outer(s, y)
                H = V @ H @ V.T + rho * np.outer(s, s)
        p = -P @ H @ pg
        if p @ pg >= 0:
            H = np.eye(6)
            p = -pg
        it += 1
        step, accepted = 1.0, False
        while step > 1e-14:
            xt = x + step * p
            if _valid(xt) and box.contains(xt):
                try:
                    xn = proj(xt)
                except LocusProjectionFailed:
                    xn = None
                if xn is not None:
                    fn = phi(xn)
                    if fn < fx - 1e-4 * step * abs(p @ pg) or (fn < fx and step < 1e-6):
                        accepted = True
                        break
            step *= 0.5
        if not accepted:
            log.debug("restricted line search stalled at iteration %d, |Pg| = %.3e", it, pg_norm)
            break
        x_prev, pg_prev = x, pg
        x, fx = xn, fn
        history.append(fx)
    res = float(np.linalg.norm(_locus_residual(spec, curves, x), np.inf)) if k > 1 else 0.0
    out = MinimizeResult(FNPoint.from_array(x), fx, pg_norm, it, pg_norm <= tol, tol, res, tuple(history))
    if polish and out.converged:
        fine = refine_restricted(spec, out.point, system=system, h=h, box=box)
        if fine.gradient_norm < out.gradient_norm and fine.residual <= res_tol:
            out = replace(fine, iterations=it + fine.iterations, tol=tol, history=out.history)
    return out


def _kkt_residual(spec: LocusSpec, curves, x: np.ndarray, lam: np.ndarray, h: float):
    rows, _ = _locus_jacobian(curves, x, h)
    return np.concatenate([lam @ rows, _locus_residual(spec, curves, x), [lam.sum() - 1.0]]), rows


def _multipliers(rows: np.ndarray, rel: float = 1e-6) -> np.ndarray:
    """Minimum-norm ``lam`` with ``sum lam = 1`` in the numerical null space of ``rows.T``.

    When the rows are rank deficient a plain least-squares solve picks up
    huge multipliers along noise directions; truncating the SVD first keeps
    ``lam`` on the meaningful part of the null space.
    """
    _, s, Vt = np.linalg.svd(rows.T)
    r = int(np.sum(s > rel * s[0]))
    N = Vt[r:].T
    if N.shape[1] == 0:
        return np.full(rows.shape[0], 1.0 / rows.shape[0])
    c = N.T @ np.ones(rows.shape[0])
    if c @ c < 1e-24:
        return np.full(rows.shape[0], 1.0 / rows.shape[0])
    return N @ c / (c @ c)


def refine_restricted(spec: LocusSpec, x: FNPoint, *, system: CurveSystem | None = None,
                      tol: float = 1e-11, max_iter: int = 20, h: float = DEFAULT_STEP,
                      hess_step: float = 1e-4, box: SearchBox = DEFAULT_BOX) -> MinimizeResult:
    """Newton iteration on the Lagrange system of the restricted problem.

    Unknowns are the point and multipliers ``lam`` (summing to 1) with
    ``sum lam_i grad L(c_i) = 0`` and the locus constraints.  ``gradient_norm``
    of the result is the norm of that combination, which is what the
    eutactic LP checks.  Steps that do not reduce the residual are refused.
    """
    system = system or default_catalog()
    curves = _curves(spec.C, system)
    k = len(curves)
    xv = x.as_array()
    rows, _ = _locus_jacobian(curves, xv, h)
    lam = _multipliers(rows)
    F, rows = _kkt_residual(spec, curves, xv, lam, h)
    fnorm = float(np.linalg.norm(F))
    it = 0
    while fnorm > tol and it < max_iter:
        it += 1
        H = np.zeros((6, 6))
        for j in range(6):
            e = np.zeros(6)
            e[j] = hess_step
            H[:, j] = lam @ (_locus_jacobian(curves, xv + e, h)[0] - _locus_jacobian(curves, xv - e, h)[0]) / (2 * hess_step)
        H = 0.5 * (H + H.T)
        J = np.zeros((6 + k, 6 + k))
        J[:6, :6], J[:6, 6:] = H, rows.T
        J[6:5 + k, :6] = rows[1:] - rows[0]
        J[5 + k, 6:] = 1.0
        dz = -np.linalg.lstsq(J, F, rcond=1e-10)[0]
        xn, ln = xv + dz[:6], lam + dz[6:]
        if not (_valid(xn) and box.contains(xn)):
            break
        Fn, rn = _kkt_residual(spec, curves, xn, ln, h)
        if np.linalg.norm(Fn) >= fnorm:
            break
        xv, lam, F, rows, fnorm = xn, ln, Fn, rn, float(np.linalg.norm(Fn))
    ls = lengths_at(FNPoint.from_array(xv), curves)
    value = float(np.mean([ls[c.id] for c in curves] - np.array(spec.d)))
    res = float(np.linalg.norm(F[6:5 + k], np.inf))
    gnorm = float(np.linalg.norm(F[:6]))
    return MinimizeResult(FNPoint.from_array(xv), value, gnorm, it, gnorm <= max(tol, GRAD_TOL), tol, res)


# -- classification -----------------------------------------------------------

@dataclass
class CriticalReport:
    kind: str  # "regular" | "boundary" | "critical"
    point: FNPoint
    systoles: tuple[str, ...]
    systole_value: float
    index: int | None = None
    rank: int | None = None
    boundary_subset: tuple[str, ...] | None = None
    certificates: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"kind": self.kind, "point": self.point.to_json(), "systoles": list(self.systoles),
                "systole_value": self.systole_value, "index": self.index, "rank": self.rank,
                "boundary_subset": None if self.boundary_subset is None else list(self.boundary_subset)}


def _require(cert: ConeCertificate, report=None) -> ConeCertificate:
    if cert.verdict is None:
        raise Indeterminate(f"{cert.query} LP is within the margin of the boundary", report=report,
                            certificate=cert)
    return cert


def classify_point(x: FNPoint, *, system: CurveSystem | None = None, tol_rel: float = DEFAULT_TOL_SYSTOLE,
                   h: float = DEFAULT_STEP, margin: float = LP_MARGIN) -> CriticalReport:
    """Regular, boundary or critical point of the catalog systole function."""
    system = system or default_catalog()
    sr = systole(x, tol_rel, system)
    S = sr.systoles
    gs = gradients(S, x, h, system)
    report = CriticalReport("regular", x, S, sr.value)
    eut = _require(is_eutactic(ConeProblem.from_gradients(gs), margin), report)
    report.certificates["eutactic"] = eut
    rk = rank_and_index(gs.rows)
    report.rank = rk.rank
    if eut.verdict:
        report.kind = "critical"
        report.index = rk.index
        return report
    # boundary: some proper filling subset is eutactic, larger subsets first
    for r in range(len(S) - 1, 0, -1):
        for sub in itertools.combinations(S, r):
            if not fills(system, sub).fills:
                continue
            cert = _require(is_eutactic(ConeProblem.from_gradients(gs, sub), margin), report)
            if cert.verdict:
                report.kind = "boundary"
                report.boundary_subset = sub
                report.certificates["subset_eutactic"] = cert
                return report
    report.certificates["full_cone"] = _require(full_cone_exists(ConeProblem.from_gradients(gs), margin), report)
    return report


@dataclass
class LocusReport:
    label: str  # "inner" | "borderline" | "outer"
    spec: LocusSpec
    minimum: MinimizeResult
    certificates: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"label": self.label, "C": list(self.spec.C), "d": list(self.spec.d),
                "minimum": self.minimum.to_json()}


def classify_locus(spec: LocusSpec, x0: FNPoint | None = None, *, system: CurveSystem | None = None,
                   h: float = DEFAULT_STEP, margin: float = LP_MARGIN, **kw) -> LocusReport:
    """Inner, borderline or outer, decided at the restricted minimum ``p(C, d)``."""
    system = system or default_catalog()
    if not fills(system, spec.C).fills:
        raise NotFilling(f"{list(spec.C)} does not fill")
    x0 = x0 or FNPoint((2.5, 2.5, 2.5))
    res = restricted_minimize(spec, x0, system=system, h=h, **kw)
    gs = gradients(spec.C, res.point, h, system)
    report = LocusReport("borderline", spec, res)
    eut = is_eutactic(ConeProblem.from_gradients(gs), margin)
    report.certificates["eutactic"] = eut
    if eut.verdict:
        report.label = "inner"
        return report
    down = full_cone_exists(ConeProblem.from_gradients(gs, sense=(-1,) * len(gs.ids)), margin,
                            query="decrease_cone")
    report.certificates["decrease_cone"] = down
    if eut.verdict is False and down.verdict:
        report.label = "outer"
    return report


# -- local structure of Min(C) -------------------------------------------------

@dataclass(frozen=True)
class MinCellProbe:
    jacobian_rank: int
    kernel_dim: int
    argmin_span_dim: int
    argmin_singular_values: tuple[float, ...]
    max_displacement: float

    def to_json(self) -> dict:
        return {"jacobian_rank": self.jacobian_rank, "kernel_dim": self.kernel_dim,
                "argmin_span_dim": self.argmin_span_dim,
                "argmin_singular_values": list(self.argmin_singular_values),
                "max_displacement": self.max_displacement}


def min_cell_probe(C, x: FNPoint, *, system: CurveSystem | None = None, eps: float = 1e-3,
                   h: float = DEFAULT_STEP, rel_tol: float = 1e-2) -> MinCellProbe:
    """Local dimension data for ``Min(C)`` at a minimum ``x`` of the uniform weighted length.

    ``jacobian_rank`` is the rank of the differential of the length map
    ``x -> (L(c))_c``.  ``argmin_span_dim`` is measured directly: each weight
    is raised by ``eps`` in turn, the weighted length is re-minimized from
    ``x``, and the displacements of the minimizer are ranked.
    """
    system = system or default_catalog()
    curves = _curves(C, system)
    ids = tuple(c.id for c in curves)
    gs = gradients(curves, x, h, system)
    rk = rank_and_index(gs.rows)
    disp = []
    for j in range(len(ids)):
        w = np.ones(len(ids))
        w[j] += eps
        res = minimize_weighted(WeightVector(ids, tuple(w), normalized=True), curves, x, system=system,
                                tol=1e-10, h=h)
        if not res.converged and res.gradient_norm > 1e-8:
            raise MinimizationFailed(f"perturbed minimization stalled at |g| = {res.gradient_norm:.2e}")
        disp.append(res.point.as_array() - x.as_array())
    D = np.array(disp)
    s = np.linalg.svd(D, compute_uv=False)
    span = int(np.sum(s > rel_tol * s[0])) if s[0] > 0 else 0
    return MinCellProbe(rk.rank, gs.rows.shape[1] - rk.rank, span, tuple(float(v) for v in s),
                        float(np.abs(D).max()))
