"""Maximum-volume inscribed ellipsoid of an H-form polytope.

The ellipsoid A B^d + a (A symmetric positive definite) is inscribed in the
polytope {x : v_i . x <= h_i} exactly when |A v_i| + a . v_i <= h_i for every
facet: each facet's infinite family of tangency conditions over sphere
directions collapses to one second-order constraint.  The solver maximizes
log det A over that feasible set by log-barrier path following with damped
Newton steps in lifted (svec) coordinates: maximize

    log det A + mu * sum_i log(h_i - a . v_i - |A v_i|)

shrinking mu geometrically.  In symmetric mode the center is fixed at the
origin and dropped from the variables; the facets must then come in
(-normal, offset) pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as kernels
from .body import HPolytope, is_centrally_symmetric
from .errors import (
    AsymmetricBodyError,
    ConvergenceError,
    DimensionMismatchError,
    InfeasibleBodyError,
    SchemaError,
)
from .lift import sym_basis, sym_to_vec, symmetrize, vec_to_sym

_ARMIJO = 1e-4
_HESS_RIDGE = 1e-12


@dataclass(frozen=True)
class SolverConfig:
    tol_kkt: float = 1e-8
    max_newton_iters: int = 200
    barrier_mu0: float = 1.0
    barrier_shrink: float = 0.2
    min_mu: float = 1e-10
    line_search_beta: float = 0.5

    def __post_init__(self):
        for name in ("tol_kkt", "barrier_mu0", "min_mu", "line_search_beta"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.max_newton_iters <= 0:
            raise ValueError("max_newton_iters must be positive")
        if not 0.0 < self.barrier_shrink < 1.0:
            raise ValueError("barrier_shrink must lie in (0, 1)")
        if not 0.0 < self.line_search_beta < 1.0:
            raise ValueError("line_search_beta must lie in (0, 1)")


@dataclass
class SolveReport:
    iterations: int
    final_mu: float
    objective: float
    max_constraint_violation: float
    converged: bool
    objective_history: list = field(default_factory=list)
    start_objectives: list | None = None


@dataclass(frozen=True)
class EllipsoidParam:
    """Ellipsoid A B^d + a with A symmetric positive definite."""

    A: np.ndarray
    a: np.ndarray

    def __post_init__(self):
        A = symmetrize(self.A)
        a = np.array(self.a, dtype=float)
        d = A.shape[0]
        if a.shape != (d,):
            raise DimensionMismatchError(f"center has shape {a.shape}, expected ({d},)")
        if np.linalg.eigvalsh(A).min() <= 0.0:
            raise ValueError("ellipsoid matrix must be positive definite")
        A.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "a", a)

    @property
    def dim(self):
        return self.A.shape[0]


def _logdet_grad_hess(A):
    # Gradient svec(A^{-1}); Hessian -tr(A^{-1} E_p A^{-1} E_q) over the
    # orthonormal symmetric basis.
    d = A.shape[0]
    E = sym_basis(d)
    Ainv = np.linalg.inv(A)
    Ainv = 0.5 * (Ainv + Ainv.T)
    g = sym_to_vec(Ainv)
    T = np.einsum("ab,pbc,cd->pad", Ainv, E, Ainv)
    H = -np.einsum("pij,qij->pq", T, E)
    return g, H


class _BarrierState:
    """Feasible iterate with everything Newton needs, or None if infeasible."""

    __slots__ = ("A", "a", "s", "G", "nrm", "logdet", "F")

    def __init__(self, A, a, s, G, nrm, logdet, F):
        self.A, self.a = A, a
        self.s, self.G, self.nrm = s, G, nrm
        self.logdet, self.F = logdet, F


def _evaluate(z, mu, V, h, d, m, with_center):
    A = vec_to_sym(z[:m], d)
    a = z[m:] if with_center else np.zeros(d)
    try:
        chol = np.linalg.cholesky(A)
    except np.linalg.LinAlgError:
        return None
    s, G, nrm = kernels.facet_slacks(V, h, A, a)
    if s.min() <= 0.0:
        return None
    logdet = 2.0 * float(np.log(np.diag(chol)).sum())
    F = logdet + mu * float(np.log(s).sum())
    return _BarrierState(A, a, s, G, nrm, logdet, F)


def mvie(C, mode="general", cfg=None):
    """Maximum-volume inscribed ellipsoid of a bounded H-form polytope.

    mode 'symmetric' fixes the center at the origin (the body must be
    centrally symmetric); mode 'general' optimizes the center too.
    Returns (EllipsoidParam, SolveReport).  Raises InfeasibleBodyError when
    the origin is not interior, AsymmetricBodyError for symmetric mode on a
    body without facet pairs, and ConvergenceError when the Newton budget
    runs out.
    """
    if mode not in ("symmetric", "general"):
        raise ValueError(f"unknown mode {mode!r}")
    if cfg is None:
        cfg = SolverConfig()
    if not isinstance(C, HPolytope):
        raise TypeError("mvie() needs an H-form container")
    if C.offsets.min() <= 0.0:
        raise InfeasibleBodyError(
            "origin must be interior (all offsets positive); translate first"
        )
    if mode == "symmetric" and not is_centrally_symmetric(C, 1e-9):
        raise AsymmetricBodyError("symmetric mode requires facets in +- pairs")

    d = C.dim
    m = d * (d + 1) // 2
    with_center = mode == "general"
    V, h = C.normals, C.offsets
    nvar = m + d if with_center else m

    z = np.zeros(nvar)
    z[:m] = sym_to_vec(0.5 * float(h.min()) * np.eye(d))
    state = _evaluate(z, cfg.barrier_mu0, V, h, d, m, with_center)
    assert state is not None  # start is strictly feasible by construction

    iters = 0
    history = []

    def center(mu, state, z):
        nonlocal iters
        stage_tol = max(1e-16, 1e-2 * mu)
        for _ in range(80):
            grad_b, hess_b = kernels.barrier_system(
                V, state.G, state.nrm, state.s, with_center
            )
            g_ld, H_ld = _logdet_grad_hess(state.A)
            g = mu * grad_b
            g[:m] += g_ld
            H = mu * hess_b
            H[:m, :m] += H_ld
            neg = -H
            neg[np.diag_indices_from(neg)] += _HESS_RIDGE
            try:
                cf = np.linalg.cholesky(neg)
                step = np.linalg.solve(cf.T, np.linalg.solve(cf, g))
            except np.linalg.LinAlgError:
                step = np.linalg.lstsq(neg, g, rcond=None)[0]
            dec2 = float(g @ step)
            if dec2 <= stage_tol:
                break
            iters += 1
            if iters > cfg.max_newton_iters:
                raise ConvergenceError(
                    f"Newton budget {cfg.max_newton_iters} exhausted at mu={mu:.2e}"
                )
            t = 1.0
            moved = False
            while t >= 1e-14:
                cand = z + t * step
                st = _evaluate(cand, mu, V, h, d, m, with_center)
                if st is not None and st.F >= state.F + _ARMIJO * t * dec2:
                    z, state = cand, st
                    moved = True
                    break
                t *= cfg.line_search_beta
            if not moved:
                break  # no feasible ascent at this scale: stage is converged
        return state, z

    mu = cfg.barrier_mu0
    state, z = center(mu, state, z)
    history.append(state.logdet)
    while mu > cfg.min_mu:
        mu = max(mu * cfg.barrier_shrink, cfg.min_mu)
        state.F = state.logdet + mu * float(np.log(state.s).sum())
        state, z = center(mu, state, z)
        history.append(state.logdet)

    ellipsoid = EllipsoidParam(A=state.A, a=state.a)
    violation = max(0.0, -float(state.s.min()))
    report = SolveReport(
        iterations=iters,
        final_mu=mu,
        objective=state.logdet,
        max_constraint_violation=violation,
        converged=violation <= cfg.tol_kkt,
        objective_history=history,
    )
    return ellipsoid, report


def constraint_slacks(C, E):
    """Per-facet slacks h_i - a . v_i - |A v_i|; negative means violated."""
    if C.dim != E.dim:
        raise DimensionMismatchError(f"body dim {C.dim} vs ellipsoid dim {E.dim}")
    s, _, _ = kernels.facet_slacks(C.normals, C.offsets, E.A, E.a)
    return s


def john_position(C, E):
    """Image of C under x -> A^{-1}(x - a), mapping the ellipsoid to the unit ball.

    Facet (v, h) maps to normal A v / |A v| with offset (h - a . v)/|A v|.
    """
    if C.dim != E.dim:
        raise DimensionMismatchError(f"body dim {C.dim} vs ellipsoid dim {E.dim}")
    G = C.normals @ E.A
    nrm = np.linalg.norm(G, axis=1)
    normals = G / nrm[:, None]
    offsets = (C.offsets - C.normals @ E.a) / nrm
    # Affine images of bounded bodies stay bounded; skip the ingestion LPs.
    return HPolytope(C.dim, normals, offsets)


def contact_points(C, E, tol=None):
    """Contact points of the inscribed ellipsoid, in John-position coordinates.

    For each facet whose slack is at most tol (default 1e-6 * max_i h_i) the
    contact is u = A v / |A v|, the point where the unit ball touches the
    positioned body.  Contacts closer than 1e-8 to an earlier one (coincident
    facets) are dropped.  Returns a list of (u, facet_index).
    """
    s, G, nrm = kernels.facet_slacks(C.normals, C.offsets, E.A, E.a)
    if tol is None:
        tol = 1e-6 * float(np.abs(C.offsets).max())
    out = []
    for i in np.flatnonzero(s <= tol):
        u = G[i] / nrm[i]
        if any(np.linalg.norm(u - prev) <= 1e-8 for prev, _ in out):
            continue
        out.append((u, int(i)))
    return out


def ellipsoid_to_obj(E):
    return {
        "A": [list(map(float, row)) for row in E.A],
        "a": list(map(float, E.a)),
    }


def ellipsoid_from_obj(obj):
    try:
        A = np.array(obj["A"], dtype=float)
        a = np.array(obj["a"], dtype=float)
    except (KeyError, TypeError, ValueError):
        raise SchemaError("ellipsoid document needs 'A' and 'a'") from None
    try:
        return EllipsoidParam(A=A, a=a)
    except (ValueError, DimensionMismatchError) as exc:
        raise SchemaError(f"bad ellipsoid: {exc}") from None


def report_to_obj(report):
    obj = {
        "iterations": report.iterations,
        "final_mu": report.final_mu,
        "objective": report.objective,
        "max_constraint_violation": report.max_constraint_violation,
        "converged": report.converged,
    }
    if report.objective_history:
        obj["objective_history"] = [float(v) for v in report.objective_history]
    if report.start_objectives is not None:
        obj["start_objectives"] = [float(v) for v in report.start_objectives]
    return obj
