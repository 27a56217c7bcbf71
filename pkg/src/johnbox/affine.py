"""Largest affine image of an inner body inside a polytope container.

For a vertex body B and container C = {x : v_i . x <= h_i}, containment of
M B + a in C is the finite set of linear constraints v_i . (M u_j + a) <= h_i
over facets i and vertices j.  The solver locally maximizes log det M over
that polyhedron (restricted to the det M > 0 branch) by log-barrier Newton.
Only local maximality is guaranteed: the determinant objective is not
concave over nonsingular matrices, so several seeded starts are run and the
best local value is reported.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from . import _kernels as kernels
from .body import HPolytope, VPolytope, classify
from .decomposition import ContactSet, KIND_T3
from .errors import (
    ContainmentError,
    ConvergenceError,
    DegenerateBodyError,
    DimensionMismatchError,
    InfeasibleBodyError,
    SchemaError,
)
from .lift import polar_decompose
from .solver import SolveReport, SolverConfig

_ARMIJO = 1e-4


@dataclass(frozen=True)
class AffineMap:
    """Affine map x -> M x + a with nonsingular M."""

    M: np.ndarray
    a: np.ndarray

    def __post_init__(self):
        M = np.array(self.M, dtype=float)
        a = np.array(self.a, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise DimensionMismatchError(f"map matrix must be square, got {M.shape}")
        if a.shape != (M.shape[0],):
            raise DimensionMismatchError("translation dimension must match the matrix")
        if abs(float(np.linalg.det(M))) <= 1e-12:
            raise ValueError("map matrix is singular")
        M.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "a", a)

    @property
    def dim(self):
        return self.M.shape[0]

    def apply(self, points):
        return np.asarray(points, dtype=float) @ self.M.T + self.a

    def canonical_factor(self):
        """Symmetric positive definite factor of M; stable under the
        orthogonal ambiguity of equally-large images."""
        return polar_decompose(self.M)[0]


def _interior_point(C):
    if C.offsets.min() > 0.0:
        return np.zeros(C.dim)
    # Chebyshev center: maximize r subject to v_i . x + r <= h_i.
    d = C.dim
    c = np.zeros(d + 1)
    c[-1] = -1.0
    A_ub = np.hstack([C.normals, np.ones((C.n_facets, 1))])
    res = linprog(c, A_ub=A_ub, b_ub=C.offsets, bounds=(None, None), method="highs")
    if res.status != 0 or res.x[-1] <= 0.0:
        raise InfeasibleBodyError("container has no interior point")
    return np.asarray(res.x[:d], dtype=float)


def _constraint_matrix(B, C):
    # One row per (facet, vertex): coefficients of (vec M, a) in
    # v . (M u + a), i.e. vec(v u^T) followed by v.
    nf, d = C.normals.shape
    nv = B.vertices.shape[0]
    rows = np.empty((nf * nv, d * d + d))
    rhs = np.empty(nf * nv)
    t = 0
    for i in range(nf):
        v = C.normals[i]
        for j in range(nv):
            rows[t, : d * d] = np.outer(v, B.vertices[j]).ravel()
            rows[t, d * d :] = v
            rhs[t] = C.offsets[i]
            t += 1
    return rows, rhs


def _logdet_general(M):
    sign, logdet = np.linalg.slogdet(M)
    if sign <= 0.0:
        return None
    return float(logdet)


def _grad_hess_logdet_general(M):
    d = M.shape[0]
    Minv = np.linalg.inv(M)
    grad = Minv.T.ravel()
    hess = -np.einsum("sp,qr->pqrs", Minv, Minv).reshape(d * d, d * d)
    return grad, hess


def _barrier_solve(z0, Cmat, rhs, d, cfg):
    """Maximize log det M + mu * sum log(rhs - Cmat z) over the det>0 branch."""
    nvar = z0.size

    def evaluate(z, mu):
        M = z[: d * d].reshape(d, d)
        logdet = _logdet_general(M)
        if logdet is None:
            return None
        s = rhs - Cmat @ z
        if s.min() <= 0.0:
            return None
        return logdet, s, logdet + mu * float(np.log(s).sum())

    z = z0.copy()
    mu = cfg.barrier_mu0
    iters = 0
    history = []
    cur = evaluate(z, mu)
    if cur is None:
        raise InfeasibleBodyError("infeasible start for the affine solver")

    def center(mu, z, cur):
        nonlocal iters
        stage_tol = max(1e-16, 1e-2 * mu)
        for _ in range(80):
            logdet, s, F = cur
            M = z[: d * d].reshape(d, d)
            gb, Hb = kernels.linear_barrier_system(Cmat, s)
            gl, Hl = _grad_hess_logdet_general(M)
            g = mu * gb
            g[: d * d] += gl
            H = mu * Hb
            H[: d * d, : d * d] += Hl
            neg = -H
            # The determinant objective is not concave here; ridge the
            # system until it is positive definite so steps stay ascent.
            ridge = 1e-12
            while True:
                try:
                    cf = np.linalg.cholesky(
                        neg + ridge * np.eye(nvar)
                    )
                    break
                except np.linalg.LinAlgError:
                    ridge = max(ridge * 10.0, 1e-10)
                    if ridge > 1e12:
                        raise ConvergenceError("affine Newton system unrepairable")
            step = np.linalg.solve(cf.T, np.linalg.solve(cf, g))
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
                nxt = evaluate(cand, mu)
                if nxt is not None and nxt[2] >= F + _ARMIJO * t * dec2:
                    z, cur = cand, nxt
                    moved = True
                    break
                t *= cfg.line_search_beta
            if not moved:
                break
        return z, cur

    z, cur = center(mu, z, cur)
    history.append(cur[0])
    while mu > cfg.min_mu:
        mu = max(mu * cfg.barrier_shrink, cfg.min_mu)
        cur = (cur[0], cur[1], cur[0] + mu * float(np.log(cur[1]).sum()))
        z, cur = center(mu, z, cur)
        history.append(cur[0])
    return z, cur[0], cur[1], iters, mu, history


def max_affine_image(B, C, cfg=None, n_starts=8, seed=0):
    """Locally maximize the volume of M B + a inside C.

    B must be full-dimensional (vertex affine hull of dimension d); the
    constraints are linear in (M, a), and the solver follows the barrier
    path on the det M > 0 branch from several seeded rotated starts,
    keeping the best local value.  Returns (AffineMap, SolveReport); the
    report's objective is log det M of the winner, its history the
    stage-end objective values of the winning start (nondecreasing), and
    start_objectives the local values of every start.
    """
    if cfg is None:
        cfg = SolverConfig()
    if not isinstance(B, VPolytope) or not isinstance(C, HPolytope):
        raise TypeError("max_affine_image() needs a V-form inner body and an H-form container")
    if B.dim != C.dim:
        raise DimensionMismatchError(f"inner dim {B.dim} vs container dim {C.dim}")
    d = B.dim
    centroid = B.vertices.mean(axis=0)
    spread = B.vertices - centroid
    sv = np.linalg.svd(spread, compute_uv=False)
    if sv.size < d or sv[d - 1] <= 1e-9 * max(1.0, sv[0]):
        raise DegenerateBodyError("inner body is not full-dimensional")

    Cmat, rhs = _constraint_matrix(B, C)
    cC = _interior_point(C)
    slack0 = rhs[:: B.n_vertices] - C.normals @ cC  # per-facet slack at cC
    delta = float(slack0.min())
    radius = float(np.linalg.norm(spread, axis=1).max())
    eps = 0.5 * delta / max(radius, 1e-12)

    rng = np.random.default_rng(seed)
    best = None
    start_objs = []
    for k in range(max(1, n_starts)):
        if k == 0:
            Q = np.eye(d)
        else:
            q_raw, _ = np.linalg.qr(rng.standard_normal((d, d)))
            if np.linalg.det(q_raw) < 0:
                q_raw[:, 0] = -q_raw[:, 0]
            Q = q_raw
        M0 = eps * Q
        a0 = cC - M0 @ centroid
        z0 = np.concatenate([M0.ravel(), a0])
        z, obj, s, iters, mu, history = _barrier_solve(z0, Cmat, rhs, d, cfg)
        start_objs.append(obj)
        if best is None or obj > best[1]:
            best = (z, obj, s, iters, mu, history)

    z, obj, s, iters, mu, history = best
    amap = AffineMap(M=z[: d * d].reshape(d, d), a=z[d * d :])
    report = SolveReport(
        iterations=iters,
        final_mu=mu,
        objective=obj,
        max_constraint_violation=max(0.0, -float(s.min())),
        converged=True,
        objective_history=history,
        start_objectives=start_objs,
    )
    return amap, report


def contact_pairs(B, C, amap, tol=None):
    """Contact pairs (u, v) of the image of B against the facets of C.

    B is replaced by its image under the map (so the optimal position is the
    body itself); each image vertex on the boundary of C contributes one
    pair per active facet, v being that facet's unit normal.  An interior
    image yields an empty contact set.
    """
    if tol is None:
        tol = 1e-6
    scale = max(1.0, float(np.abs(C.offsets).max()))
    points = amap.apply(B.vertices)
    worst = float((points @ C.normals.T - C.offsets).max())
    if worst > tol * scale:
        raise ContainmentError(
            f"image of the inner body leaves the container by {worst:.3e}"
        )
    us, vs = [], []
    for p in points:
        q = classify(C, p, tol)
        if q.classification != "boundary":
            continue
        for i in q.active_facets:
            us.append(p)
            vs.append(C.normals[i])
    if not us:
        return ContactSet(dim=C.dim, kind=KIND_T3, points=np.zeros((0, C.dim)),
                          normals=np.zeros((0, C.dim)))
    return ContactSet(dim=C.dim, kind=KIND_T3, points=np.array(us), normals=np.array(vs))


def map_to_obj(amap):
    return {
        "M": [list(map(float, row)) for row in amap.M],
        "a": list(map(float, amap.a)),
    }


def map_from_obj(obj):
    try:
        M = np.array(obj["M"], dtype=float)
        a = np.array(obj["a"], dtype=float)
    except (KeyError, TypeError, ValueError):
        raise SchemaError("affine map document needs 'M' and 'a'") from None
    try:
        return AffineMap(M=M, a=a)
    except (ValueError, DimensionMismatchError) as exc:
        raise SchemaError(f"bad affine map: {exc}") from None
