"""Contact-point decompositions in lifted coordinates.

Given contact points of an inscribed unit ball (or contact pairs of an
inner body) this module solves for nonnegative weights making the weighted
sum of lifted rank-one generators hit the lifted identity target, reduces
the support to the conic Caratheodory bound of the ambient lifted space,
and checks the cardinality and span bounds a valid decomposition must obey.

Decomposition kinds and their lifted spaces:

``theorem1``  centered case: generators svec(u u^T), target svec(I),
              ambient d(d+1)/2, bounds d <= n <= d(d+1)/2.
``theorem2``  free-center case: generators (svec(u u^T), u), target
              (svec(I), 0), ambient d(d+3)/2, bounds d+1 <= n <= d(d+3)/2.
``theorem3``  affine-image case: generators (vec(u v^T), v) in the full
              unsymmetrized d^2 + d space, target (vec(I), 0), bounds
              d+1 <= n <= d(d+1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, ReductionPreconditionError
from .lift import LiftedPoint, sym_to_vec

KIND_T1 = "theorem1"
KIND_T2 = "theorem2"
KIND_T3 = "theorem3"

_BOUNDS = {
    KIND_T1: lambda d: (d, d * (d + 1) // 2),
    KIND_T2: lambda d: (d + 1, d * (d + 3) // 2),
    KIND_T3: lambda d: (d + 1, d * (d + 1)),
}


@dataclass(frozen=True)
class ContactSet:
    """Contact points u_k (and, for theorem3, paired unit normals v_k).

    Points must be unit vectors for theorem1/theorem2; for theorem3 the
    points are arbitrary while the normals are unit.  Weights, once present,
    are strictly positive.
    """

    dim: int
    kind: str
    points: np.ndarray
    normals: np.ndarray | None = None
    weights: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in _BOUNDS:
            raise ValueError(f"unknown decomposition kind {self.kind!r}")
        points = np.array(self.points, dtype=float).reshape(-1, self.dim)
        points.setflags(write=False)
        object.__setattr__(self, "points", points)
        n = points.shape[0]
        if self.kind == KIND_T3:
            if self.normals is None:
                raise ValueError("theorem3 contacts need paired normals")
            normals = np.array(self.normals, dtype=float).reshape(-1, self.dim)
            if normals.shape[0] != n:
                raise DimensionMismatchError("one normal per contact point required")
            if n and np.abs(np.linalg.norm(normals, axis=1) - 1.0).max() > 1e-9:
                raise ValueError("theorem3 normals must be unit vectors")
            normals.setflags(write=False)
            object.__setattr__(self, "normals", normals)
        else:
            if self.normals is not None:
                raise ValueError(f"{self.kind} contacts carry no normals")
            if n and np.abs(np.linalg.norm(points, axis=1) - 1.0).max() > 1e-9:
                raise ValueError(f"{self.kind} contact points must be unit vectors")
        if self.weights is not None:
            weights = np.array(self.weights, dtype=float).reshape(-1)
            if weights.shape[0] != n:
                raise DimensionMismatchError("one weight per contact required")
            if n and weights.min() <= 0.0:
                raise ValueError("contact weights must be strictly positive")
            weights.setflags(write=False)
            object.__setattr__(self, "weights", weights)

    @property
    def n(self):
        return self.points.shape[0]

    def select(self, indices, weights=None):
        """Subset of the contacts, optionally with new (positive) weights."""
        indices = np.asarray(indices, dtype=int)
        return ContactSet(
            dim=self.dim,
            kind=self.kind,
            points=self.points[indices],
            normals=None if self.normals is None else self.normals[indices],
            weights=weights if weights is not None else (
                None if self.weights is None else self.weights[indices]
            ),
        )


@dataclass(frozen=True)
class BoundsCheck:
    n_min: int
    n_max: int
    n_actual: int
    n_min_ok: bool
    n_max_ok: bool
    span_ok: bool


@dataclass(frozen=True)
class DecompositionResult:
    """Weights, recomputed residual, support, and bound flags."""

    weights: np.ndarray
    residual: float
    support: tuple
    bounds: BoundsCheck


def lifted_generators(contacts):
    """Generator rows and target vector in the kind's lifted space."""
    d = contacts.dim
    if contacts.kind == KIND_T1:
        rows = np.array([sym_to_vec(np.outer(u, u)) for u in contacts.points])
        rows = rows.reshape(contacts.n, d * (d + 1) // 2)
        target = sym_to_vec(np.eye(d))
    elif contacts.kind == KIND_T2:
        rows = np.array(
            [np.concatenate([sym_to_vec(np.outer(u, u)), u]) for u in contacts.points]
        ).reshape(contacts.n, d * (d + 3) // 2)
        target = np.concatenate([sym_to_vec(np.eye(d)), np.zeros(d)])
    else:
        rows = np.array(
            [
                np.concatenate([np.outer(u, v).ravel(), v])
                for u, v in zip(contacts.points, contacts.normals)
            ]
        ).reshape(contacts.n, d * (d + 1))
        target = np.concatenate([np.eye(d).ravel(), np.zeros(d)])
    return rows, target


def nnls(A, b, tol=None, max_iter=None):
    """Nonnegative least squares min |A x - b|, x >= 0, by active sets.

    Classic Lawson-Hanson: grow the passive (positive) set by the most
    positive dual, solve the unconstrained subproblem on it, and step back
    whenever a passive coordinate would turn nonpositive.  Deterministic:
    ties pick the smallest index.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = A.shape
    if b.shape != (m,):
        raise DimensionMismatchError(f"b has shape {b.shape}, expected ({m},)")
    if max_iter is None:
        max_iter = 3 * max(n, 10)
    x = np.zeros(n)
    passive = np.zeros(n, dtype=bool)
    resid = b.copy()
    w = A.T @ resid
    if tol is None:
        tol = 10 * np.finfo(float).eps * max(m, n) * max(1.0, float(np.abs(w).max(initial=0.0)))

    outer_iter = 0
    while (~passive).any() and np.max(w[~passive], initial=-np.inf) > tol:
        outer_iter += 1
        if outer_iter > max_iter:
            break
        free = np.flatnonzero(~passive)
        j = free[int(np.argmax(w[free]))]
        passive[j] = True
        while True:
            idx = np.flatnonzero(passive)
            z, *_ = np.linalg.lstsq(A[:, idx], b, rcond=None)
            if z.min(initial=np.inf) > 0.0:
                x = np.zeros(n)
                x[idx] = z
                break
            neg = z <= 0.0
            ratios = x[idx][neg] / (x[idx][neg] - z[neg])
            alpha = float(ratios.min())
            x[idx] += alpha * (z - x[idx])
            passive[idx] &= x[idx] > tol
            x[~passive] = 0.0
            if not passive.any():
                x = np.zeros(n)
                break
        resid = b - A @ x
        w = A.T @ resid
    return x, float(np.linalg.norm(resid))


def _bounds_check(kind, d, weights, span_vectors):
    n_min, n_max = _BOUNDS[kind](d)
    support = np.flatnonzero(weights > 0.0)
    n_actual = int(support.size)
    vecs = np.asarray(span_vectors, dtype=float)[support]
    if vecs.size == 0:
        rank = 0
    else:
        sv = np.linalg.svd(vecs, compute_uv=False)
        rank = int((sv > 1e-8).sum())
    return BoundsCheck(
        n_min=n_min,
        n_max=n_max,
        n_actual=n_actual,
        n_min_ok=n_actual >= n_min,
        n_max_ok=n_actual <= n_max,
        span_ok=rank == d,
    )


def _span_vectors(contacts):
    # The span lower bound looks at the points for theorem1/2 and at the
    # normals for theorem3.
    return contacts.normals if contacts.kind == KIND_T3 else contacts.points


def john_weights(contacts):
    """Solve for nonnegative weights reproducing the lifted identity target.

    Returns a :class:`DecompositionResult` whose residual is recomputed from
    scratch from the returned weights.  A large residual means no valid
    decomposition exists on these contacts; it is reported, never raised.
    """
    if contacts.n == 0:
        raise ValueError("contact set is empty")
    rows, target = lifted_generators(contacts)
    lam, _ = nnls(rows.T, target)
    residual = float(np.linalg.norm(rows.T @ lam - target))
    support = tuple(int(i) for i in np.flatnonzero(lam > 0.0))
    bounds = _bounds_check(contacts.kind, contacts.dim, lam, _span_vectors(contacts))
    return DecompositionResult(weights=lam, residual=residual, support=support, bounds=bounds)


def check_bounds(contacts):
    """Cardinality and span flags (n_min_ok, n_max_ok, span_ok).

    Requires weights to be present (hence strictly positive).
    """
    if contacts.weights is None:
        raise ValueError("check_bounds() needs solved weights")
    b = _bounds_check(
        contacts.kind, contacts.dim, contacts.weights, _span_vectors(contacts)
    )
    return b.n_min_ok, b.n_max_ok, b.span_ok


def _as_rows(generators):
    if isinstance(generators, np.ndarray):
        return np.array(generators, dtype=float)
    pts = list(generators)
    if pts and isinstance(pts[0], LiftedPoint):
        kind, dim = pts[0].kind, pts[0].dim
        for p in pts:
            if p.kind != kind or p.dim != dim:
                raise DimensionMismatchError("generators must share kind and dim")
        return np.array([p.coords for p in pts])
    return np.array(pts, dtype=float)


def caratheodory_reduce(generators, weights, target):
    """Reduce a conic combination to at most ambient-dimension generators.

    generators: lifted points (or raw coordinate rows), weights: positive,
    target: the point the combination reproduces.  While the support exceeds
    the ambient dimension or the active generators are linearly dependent,
    a null-space direction (last column of the orthogonal factor of the
    active rows) shifts the weights until the first one reaches zero, which
    is then dropped.  Ties pick the smallest ratio, then the smallest index.

    Returns (indices, reduced_weights); the conic sum is preserved to
    rounding accumulation.
    """
    rows = _as_rows(generators)
    lam = np.array(weights, dtype=float)
    t = target.coords if isinstance(target, LiftedPoint) else np.asarray(target, dtype=float)
    if rows.ndim != 2 or rows.shape[1] != t.size:
        raise DimensionMismatchError("generators and target live in different spaces")
    if lam.shape != (rows.shape[0],):
        raise DimensionMismatchError("one weight per generator required")
    if lam.min(initial=0.0) < 0.0:
        raise ValueError("weights must be nonnegative")
    tnorm = float(np.linalg.norm(t))
    gap = float(np.linalg.norm(rows.T @ lam - t))
    if gap > 1e-8 * max(tnorm, np.finfo(float).tiny):
        raise ReductionPreconditionError(
            f"weighted generator sum misses the target by {gap:.3e}"
        )
    m = t.size

    support = np.flatnonzero(lam > 0.0)
    while support.size:
        active = rows[support]
        u_fact, sv, _ = np.linalg.svd(active, full_matrices=True)
        if support.size <= m:
            smax = sv.max(initial=0.0)
            if sv.size == support.size and sv.min() > 1e-12 * max(1.0, smax):
                break  # independent and within the bound: minimal
        c = u_fact[:, -1]
        if c[int(np.argmax(np.abs(c)))] < 0.0:
            c = -c
        pos = c > 1e-14
        if not pos.any():
            break  # no direction decreases any weight; cannot reduce further
        ratios = np.full(support.size, np.inf)
        ratios[pos] = lam[support[pos]] / c[pos]
        k = int(np.argmin(ratios))
        tau = float(ratios[k])
        lam[support] -= tau * c
        lam[support[k]] = 0.0
        lam[support] = np.where(lam[support] < 1e-15, 0.0, lam[support])
        support = np.flatnonzero(lam > 0.0)

    return support, lam[support]


def reduce_contacts(contacts):
    """Caratheodory-reduce a weighted contact set; returns the reduced set."""
    if contacts.weights is None:
        raise ValueError("reduce_contacts() needs solved weights")
    rows, target = lifted_generators(contacts)
    idx, lam = caratheodory_reduce(rows, contacts.weights, target)
    return contacts.select(idx, weights=lam)


def decomposition_residuals(contacts):
    """Identity, center, and trace residuals recomputed from raw contacts.

    Independent of the NNLS path: plain weighted sums compared against the
    identity matrix, the origin, and the matrix dimension.
    """
    if contacts.weights is None:
        raise ValueError("weights required")
    d = contacts.dim
    lam = contacts.weights
    u = contacts.points
    if contacts.kind == KIND_T3:
        v = contacts.normals
        total = np.einsum("k,ki,kj->ij", lam, u, v)
        center = lam @ v
        trace_gap = abs(float(np.einsum("k,ki,ki->", lam, u, v)) - d)
    else:
        total = np.einsum("k,ki,kj->ij", lam, u, u)
        center = lam @ u
        trace_gap = abs(float(lam.sum()) - d)
    identity = float(np.linalg.norm(total - np.eye(d)))
    return {
        "identity": identity,
        "center": float(np.linalg.norm(center)),
        "trace_gap": trace_gap,
    }


def contacts_with_result(contacts, result):
    """Attach a decomposition result's positive support to the contact set."""
    idx = np.asarray(result.support, dtype=int)
    return contacts.select(idx, weights=result.weights[idx])
