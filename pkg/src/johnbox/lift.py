"""Lifting matrices to Euclidean coordinate vectors, plus small matrix tools.

A symmetric d x d matrix is identified with the vector of its upper-triangle
entries in row-major order, with off-diagonal entries scaled by sqrt(2).  The
scaling makes the identification isometric: the Euclidean inner product of two
lifted vectors equals the full entrywise product sum_ij a_ij b_ij of the
matrices, so cone and separation arguments carried out in lifted coordinates
are exactly equivalent to their matrix statements.  Affine variants append
the translation vector; general square matrices are lifted entry by entry in
row-major order with no scaling.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    AsymmetricMatrixError,
    DimensionMismatchError,
    SingularMatrixError,
)

SQRT2 = float(np.sqrt(2.0))

KIND_SYM = "sym"
KIND_SYM_AFFINE = "sym_affine"
KIND_GEN_AFFINE = "gen_affine"

_KINDS = (KIND_SYM, KIND_SYM_AFFINE, KIND_GEN_AFFINE)


def ambient_dim(kind, d):
    """Length of the lifted coordinate vector for matrix dimension d."""
    if kind == KIND_SYM:
        return d * (d + 1) // 2
    if kind == KIND_SYM_AFFINE:
        return d * (d + 3) // 2
    if kind == KIND_GEN_AFFINE:
        return d * (d + 1)
    raise ValueError(f"unknown lift kind {kind!r}")


@dataclass(frozen=True)
class LiftedPoint:
    """A matrix, or matrix/translation pair, as a point of Euclidean space."""

    coords: np.ndarray
    kind: str
    dim: int

    def __post_init__(self):
        coords = np.array(self.coords, dtype=float)
        if self.kind not in _KINDS:
            raise ValueError(f"unknown lift kind {self.kind!r}")
        if self.dim < 1:
            raise ValueError("matrix dimension must be >= 1")
        if coords.ndim != 1 or coords.size != ambient_dim(self.kind, self.dim):
            raise DimensionMismatchError(
                f"kind {self.kind!r} with dim {self.dim} needs "
                f"{ambient_dim(self.kind, self.dim)} coordinates, "
                f"got {coords.size}"
            )
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)

    @property
    def ambient(self):
        return self.coords.size

    def inner(self, other):
        """Euclidean inner product; requires matching kind and dimension."""
        if not isinstance(other, LiftedPoint):
            raise TypeError("inner() expects another LiftedPoint")
        if self.kind != other.kind or self.dim != other.dim:
            raise DimensionMismatchError(
                f"kind/dim mismatch: ({self.kind}, {self.dim}) vs "
                f"({other.kind}, {other.dim})"
            )
        return float(self.coords @ other.coords)


def _square(M, name="matrix"):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatchError(f"{name} must be square, got shape {M.shape}")
    return M


def outer(u, v):
    """Rank-one product u v^T of two vectors of equal dimension."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.ndim != 1 or v.ndim != 1 or u.shape != v.shape:
        raise DimensionMismatchError(
            f"outer() needs two vectors of equal dimension, got {u.shape} and {v.shape}"
        )
    return np.outer(u, v)


def frob(A, B):
    """Entrywise matrix product sum_ij A[i,j] * B[i,j]."""
    A = _square(A)
    B = _square(B)
    if A.shape != B.shape:
        raise DimensionMismatchError(f"shape mismatch {A.shape} vs {B.shape}")
    return float(np.tensordot(A, B))


def symmetrize(M, tol=1e-9):
    """Return (M + M^T)/2, rejecting inputs asymmetric beyond tol.

    Asymmetry is measured entrywise relative to the largest entry magnitude
    (floored at 1), so the guard is scale-aware.
    """
    M = _square(M)
    scale = max(1.0, float(np.abs(M).max(initial=0.0)))
    asym = float(np.abs(M - M.T).max(initial=0.0))
    if asym > tol * scale:
        raise AsymmetricMatrixError(
            f"matrix asymmetry {asym:.3e} exceeds tolerance {tol * scale:.3e}"
        )
    return 0.5 * (M + M.T)


@lru_cache(maxsize=64)
def _triu_pairs(d):
    iu, ju = np.triu_indices(d)
    iu.setflags(write=False)
    ju.setflags(write=False)
    return iu, ju


@lru_cache(maxsize=64)
def sym_basis(d):
    """Orthonormal basis of symmetric d x d matrices in svec order.

    Returned as an array of shape (d(d+1)/2, d, d): unit diagonal matrices
    e_i e_i^T followed row-major by (e_i e_j^T + e_j e_i^T)/sqrt(2).
    """
    iu, ju = _triu_pairs(d)
    m = iu.size
    E = np.zeros((m, d, d))
    for p in range(m):
        i, j = int(iu[p]), int(ju[p])
        if i == j:
            E[p, i, i] = 1.0
        else:
            E[p, i, j] = E[p, j, i] = 1.0 / SQRT2
    E.setflags(write=False)
    return E


def sym_to_vec(A):
    """svec coordinates of an (assumed symmetric) matrix; no symmetry check."""
    A = np.asarray(A, dtype=float)
    d = A.shape[0]
    iu, ju = _triu_pairs(d)
    scale = np.where(iu == ju, 1.0, SQRT2)
    return A[iu, ju] * scale


def vec_to_sym(c, d):
    """Inverse of sym_to_vec."""
    c = np.asarray(c, dtype=float)
    iu, ju = _triu_pairs(d)
    vals = c / np.where(iu == ju, 1.0, SQRT2)
    A = np.zeros((d, d))
    A[iu, ju] = vals
    A[ju, iu] = vals
    return A


def svec(A, tol=1e-9):
    """Lift a symmetric matrix to its isometric coordinate vector."""
    A = symmetrize(A, tol)
    return LiftedPoint(sym_to_vec(A), KIND_SYM, A.shape[0])


def smat(p):
    """Recover the symmetric matrix from a lifted point of kind 'sym'."""
    if not isinstance(p, LiftedPoint):
        raise TypeError("smat() expects a LiftedPoint")
    if p.kind != KIND_SYM:
        raise DimensionMismatchError(f"smat() needs kind 'sym', got {p.kind!r}")
    return vec_to_sym(p.coords, p.dim)


def lift_affine(A, a, tol=1e-9):
    """Lift a (symmetric matrix, translation) pair.

    The inner product of two such points is frob(A, B) + a . b.
    """
    A = symmetrize(A, tol)
    a = np.asarray(a, dtype=float)
    d = A.shape[0]
    if a.shape != (d,):
        raise DimensionMismatchError(
            f"translation has shape {a.shape}, expected ({d},)"
        )
    return LiftedPoint(np.concatenate([sym_to_vec(A), a]), KIND_SYM_AFFINE, d)


def split_affine(p):
    """Recover (A, a) from a lifted point of kind 'sym_affine'."""
    if not isinstance(p, LiftedPoint) or p.kind != KIND_SYM_AFFINE:
        raise DimensionMismatchError("split_affine() needs kind 'sym_affine'")
    d = p.dim
    m = d * (d + 1) // 2
    return vec_to_sym(p.coords[:m], d), np.array(p.coords[m:])


def lift_general(M, a):
    """Lift a (general matrix, translation) pair entry by entry, row-major.

    No scaling is applied: the inner product of two such points is the full
    entrywise product of the matrices plus the dot product of the
    translations.
    """
    M = _square(M)
    a = np.asarray(a, dtype=float)
    d = M.shape[0]
    if a.shape != (d,):
        raise DimensionMismatchError(
            f"translation has shape {a.shape}, expected ({d},)"
        )
    return LiftedPoint(np.concatenate([M.ravel(), a]), KIND_GEN_AFFINE, d)


def split_general(p):
    """Recover (M, a) from a lifted point of kind 'gen_affine'."""
    if not isinstance(p, LiftedPoint) or p.kind != KIND_GEN_AFFINE:
        raise DimensionMismatchError("split_general() needs kind 'gen_affine'")
    d = p.dim
    return np.array(p.coords[: d * d]).reshape(d, d), np.array(p.coords[d * d :])


def polar_decompose(M):
    """Factor a nonsingular matrix as M = A R, A symmetric positive definite
    and R orthogonal.

    A is the symmetric square root of M M^T computed from a symmetric
    eigendecomposition; R = A^{-1} M.
    """
    M = _square(M)
    d = M.shape[0]
    scale = max(1.0, float(np.linalg.norm(M))) ** d
    det = float(np.linalg.det(M))
    if abs(det) <= 1e-12 * scale:
        raise SingularMatrixError(f"matrix is singular (det={det:.3e})")
    w, U = np.linalg.eigh(M @ M.T)
    w = np.clip(w, 0.0, None)  # rounding may push tiny eigenvalues negative
    A = (U * np.sqrt(w)) @ U.T
    A = 0.5 * (A + A.T)
    R = np.linalg.solve(A, M)
    return A, R
