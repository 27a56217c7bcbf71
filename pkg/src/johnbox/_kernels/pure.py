"""Reference numpy implementations of the per-facet hot kernels.

The compiled extension ``johnbox._kernels._core`` provides the same three
entry points with identical semantics; this module is the import-time
fallback and the ground truth the extension is benchmarked and tested
against.

Conventions shared by both backends:

* ``V`` is the (n, d) array of unit facet normals, ``h`` the offsets.
* The lifted coordinates of a symmetric matrix follow the svec order of
  :mod:`johnbox.lift` (row-major upper triangle, off-diagonals * sqrt(2)).
* "Slack" of facet i at an ellipsoid (A, a) is h_i - a.v_i - |A v_i|.
"""

import numpy as np

from ..lift import sym_basis


def facet_slacks(V, h, A, a):
    """Tangency slacks of an ellipsoid (A, a) against facets (V, h).

    Returns (s, G, nrm): the slack vector, the products G[i] = A v_i, and
    their Euclidean norms.
    """
    G = V @ A
    nrm = np.sqrt(np.einsum("ij,ij->i", G, G))
    s = h - V @ a - nrm
    return s, G, nrm


def barrier_system(V, G, nrm, s, with_center):
    """Gradient and Hessian of sum_i log s_i in lifted coordinates.

    Coordinates are svec(A) followed, when ``with_center`` is true, by the
    center a.  G and nrm must come from :func:`facet_slacks` for the same
    (A, a); s must be strictly positive.
    """
    n, d = V.shape
    m = d * (d + 1) // 2
    E = sym_basis(d)

    # Rows W[i, p] = E_p v_i; then W[i] @ g_i is the svec gradient of |A v_i|
    # scaled by nrm_i, and W[i] @ W[i].T the Gram matrix behind its curvature.
    W = np.einsum("pij,nj->npi", E, V)
    w = np.einsum("npi,ni->np", W, G)
    gs = w / nrm[:, None]  # d|A v_i| / d svec(A)

    inv_s = 1.0 / s
    if with_center:
        c = np.concatenate([-gs, -V], axis=1)
    else:
        c = -gs
    grad = c.T @ inv_s
    hess = -(c * (inv_s**2)[:, None]).T @ c

    # Second-derivative of the norm term: (K_i - gs_i gs_i^T) / nrm_i per
    # facet, entering the Hessian with weight -1/s_i on the svec block.
    coef = inv_s / nrm
    K = np.einsum("npi,nqi->npq", W, W)
    curv = np.einsum("n,npq->pq", coef, K) - (gs * coef[:, None]).T @ gs
    hess[:m, :m] -= curv
    return grad, hess


def linear_barrier_system(C, s):
    """Gradient and Hessian of sum_t log s_t for slacks s = h - C @ z."""
    inv_s = 1.0 / s
    grad = -(C.T @ inv_s)
    hess = -(C * (inv_s**2)[:, None]).T @ C
    return grad, hess
