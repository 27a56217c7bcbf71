# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled per-facet kernels; see johnbox._kernels.pure for the contract."""

from libc.math cimport sqrt

import numpy as np


cdef double SQRT2 = sqrt(2.0)


def facet_slacks(V, h, A, a):
    V = np.ascontiguousarray(V, dtype=np.float64)
    h = np.ascontiguousarray(h, dtype=np.float64)
    A = np.ascontiguousarray(A, dtype=np.float64)
    a = np.ascontiguousarray(a, dtype=np.float64)

    cdef const double[:, ::1] Vm = V
    cdef const double[::1] hm = h
    cdef const double[:, ::1] Am = A
    cdef const double[::1] am = a
    cdef Py_ssize_t n = Vm.shape[0]
    cdef Py_ssize_t d = Vm.shape[1]

    s_arr = np.empty(n, dtype=np.float64)
    G_arr = np.empty((n, d), dtype=np.float64)
    nrm_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] sm = s_arr
    cdef double[:, ::1] Gm = G_arr
    cdef double[::1] nm = nrm_arr

    cdef Py_ssize_t i, j, k
    cdef double acc, sq, av
    for i in range(n):
        sq = 0.0
        av = 0.0
        for k in range(d):
            acc = 0.0
            for j in range(d):
                acc += Vm[i, j] * Am[j, k]
            Gm[i, k] = acc
            sq += acc * acc
            av += Vm[i, k] * am[k]
        nm[i] = sqrt(sq)
        sm[i] = hm[i] - av - nm[i]
    return s_arr, G_arr, nrm_arr


def barrier_system(V, G, nrm, s, with_center):
    V = np.ascontiguousarray(V, dtype=np.float64)
    G = np.ascontiguousarray(G, dtype=np.float64)
    nrm = np.ascontiguousarray(nrm, dtype=np.float64)
    s = np.ascontiguousarray(s, dtype=np.float64)

    cdef const double[:, ::1] Vm = V
    cdef const double[:, ::1] Gm = G
    cdef const double[::1] nrmm = nrm
    cdef const double[::1] sm = s
    cdef Py_ssize_t n = Vm.shape[0]
    cdef Py_ssize_t d = Vm.shape[1]
    cdef Py_ssize_t m = d * (d + 1) // 2
    cdef bint center = bool(with_center)
    cdef Py_ssize_t dim = m + d if center else m

    iu, ju = np.triu_indices(d)
    cdef const long[::1] ii = np.ascontiguousarray(iu, dtype=np.int64)
    cdef const long[::1] jj = np.ascontiguousarray(ju, dtype=np.int64)

    grad_arr = np.zeros(dim, dtype=np.float64)
    hess_arr = np.zeros((dim, dim), dtype=np.float64)
    cdef double[::1] grad = grad_arr
    cdef double[:, ::1] hess = hess_arr

    # Scratch: c is the slack gradient, (av, bv) the two nonzero entries of
    # each row of the sparse basis-times-normal matrix W.
    c_arr = np.empty(dim, dtype=np.float64)
    av_arr = np.empty(m, dtype=np.float64)
    bv_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] c = c_arr
    cdef double[::1] av = av_arr
    cdef double[::1] bv = bv_arr

    cdef Py_ssize_t t, p, q, r, pi, pj, qi, qj
    cdef double inv_s, inv_s2, coef, w, kpq, cp, gsp
    for t in range(n):
        inv_s = 1.0 / sm[t]
        inv_s2 = inv_s * inv_s
        coef = inv_s / nrmm[t]
        for p in range(m):
            pi = ii[p]
            pj = jj[p]
            if pi == pj:
                w = Vm[t, pi] * Gm[t, pi]
                av[p] = Vm[t, pi]
                bv[p] = 0.0
            else:
                w = (Vm[t, pi] * Gm[t, pj] + Vm[t, pj] * Gm[t, pi]) / SQRT2
                av[p] = Vm[t, pj] / SQRT2
                bv[p] = Vm[t, pi] / SQRT2
            c[p] = -w / nrmm[t]
        if center:
            for r in range(d):
                c[m + r] = -Vm[t, r]

        for p in range(dim):
            cp = c[p]
            grad[p] += cp * inv_s
            for q in range(p, dim):
                hess[p, q] -= cp * c[q] * inv_s2

        # svec-block curvature of the norm term: -(K - gs gs^T)/(nrm * s),
        # where gs = -c[:m] and K[p, q] is a dot of two 2-sparse rows.
        for p in range(m):
            pi = ii[p]
            pj = jj[p]
            gsp = -c[p]
            for q in range(p, m):
                qi = ii[q]
                qj = jj[q]
                kpq = 0.0
                if pi == qi:
                    kpq += av[p] * av[q]
                if pi == qj:
                    kpq += av[p] * bv[q]
                if pj == qi:
                    kpq += bv[p] * av[q]
                if pj == qj:
                    kpq += bv[p] * bv[q]
                hess[p, q] -= coef * (kpq - gsp * (-c[q]))

    for p in range(dim):
        for q in range(p + 1, dim):
            hess[q, p] = hess[p, q]
    return grad_arr, hess_arr


def linear_barrier_system(C, s):
    C = np.ascontiguousarray(C, dtype=np.float64)
    s = np.ascontiguousarray(s, dtype=np.float64)
    cdef const double[:, ::1] Cm = C
    cdef const double[::1] sm = s
    cdef Py_ssize_t n = Cm.shape[0]
    cdef Py_ssize_t dim = Cm.shape[1]

    grad_arr = np.zeros(dim, dtype=np.float64)
    hess_arr = np.zeros((dim, dim), dtype=np.float64)
    cdef double[::1] grad = grad_arr
    cdef double[:, ::1] hess = hess_arr

    cdef Py_ssize_t t, p, q
    cdef double inv_s, inv_s2, cp
    for t in range(n):
        inv_s = 1.0 / sm[t]
        inv_s2 = inv_s * inv_s
        for p in range(dim):
            cp = Cm[t, p]
            grad[p] -= cp * inv_s
            for q in range(p, dim):
                hess[p, q] -= cp * Cm[t, q] * inv_s2
    for p in range(dim):
        for q in range(p + 1, dim):
            hess[q, p] = hess[p, q]
    return grad_arr, hess_arr
