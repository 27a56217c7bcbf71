"""Shared oracles and fixtures.

The oracles here deliberately avoid the library's own code paths: brute
double sums, finite differences, subset enumeration, and grid search, so
every derived expectation is checked against an independent computation.
"""

import itertools

import numpy as np
import pytest


def frob_double_sum(A, B):
    """Entrywise product by explicit double loop (oracle for frob/svec)."""
    total = 0.0
    for i in range(A.shape[0]):
        for j in range(A.shape[1]):
            total += A[i, j] * B[i, j]
    return total


def finite_diff_grad(f, z, h=1e-6):
    g = np.zeros_like(z)
    for i in range(z.size):
        zp, zm = z.copy(), z.copy()
        zp[i] += h
        zm[i] -= h
        g[i] = (f(zp) - f(zm)) / (2 * h)
    return g


def finite_diff_hess(f, z, h=1e-4):
    n = z.size
    H = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            zpp, zpm, zmp, zmm = z.copy(), z.copy(), z.copy(), z.copy()
            zpp[[i, j]] += [h, h] if i != j else [2 * h, 0]
            if i == j:
                zpp = z.copy(); zpp[i] += h
                zmm = z.copy(); zmm[i] -= h
                H[i, i] = (f(zpp) - 2 * f(z) + f(zmm)) / h**2
            else:
                zpm[i] += h; zpm[j] -= h
                zmp[i] -= h; zmp[j] += h
                zmm[i] -= h; zmm[j] -= h
                H[i, j] = (f(zpp) - f(zpm) - f(zmp) + f(zmm)) / (4 * h**2)
    return H


def conic_subset_exists(rows, target, max_size, tol=1e-9):
    """Enumeration oracle: is the target a conic combination of at most
    max_size of the generator rows?"""
    from scipy.optimize import nnls as scipy_nnls

    n = rows.shape[0]
    for size in range(0, max_size + 1):
        for idx in itertools.combinations(range(n), size):
            if size == 0:
                if np.linalg.norm(target) <= tol:
                    return True
                continue
            sol, rnorm = scipy_nnls(rows[list(idx)].T, target)
            if rnorm <= tol:
                return True
    return False


def random_spd(rng, d, spread=1.0):
    Q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    eigs = np.exp(rng.uniform(-spread, spread, d))
    return (Q * eigs) @ Q.T


@pytest.fixture
def rng():
    return np.random.default_rng(20240831)
