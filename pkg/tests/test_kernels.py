"""Kernel backends: correctness against finite differences, and parity
between the compiled extension and the pure-numpy fallback."""

import numpy as np
import pytest

from johnbox import _kernels
from johnbox._kernels import pure
from johnbox.lift import sym_to_vec, vec_to_sym

from conftest import finite_diff_grad, finite_diff_hess, random_spd

compiled = pytest.importorskip(
    "johnbox._kernels._core", reason="compiled kernels not built"
)


def _random_instance(rng, d, n, with_center):
    A = random_spd(rng, d, spread=0.3)
    a = rng.standard_normal(d) * 0.05 if with_center else np.zeros(d)
    V = rng.standard_normal((n, d))
    V /= np.linalg.norm(V, axis=1)[:, None]
    h = 2.0 + rng.uniform(0, 1, n)
    return A, a, V, h


class TestFacetSlacks:
    def test_matches_direct_formula(self, rng):
        A, a, V, h = _random_instance(rng, 4, 30, True)
        s, G, nrm = pure.facet_slacks(V, h, A, a)
        for i in range(30):
            g = A @ V[i]
            assert np.allclose(G[i], g, atol=1e-13)
            assert nrm[i] == pytest.approx(np.linalg.norm(g), abs=1e-13)
            assert s[i] == pytest.approx(h[i] - a @ V[i] - np.linalg.norm(g), abs=1e-13)


class TestBarrierSystem:
    @pytest.mark.parametrize("with_center", [False, True])
    def test_gradient_and_hessian_vs_finite_differences(self, rng, with_center):
        d, n = 3, 12
        m = d * (d + 1) // 2
        A, a, V, h = _random_instance(rng, d, n, with_center)
        z = np.concatenate([sym_to_vec(A), a]) if with_center else sym_to_vec(A)

        def barrier(zv):
            Az = vec_to_sym(zv[:m], d)
            az = zv[m:] if with_center else np.zeros(d)
            s, _, _ = pure.facet_slacks(V, h, Az, az)
            return float(np.log(s).sum())

        s, G, nrm = pure.facet_slacks(V, h, A, a)
        grad, hess = pure.barrier_system(V, G, nrm, s, with_center)
        assert np.allclose(grad, finite_diff_grad(barrier, z), atol=1e-5)
        assert np.allclose(hess, finite_diff_hess(barrier, z), atol=1e-3)
        assert np.allclose(hess, hess.T, atol=1e-12)


class TestLinearBarrier:
    def test_vs_finite_differences(self, rng):
        n, dim = 20, 6
        C = rng.standard_normal((n, dim))
        z = rng.standard_normal(dim) * 0.01
        rhs = 1.0 + rng.uniform(0, 1, n)
        s = rhs - C @ z

        def barrier(zv):
            return float(np.log(rhs - C @ zv).sum())

        grad, hess = pure.linear_barrier_system(C, s)
        assert np.allclose(grad, finite_diff_grad(barrier, z), atol=1e-5)
        assert np.allclose(hess, finite_diff_hess(barrier, z), atol=1e-3)


class TestBackendParity:
    @pytest.mark.parametrize("d,n", [(2, 6), (4, 40), (6, 150)])
    @pytest.mark.parametrize("with_center", [False, True])
    def test_same_results(self, rng, d, n, with_center):
        A, a, V, h = _random_instance(rng, d, n, with_center)
        s1, G1, n1 = pure.facet_slacks(V, h, A, a)
        s2, G2, n2 = compiled.facet_slacks(V, h, A, a)
        assert np.allclose(s1, s2, rtol=1e-13, atol=1e-14)
        assert np.allclose(G1, G2, rtol=1e-13, atol=1e-14)
        assert np.allclose(n1, n2, rtol=1e-13, atol=1e-14)

        g1, H1 = pure.barrier_system(V, G1, n1, s1, with_center)
        g2, H2 = compiled.barrier_system(V, G2, n2, s2, with_center)
        assert np.allclose(g1, g2, rtol=1e-12, atol=1e-12)
        assert np.allclose(H1, H2, rtol=1e-12, atol=1e-10)

    def test_linear_parity(self, rng):
        C = rng.standard_normal((80, 12))
        s = 1.0 + rng.uniform(0, 1, 80)
        g1, H1 = pure.linear_barrier_system(C, s)
        g2, H2 = compiled.linear_barrier_system(C, s)
        assert np.allclose(g1, g2, rtol=1e-12, atol=1e-12)
        assert np.allclose(H1, H2, rtol=1e-12, atol=1e-10)

    def test_read_only_inputs_accepted(self, rng):
        # Frozen arrays (the body dataclasses freeze theirs) must pass.
        A, a, V, h = _random_instance(rng, 3, 10, True)
        for arr in (A, a, V, h):
            arr.setflags(write=False)
        s, G, nrm = compiled.facet_slacks(V, h, A, a)
        compiled.barrier_system(V, G, nrm, s, True)


class TestSwitching:
    def test_use_and_restore(self):
        prev = _kernels.active_backend()
        try:
            _kernels.use("pure")
            assert _kernels.active_backend() == "pure"
            _kernels.use("compiled")
            assert _kernels.active_backend() == "compiled"
        finally:
            _kernels.use(prev)

    def test_unknown_backend(self):
        with pytest.raises(ValueError):
            _kernels.use("fortran")
