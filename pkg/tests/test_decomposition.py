import numpy as np
import pytest
from scipy.optimize import nnls as scipy_nnls

from johnbox.body import make_standard
from johnbox.decomposition import (
    ContactSet,
    caratheodory_reduce,
    check_bounds,
    contacts_with_result,
    john_weights,
    lifted_generators,
    nnls,
    reduce_contacts,
)
from johnbox.errors import ReductionPreconditionError
from johnbox.lift import sym_to_vec

from conftest import conic_subset_exists


def _unit_rows(a):
    a = np.asarray(a, dtype=float)
    return a / np.linalg.norm(a, axis=1)[:, None]


class TestJohnWeights:
    def test_axes_theorem1(self):
        cs = ContactSet(dim=2, kind="theorem1", points=np.eye(2))
        res = john_weights(cs)
        assert np.allclose(res.weights, [1.0, 1.0], atol=1e-12)
        assert res.residual <= 1e-12

    def test_simplex_theorem2(self):
        simplex = make_standard("simplex", 2)
        us = simplex.normals  # contacts of the inscribed unit ball
        # oracle: direct summation shows sum u u^T = (3/2) I, sum u = 0
        direct = sum(np.outer(u, u) for u in us)
        assert np.allclose(direct, 1.5 * np.eye(2), atol=1e-12)
        assert np.allclose(us.sum(axis=0), 0.0, atol=1e-12)
        cs = ContactSet(dim=2, kind="theorem2", points=us)
        res = john_weights(cs)
        assert np.allclose(res.weights, 2.0 / 3.0, atol=1e-10)
        assert res.residual <= 1e-10
        weighted_center = res.weights @ us
        assert np.linalg.norm(weighted_center) <= 1e-10

    def test_cube_pairs_theorem3(self):
        pts = np.vstack([np.eye(2), -np.eye(2)])
        cs = ContactSet(dim=2, kind="theorem3", points=pts, normals=pts)
        res = john_weights(cs)
        assert np.allclose(res.weights, 0.5, atol=1e-12)
        assert res.residual <= 1e-12

    def test_rank_deficient_reported_not_raised(self):
        cs = ContactSet(dim=2, kind="theorem1", points=np.array([[1.0, 0.0]]))
        res = john_weights(cs)
        assert res.residual > 0.5
        assert not res.bounds.span_ok

    def test_empty_rejected(self):
        cs = ContactSet(dim=2, kind="theorem1", points=np.zeros((0, 2)))
        with pytest.raises(ValueError):
            john_weights(cs)


class TestNnls:
    def test_against_scipy_oracle(self, rng):
        for _ in range(50):
            m = int(rng.integers(2, 10))
            n = int(rng.integers(1, 12))
            A = rng.standard_normal((m, n))
            b = rng.standard_normal(m)
            x, rnorm = nnls(A, b)
            x_ref, r_ref = scipy_nnls(A, b)
            assert x.min(initial=0.0) >= 0.0
            assert rnorm == pytest.approx(np.linalg.norm(b - A @ x), abs=1e-12)
            assert rnorm <= r_ref + 1e-8

    def test_dual_optimality(self, rng):
        # at the solution, active columns have (numerically) zero gradient
        # and inactive ones nonpositive gradient
        for _ in range(20):
            A = rng.standard_normal((8, 6))
            b = rng.standard_normal(8)
            x, _ = nnls(A, b)
            g = A.T @ (b - A @ x)
            assert np.abs(g[x > 0]).max(initial=0.0) <= 1e-8
            assert g[x == 0].max(initial=0.0) <= 1e-8


class TestCaratheodoryReduce:
    def test_plane_example_with_enumeration_oracle(self):
        rows = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        lam = np.ones(3)
        target = np.array([2.0, 2.0])
        idx, lam2 = caratheodory_reduce(rows, lam, target)
        assert idx.size <= 2
        assert lam2.min() > 0
        assert np.allclose(rows[idx].T @ lam2, target, atol=1e-12)
        assert conic_subset_exists(rows, target, max_size=2)

    def test_already_minimal_unchanged(self):
        rows = np.eye(2)
        idx, lam2 = caratheodory_reduce(rows, np.array([2.0, 2.0]), np.array([2.0, 2.0]))
        assert list(idx) == [0, 1]
        assert np.allclose(lam2, [2.0, 2.0])

    def test_random_overcomplete(self, rng):
        for _ in range(30):
            m = int(rng.integers(2, 13))
            n = m + 10
            rows = rng.standard_normal((n, m))
            lam = rng.uniform(0.1, 1.0, n)
            target = rows.T @ lam
            idx, lam2 = caratheodory_reduce(rows, lam, target)
            assert idx.size <= m
            assert lam2.min() > 0
            drift = np.linalg.norm(rows[idx].T @ lam2 - target)
            assert drift <= 1e-9 * max(1.0, np.linalg.norm(target))

    def test_precondition_violation(self):
        rows = np.eye(2)
        with pytest.raises(ReductionPreconditionError):
            caratheodory_reduce(rows, np.array([1.0, 1.0]), np.array([5.0, 5.0]))

    def test_plus_minus_generators_collapse(self, rng):
        # svec((-u)(-u)^T) == svec(u u^T): the reducer never needs both
        u = rng.standard_normal(3)
        u /= np.linalg.norm(u)
        assert np.array_equal(
            sym_to_vec(np.outer(u, u)), sym_to_vec(np.outer(-u, -u))
        )
        cs = ContactSet(dim=3, kind="theorem1", points=np.vstack([np.eye(3), -np.eye(3)]))
        res = john_weights(cs)
        reduced = reduce_contacts(contacts_with_result(cs, res))
        assert reduced.n <= 3


class TestDegenerateContinuum:
    def test_ball_approximating_polygon_reduces(self, rng):
        # hundreds of near-touching facets: the reducer needs no special
        # casing and reports one valid certificate at the bound
        from johnbox.body import from_halfspaces
        from johnbox.solver import contact_points, mvie

        ang = np.sort(rng.uniform(0, np.pi, 90))
        dirs = np.column_stack([np.cos(ang), np.sin(ang)])
        body = from_halfspaces(np.vstack([dirs, -dirs]), np.ones(180))
        E, _ = mvie(body, mode="symmetric")
        us = np.array([u for u, _ in contact_points(body, E)])
        assert us.shape[0] > 100
        cs = ContactSet(dim=2, kind="theorem1", points=us)
        dec = john_weights(cs)
        reduced = reduce_contacts(contacts_with_result(cs, dec))
        assert reduced.n <= 3
        total = np.einsum("k,ki,kj->ij", reduced.weights, reduced.points, reduced.points)
        assert np.abs(total - np.eye(2)).max() <= 1e-9


class TestCheckBounds:
    def test_cube_flip_after_reduction(self):
        # 4 contacts exceed the d(d+1)/2 = 3 bound; reduction restores it
        pts = np.vstack([np.eye(2), -np.eye(2)])
        pre = ContactSet(dim=2, kind="theorem1", points=pts, weights=np.full(4, 0.5))
        n_min_ok, n_max_ok, span_ok = check_bounds(pre)
        assert n_min_ok and span_ok and not n_max_ok
        post = reduce_contacts(pre)
        n_min_ok, n_max_ok, span_ok = check_bounds(post)
        assert n_min_ok and n_max_ok and span_ok
        # the reduced set still sums to the identity
        total = np.einsum("k,ki,kj->ij", post.weights, post.points, post.points)
        assert np.allclose(total, np.eye(2), atol=1e-12)

    def test_simplex_lower_bound_tight(self):
        simplex = make_standard("simplex", 2)
        cs = ContactSet(
            dim=2, kind="theorem2", points=simplex.normals, weights=np.full(3, 2 / 3)
        )
        n_min_ok, n_max_ok, span_ok = check_bounds(cs)
        assert n_min_ok and n_max_ok and span_ok
        assert cs.n == 3  # == d + 1

    def test_span_failure(self):
        cs = ContactSet(
            dim=2, kind="theorem1",
            points=np.array([[1.0, 0.0]]), weights=np.array([2.0]),
        )
        _, _, span_ok = check_bounds(cs)
        assert not span_ok

    def test_weights_required(self):
        cs = ContactSet(dim=2, kind="theorem1", points=np.eye(2))
        with pytest.raises(ValueError):
            check_bounds(cs)


class TestTraceIdentity:
    def test_theorem12_trace(self, rng):
        # any near-exact decomposition has sum(lambda) close to d
        for d in (2, 3, 4):
            pts = _unit_rows(rng.standard_normal((d * (d + 1), d)))
            cs = ContactSet(dim=d, kind="theorem1", points=pts)
            res = john_weights(cs)
            if res.residual <= 1e-8:
                assert abs(res.weights.sum() - d) <= 1e-6

    def test_theorem3_trace_pairing(self):
        pts = np.vstack([np.eye(2), -np.eye(2)])
        cs = ContactSet(dim=2, kind="theorem3", points=pts, normals=pts)
        res = john_weights(cs)
        pairing = sum(
            lam * (u @ v) for lam, u, v in zip(res.weights, pts, pts)
        )
        assert abs(pairing - 2) <= 1e-10


class TestContactSetValidation:
    def test_nonunit_point_rejected(self):
        with pytest.raises(ValueError):
            ContactSet(dim=2, kind="theorem1", points=np.array([[2.0, 0.0]]))

    def test_theorem3_nonunit_points_allowed(self):
        ContactSet(
            dim=2, kind="theorem3",
            points=np.array([[2.0, 0.0]]), normals=np.array([[1.0, 0.0]]),
        )

    def test_theorem3_needs_normals(self):
        with pytest.raises(ValueError):
            ContactSet(dim=2, kind="theorem3", points=np.eye(2))

    def test_nonpositive_weight_rejected(self):
        with pytest.raises(ValueError):
            ContactSet(
                dim=2, kind="theorem1", points=np.eye(2), weights=np.array([1.0, 0.0])
            )

    def test_generator_shapes(self):
        cs1 = ContactSet(dim=3, kind="theorem1", points=np.eye(3))
        rows, target = lifted_generators(cs1)
        assert rows.shape == (3, 6) and target.shape == (6,)
        cs2 = ContactSet(dim=3, kind="theorem2", points=np.eye(3))
        rows, target = lifted_generators(cs2)
        assert rows.shape == (3, 9) and target.shape == (9,)
        cs3 = ContactSet(dim=3, kind="theorem3", points=np.eye(3), normals=np.eye(3))
        rows, target = lifted_generators(cs3)
        assert rows.shape == (3, 12) and target.shape == (12,)
