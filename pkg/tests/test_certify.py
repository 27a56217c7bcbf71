import numpy as np
import pytest

from johnbox.body import VPolytope, from_halfspaces, make_standard
from johnbox.certify import (
    Certificate,
    certificate_from_obj,
    certificate_to_obj,
    check_theorem1,
    check_theorem2,
    check_theorem3,
    containment_ratio,
)
from johnbox.decomposition import ContactSet
from johnbox.errors import (
    AsymmetricBodyError,
    BallNotInscribedError,
    ContainmentError,
    SchemaError,
)
from johnbox.solver import EllipsoidParam, john_position, mvie


def _t1_cert(points, weights, dim):
    cs = ContactSet(dim=dim, kind="theorem1", points=points, weights=weights)
    return Certificate(theorem=1, contacts=cs)


def _t2_cert(points, weights, dim):
    cs = ContactSet(dim=dim, kind="theorem2", points=points, weights=weights)
    return Certificate(theorem=2, contacts=cs)


def _t3_cert(points, normals, weights, dim):
    cs = ContactSet(
        dim=dim, kind="theorem3", points=points, normals=normals, weights=weights
    )
    return Certificate(theorem=3, contacts=cs)


class TestTheorem1:
    def test_cube_pairs_valid(self):
        cube = make_standard("cube", 3)
        pts = np.vstack([np.eye(3), -np.eye(3)])
        cert = check_theorem1(cube, _t1_cert(pts, np.full(6, 0.5), 3))
        assert cert.valid
        assert cert.verdict["certifies_maximality"]
        assert cert.residuals["identity"] <= 1e-12

    def test_cube_one_sided_attains_lower_bound(self):
        cube = make_standard("cube", 3)
        cert = check_theorem1(cube, _t1_cert(np.eye(3), np.ones(3), 3))
        assert cert.valid
        assert cert.contacts.n == 3  # n == d

    def test_scaled_weights_invalid(self):
        cube = make_standard("cube", 3)
        cert = check_theorem1(cube, _t1_cert(np.eye(3), np.full(3, 2.0), 3))
        assert not cert.valid
        # residual equals |I|_F for doubled weights
        assert cert.residuals["identity"] == pytest.approx(np.sqrt(3), abs=1e-12)

    def test_asymmetric_body_rejected(self):
        simplex = make_standard("simplex", 2)
        with pytest.raises(AsymmetricBodyError):
            check_theorem1(simplex, _t1_cert(np.eye(2), np.ones(2), 2))

    def test_ball_not_inscribed_rejected(self):
        small = from_halfspaces(
            np.vstack([np.eye(2), -np.eye(2)]), np.full(4, 0.5)
        )
        with pytest.raises(BallNotInscribedError):
            check_theorem1(small, _t1_cert(np.eye(2), np.ones(2), 2))


class TestTheorem2:
    def test_simplex_valid(self):
        for d in (2, 3):
            simplex = make_standard("simplex", d)
            us = simplex.normals
            lam = np.full(d + 1, d / (d + 1))
            # oracle: direct sums hit the identity and the origin
            total = np.einsum("k,ki,kj->ij", lam, us, us)
            assert np.allclose(total, np.eye(d), atol=1e-12)
            assert np.allclose(lam @ us, 0.0, atol=1e-12)
            cert = check_theorem2(simplex, _t2_cert(us, lam, d))
            assert cert.valid
            assert cert.contacts.n == d + 1

    def test_cube_pair_cert_valid_here_too(self):
        cube = make_standard("cube", 2)
        pts = np.vstack([np.eye(2), -np.eye(2)])
        cert = check_theorem2(cube, _t2_cert(pts, np.full(4, 0.5), 2))
        assert cert.valid

    def test_dropped_contact_breaks_center_and_identity(self):
        simplex = make_standard("simplex", 2)
        us = simplex.normals[:2]
        cert = check_theorem2(simplex, _t2_cert(us, np.full(2, 2 / 3), 2))
        assert not cert.valid
        assert cert.residuals["center"] > 1e-3
        assert cert.residuals["identity"] > 1e-3

    def test_center_only_corruption(self):
        # weights rebalanced between antipodal contacts: identity still exact,
        # center condition alone fails
        cube = make_standard("cube", 2)
        pts = np.vstack([np.eye(2), -np.eye(2)])
        lam = np.array([0.75, 0.5, 0.25, 0.5])
        cert = check_theorem2(cube, _t2_cert(pts, lam, 2))
        assert not cert.valid
        assert cert.verdict["checks"]["identity_sum"]["ok"]
        assert not cert.verdict["checks"]["center_sum"]["ok"]


class TestTheorem3:
    def test_cube_self_pairs_valid(self):
        cube = make_standard("cube", 2)
        B = VPolytope(2, [[1, 1], [1, -1], [-1, 1], [-1, -1]])
        pts = np.vstack([np.eye(2), -np.eye(2)])
        cert = check_theorem3(cube, B, _t3_cert(pts, pts, np.full(4, 0.5), 2))
        assert cert.valid
        assert not cert.verdict["certifies_maximality"]
        assert "does not certify maximality" in cert.verdict["message"]

    def test_flipped_normal_outside_cone(self):
        cube = make_standard("cube", 2)
        B = VPolytope(2, [[1, 1], [1, -1], [-1, 1], [-1, -1]])
        pts = np.vstack([np.eye(2), -np.eye(2)])
        normals = pts.copy()
        normals[0] = -normals[0]  # -e1 is not an outward normal at e1
        cert = check_theorem3(cube, B, _t3_cert(pts, normals, np.full(4, 0.5), 2))
        assert not cert.valid
        assert not cert.verdict["checks"]["normals_in_cone"]["ok"]

    def test_diamond_in_cube_necessary_only(self):
        # the inscribed diamond satisfies the contact conditions without
        # being the largest affine image: the checker must accept the
        # decomposition while refusing to certify maximality
        cube = make_standard("cube", 2)
        diamond = VPolytope(2, np.vstack([np.eye(2), -np.eye(2)]))
        pts = np.vstack([np.eye(2), -np.eye(2)])
        lam = np.full(4, 0.5)
        total = np.einsum("k,ki,kj->ij", lam, pts, pts)
        assert np.allclose(total, np.eye(2), atol=1e-15)  # oracle
        cert = check_theorem3(cube, diamond, _t3_cert(pts, pts, lam, 2))
        assert cert.valid
        assert not cert.verdict["certifies_maximality"]

    def test_inner_body_outside_container(self):
        cube = make_standard("cube", 2)
        big = VPolytope(2, [[2, 0], [-2, 0], [0, 2], [0, -2]])
        pts = np.vstack([np.eye(2), -np.eye(2)])
        with pytest.raises(ContainmentError):
            check_theorem3(cube, big, _t3_cert(pts, pts, np.full(4, 0.5), 2))


class TestSoundness:
    """Corruption matrix: every tamper flips the verdict."""

    TOL = 1e-6

    def _valid_t2(self):
        simplex = make_standard("simplex", 2)
        us = simplex.normals
        return simplex, us, np.full(3, 2 / 3)

    def test_lambda_scaled(self):
        simplex, us, lam = self._valid_t2()
        assert check_theorem2(simplex, _t2_cert(us, lam, 2), self.TOL).valid
        bad = lam * (1 + 10 * self.TOL)
        assert not check_theorem2(simplex, _t2_cert(us, bad, 2), self.TOL).valid

    def test_point_off_sphere(self):
        simplex, us, lam = self._valid_t2()
        bad = us.copy()
        bad[0] = bad[0] * (1 + 10 * self.TOL)
        cs = ContactSet.__new__(ContactSet)  # bypass unit-norm guard
        object.__setattr__(cs, "dim", 2)
        object.__setattr__(cs, "kind", "theorem2")
        object.__setattr__(cs, "points", bad)
        object.__setattr__(cs, "normals", None)
        object.__setattr__(cs, "weights", lam)
        cert = Certificate(theorem=2, contacts=cs)
        assert not check_theorem2(simplex, cert, self.TOL).valid

    def test_point_off_boundary(self):
        # rotate a contact along the sphere away from the touching facet
        cube = make_standard("cube", 2)
        pts = np.vstack([np.eye(2), -np.eye(2)]).astype(float)
        pts[0] = np.array([1.0, 1.0]) / np.sqrt(2)  # on sphere, interior of C
        cert = _t1_cert(pts, np.full(4, 0.5), 2)
        checked = check_theorem1(cube, cert, self.TOL)
        assert not checked.valid
        assert not checked.verdict["checks"]["boundary"]["ok"]


class TestContainmentRatio:
    def test_cube_sqrt_d(self):
        for d in (2, 3, 4):
            cube = make_standard("cube", d)
            assert containment_ratio(cube) == pytest.approx(np.sqrt(d), abs=1e-9)

    def test_positioned_double_cube(self):
        cube2 = from_halfspaces(
            np.vstack([np.eye(3), -np.eye(3)]), np.full(6, 2.0)
        )
        E, _ = mvie(cube2, mode="symmetric")
        pos = john_position(cube2, E)
        assert containment_ratio(pos) == pytest.approx(np.sqrt(3), abs=1e-6)

    def test_ball_approximation(self, rng):
        # many tangent halfplanes at distance 1: ratio stays near 1
        angles = np.sort(rng.uniform(0, np.pi, 600))
        dirs = np.column_stack([np.cos(angles), np.sin(angles)])
        body = from_halfspaces(np.vstack([dirs, -dirs]), np.ones(1200))
        rho = containment_ratio(body)
        assert 1.0 <= rho <= 1.001

    def test_random_symmetric_within_sqrt_d(self):
        for seed in range(10):
            body = make_standard("random_symmetric", 3, seed=seed)
            E, _ = mvie(body, mode="symmetric")
            pos = john_position(body, E)
            assert containment_ratio(pos) <= np.sqrt(3) + 1e-6

    def test_requires_inscribed_ball(self):
        small = from_halfspaces(
            np.vstack([np.eye(2), -np.eye(2)]), np.full(4, 0.5)
        )
        with pytest.raises(BallNotInscribedError):
            containment_ratio(small)


class TestCertificateJson:
    def test_round_trip_stable(self):
        cube = make_standard("cube", 3)
        pts = np.vstack([np.eye(3), -np.eye(3)])
        cert = _t1_cert(pts, np.full(6, 0.5), 3)
        cert.ellipsoid = EllipsoidParam(A=np.eye(3), a=np.zeros(3))
        cert = check_theorem1(cube, cert)
        obj1 = certificate_to_obj(cert)
        back = certificate_from_obj(obj1)
        obj2 = certificate_to_obj(back)
        assert obj1 == obj2
        assert back.valid == cert.valid
        assert np.array_equal(back.contacts.points, cert.contacts.points)

    def test_theorem3_round_trip(self):
        pts = np.vstack([np.eye(2), -np.eye(2)])
        cert = _t3_cert(pts, pts, np.full(4, 0.5), 2)
        obj = certificate_to_obj(cert)
        back = certificate_from_obj(obj)
        assert np.array_equal(back.contacts.normals, cert.contacts.normals)

    def test_schema_errors(self):
        with pytest.raises(SchemaError):
            certificate_from_obj({"theorem": 7, "contacts": []})
        with pytest.raises(SchemaError):
            certificate_from_obj({"contacts": []})
        with pytest.raises(SchemaError):
            certificate_from_obj(
                {"theorem": 1, "contacts": [{"u": [1, 0], "lambda": -1.0}]}
            )


class TestTraceInvariant:
    def test_valid_certs_have_trace_d(self):
        cube = make_standard("cube", 3)
        pts = np.vstack([np.eye(3), -np.eye(3)])
        cert = check_theorem1(cube, _t1_cert(pts, np.full(6, 0.5), 3))
        assert cert.residuals["trace_gap"] <= 10 * 1e-6
