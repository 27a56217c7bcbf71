"""Independent verification of contact-point decomposition certificates.

The checkers recompute every sum from the raw certificate data and share no
state with the solver.  A theorem-1 or theorem-2 verdict of valid certifies
that the unit ball is the unique maximum-volume ellipsoid of the positioned
body; a theorem-3 verdict is a necessary-condition check only and never
certifies maximality (the underlying feasible set of matrices is not convex,
so the stationarity conditions do not exclude larger images elsewhere).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .affine import AffineMap, map_from_obj, map_to_obj
from .body import HPolytope, VPolytope, classify, extreme_point, is_centrally_symmetric
from .decomposition import (
    KIND_T1,
    KIND_T2,
    KIND_T3,
    ContactSet,
    check_bounds,
    decomposition_residuals,
    nnls,
)
from .errors import (
    AsymmetricBodyError,
    BallNotInscribedError,
    ContainmentError,
    DimensionMismatchError,
    SchemaError,
)
from .solver import EllipsoidParam, ellipsoid_from_obj, ellipsoid_to_obj

# Conic membership of a normal among active facet normals is decided by
# nonnegative least-squares feasibility at this fixed tolerance.
CONE_FEAS_TOL = 1e-8

_KIND_FOR_THEOREM = {1: KIND_T1, 2: KIND_T2, 3: KIND_T3}


@dataclass
class Certificate:
    """A full decomposition record: contacts, weights, residuals, verdict."""

    theorem: int
    contacts: ContactSet
    ellipsoid: EllipsoidParam | None = None
    affine_map: AffineMap | None = None
    residuals: dict = field(default_factory=dict)
    verdict: dict = field(default_factory=dict)
    body_ref: str | None = None

    def __post_init__(self):
        if self.theorem not in (1, 2, 3):
            raise ValueError("theorem must be 1, 2, or 3")
        if self.contacts.kind != _KIND_FOR_THEOREM[self.theorem]:
            raise ValueError(
                f"theorem {self.theorem} certificate needs contacts of kind "
                f"{_KIND_FOR_THEOREM[self.theorem]!r}"
            )

    @property
    def valid(self):
        return bool(self.verdict.get("valid", False))


def _check(value, tol):
    return {"value": float(value), "tol": float(tol), "ok": bool(value <= tol)}


def _flag(ok, note=None):
    entry = {"ok": bool(ok)}
    if note is not None:
        entry["note"] = note
    return entry


def _boundary_report(C, points, tol):
    # Worst distance of any contact from the boundary surface, plus whether
    # every contact classifies as boundary at the given tolerance.
    worst = 0.0
    all_boundary = True
    for u in points:
        vals = C.normals @ u - C.offsets
        worst = max(worst, abs(float(vals.max())))
        if classify(C, u, tol).classification != "boundary":
            all_boundary = False
    return worst, all_boundary


def _finish(cert, checks, residuals, certifies_maximality, message):
    valid = all(entry["ok"] for entry in checks.values())
    verdict = {
        "valid": valid,
        "theorem": cert.theorem,
        "certifies_maximality": bool(certifies_maximality and valid),
        "message": message if valid else "certificate INVALID: "
        + ", ".join(name for name, entry in checks.items() if not entry["ok"]),
        "checks": checks,
    }
    return replace(cert, residuals=residuals, verdict=verdict)


def _require_ball_inscribed(C, tol):
    if float(C.offsets.min()) < 1.0 - tol:
        raise BallNotInscribedError(
            f"smallest facet offset {C.offsets.min():.6f} < 1 - tol; "
            "body is not in unit-ball position"
        )


def check_theorem1(C, cert, tol=1e-6):
    """Verify a centered decomposition certificate against a symmetric body.

    Requires C in John position (unit ball inscribed) and centrally
    symmetric.  Checks: unit contacts, contacts on the boundary, positive
    weights, weighted rank-one sum equal to the identity, and the
    cardinality bounds d <= n <= d(d+1)/2.  A valid verdict certifies the
    unit ball as the unique maximum-volume ellipsoid of C.
    """
    if cert.theorem != 1:
        raise ValueError("not a theorem-1 certificate")
    contacts = cert.contacts
    if contacts.weights is None:
        raise ValueError("certificate has no weights")
    if C.dim != contacts.dim:
        raise DimensionMismatchError("body and contacts disagree on dimension")
    _require_ball_inscribed(C, tol)
    if not is_centrally_symmetric(C, tol):
        raise AsymmetricBodyError("theorem-1 mode requires a centrally symmetric body")

    unit_dev = float(np.abs(np.linalg.norm(contacts.points, axis=1) - 1.0).max(initial=0.0))
    boundary_dev, on_boundary = _boundary_report(C, contacts.points, tol)
    res = decomposition_residuals(contacts)
    n_min_ok, n_max_ok, span_ok = check_bounds(contacts)

    checks = {
        "unit_norm": _check(unit_dev, tol),
        "boundary": {**_check(boundary_dev, tol), "ok": on_boundary},
        "weights_positive": _flag(float(contacts.weights.min()) > 0.0),
        "identity_sum": _check(res["identity"], tol),
        "n_min": _flag(n_min_ok),
        "n_max": _flag(n_max_ok),
        "span": _flag(span_ok),
    }
    residuals = {
        "unit_norm": unit_dev,
        "boundary": boundary_dev,
        "identity": res["identity"],
        "trace_gap": res["trace_gap"],
    }
    return _finish(
        cert, checks, residuals, certifies_maximality=True,
        message="valid: the unit ball is the unique maximum-volume ellipsoid of this body",
    )


def check_theorem2(C, cert, tol=1e-6):
    """Verify a free-center decomposition certificate.

    Same as the symmetric check minus central symmetry, plus the center
    condition |sum_k lambda_k u_k| <= tol and bounds d+1 <= n <= d(d+3)/2.
    """
    if cert.theorem != 2:
        raise ValueError("not a theorem-2 certificate")
    contacts = cert.contacts
    if contacts.weights is None:
        raise ValueError("certificate has no weights")
    if C.dim != contacts.dim:
        raise DimensionMismatchError("body and contacts disagree on dimension")
    _require_ball_inscribed(C, tol)

    unit_dev = float(np.abs(np.linalg.norm(contacts.points, axis=1) - 1.0).max(initial=0.0))
    boundary_dev, on_boundary = _boundary_report(C, contacts.points, tol)
    res = decomposition_residuals(contacts)
    n_min_ok, n_max_ok, span_ok = check_bounds(contacts)

    checks = {
        "unit_norm": _check(unit_dev, tol),
        "boundary": {**_check(boundary_dev, tol), "ok": on_boundary},
        "weights_positive": _flag(float(contacts.weights.min()) > 0.0),
        "identity_sum": _check(res["identity"], tol),
        "center_sum": _check(res["center"], tol),
        "n_min": _flag(n_min_ok),
        "n_max": _flag(n_max_ok),
        "span": _flag(span_ok),
    }
    residuals = {
        "unit_norm": unit_dev,
        "boundary": boundary_dev,
        "identity": res["identity"],
        "center": res["center"],
        "trace_gap": res["trace_gap"],
    }
    return _finish(
        cert, checks, residuals, certifies_maximality=True,
        message="valid: the unit ball is the unique maximum-volume ellipsoid of this body",
    )


def _in_hull_residual(B, x):
    # Convex-combination feasibility by nonnegative least squares on the
    # homogenized vertex system.
    A = np.vstack([B.vertices.T, np.ones((1, B.n_vertices))])
    b = np.concatenate([x, [1.0]])
    _, rnorm = nnls(A, b)
    return rnorm


def _in_cone_residual(C, u, v, tol):
    q = classify(C, u, tol)
    if q.classification != "boundary" or not q.active_facets:
        return float(np.linalg.norm(v))
    N = C.normals[list(q.active_facets)]
    _, rnorm = nnls(N.T, v)
    return rnorm


def check_theorem3(C, B, cert, tol=1e-6):
    """Verify an affine-image contact-pair certificate.

    B must already be the optimally-positioned inner body (the image under
    the reported map) and contained in C.  Checks: u_k in B (hull
    membership), u_k on the boundary of C, v_k in the normal cone of C at
    u_k, positive weights, weighted sum of u_k v_k^T equal to the identity,
    center condition on the v_k, and bounds d+1 <= n <= d(d+1).

    The verdict never certifies maximality: these are necessary conditions
    only.
    """
    if cert.theorem != 3:
        raise ValueError("not a theorem-3 certificate")
    contacts = cert.contacts
    if contacts.weights is None:
        raise ValueError("certificate has no weights")
    if C.dim != contacts.dim or B.dim != C.dim:
        raise DimensionMismatchError("body and contacts disagree on dimension")
    scale = max(1.0, float(np.abs(C.offsets).max()))
    worst = float((B.vertices @ C.normals.T - C.offsets).max())
    if worst > tol * scale:
        raise ContainmentError(f"inner body leaves the container by {worst:.3e}")

    hull_dev = max(
        (_in_hull_residual(B, u) for u in contacts.points), default=0.0
    )
    boundary_dev, on_boundary = _boundary_report(C, contacts.points, tol)
    cone_dev = max(
        (
            _in_cone_residual(C, u, v, tol)
            for u, v in zip(contacts.points, contacts.normals)
        ),
        default=0.0,
    )
    res = decomposition_residuals(contacts)
    n_min_ok, n_max_ok, span_ok = check_bounds(contacts)

    checks = {
        "points_in_inner_body": _check(hull_dev, tol),
        "boundary": {**_check(boundary_dev, tol), "ok": on_boundary},
        "normals_in_cone": _check(cone_dev, CONE_FEAS_TOL),
        "weights_positive": _flag(float(contacts.weights.min()) > 0.0),
        "identity_sum": _check(res["identity"], tol),
        "center_sum": _check(res["center"], tol),
        "n_min": _flag(n_min_ok),
        "n_max": _flag(n_max_ok),
        "span": _flag(span_ok),
    }
    residuals = {
        "hull": float(hull_dev),
        "boundary": boundary_dev,
        "cone": float(cone_dev),
        "identity": res["identity"],
        "center": res["center"],
        "trace_pairing_gap": res["trace_gap"],
    }
    return _finish(
        cert, checks, residuals, certifies_maximality=False,
        message="valid as a necessary-condition check only; does not certify maximality",
    )


def containment_ratio(C, tol=1e-6, seed=0, n_random=8, max_facet_starts=8):
    """Smallest rho with C contained in rho times the unit ball.

    Requires C in John position (unit ball inscribed).  The maximum of |x|
    over C is found by support maximization over a direction net (the
    coordinate directions, a sample of facet normals, and seeded random
    directions), each refined by re-aiming at the current maximizer; every
    LP lands on a vertex, so this is exact for the standard bodies and a
    tight lower bound in general.  For centrally symmetric bodies the net
    is halved modulo sign, and vertices already visited are not re-refined.
    """
    _require_ball_inscribed(C, tol)
    d = C.dim
    rng = np.random.default_rng(seed)
    symmetric = is_centrally_symmetric(C)
    if symmetric:
        dirs = [np.eye(d)[i] for i in range(d)]
        candidates = C.normals[C.normals @ rng.standard_normal(d) >= 0]
    else:
        dirs = [np.eye(d)[i] * s for i in range(d) for s in (1.0, -1.0)]
        candidates = C.normals
    if candidates.shape[0] <= max_facet_starts:
        dirs.extend(candidates)
    else:
        picks = rng.choice(candidates.shape[0], size=max_facet_starts, replace=False)
        dirs.extend(candidates[picks])
    extra = rng.standard_normal((n_random, d))
    dirs.extend(extra / np.linalg.norm(extra, axis=1)[:, None])

    best = 0.0
    seen = set()
    for w in dirs:
        w = np.asarray(w, dtype=float)
        for _ in range(4):
            x = extreme_point(C, w)
            r = float(np.linalg.norm(x))
            best = max(best, r)
            key = tuple(np.round(x / max(r, 1e-300), 9))
            if key in seen:
                break
            seen.add(key)
            if r <= 1e-12:
                break
            w = x / r
    return best


def certificate_to_obj(cert):
    contacts = []
    weights = cert.contacts.weights
    for k in range(cert.contacts.n):
        entry = {"u": list(map(float, cert.contacts.points[k]))}
        if cert.contacts.normals is not None:
            entry["v"] = list(map(float, cert.contacts.normals[k]))
        if weights is not None:
            entry["lambda"] = float(weights[k])
        contacts.append(entry)
    obj = {
        "theorem": cert.theorem,
        "contacts": contacts,
        "residuals": cert.residuals,
        "verdict": cert.verdict,
    }
    if cert.ellipsoid is not None:
        obj["ellipsoid"] = ellipsoid_to_obj(cert.ellipsoid)
    if cert.affine_map is not None:
        obj["map"] = map_to_obj(cert.affine_map)
    if cert.body_ref is not None:
        obj["body_ref"] = cert.body_ref
    return obj


def certificate_from_obj(obj):
    if not isinstance(obj, dict):
        raise SchemaError("certificate document must be an object")
    try:
        theorem = int(obj["theorem"])
        raw_contacts = obj["contacts"]
    except (KeyError, TypeError, ValueError):
        raise SchemaError("certificate needs 'theorem' and 'contacts'") from None
    if theorem not in (1, 2, 3):
        raise SchemaError("theorem must be 1, 2, or 3")
    kind = _KIND_FOR_THEOREM[theorem]
    try:
        points = np.array([c["u"] for c in raw_contacts], dtype=float)
        weights = (
            np.array([c["lambda"] for c in raw_contacts], dtype=float)
            if raw_contacts and "lambda" in raw_contacts[0]
            else None
        )
        normals = (
            np.array([c["v"] for c in raw_contacts], dtype=float)
            if theorem == 3
            else None
        )
    except (KeyError, TypeError, ValueError):
        raise SchemaError("each contact needs 'u' (and 'v' for theorem 3)") from None
    if points.ndim != 2:
        raise SchemaError("contacts must share a dimension")
    try:
        contacts = ContactSet(
            dim=points.shape[1], kind=kind, points=points,
            normals=normals, weights=weights,
        )
    except (ValueError, DimensionMismatchError) as exc:
        raise SchemaError(f"bad contacts: {exc}") from None
    ellipsoid = ellipsoid_from_obj(obj["ellipsoid"]) if "ellipsoid" in obj else None
    affine_map = map_from_obj(obj["map"]) if "map" in obj else None
    return Certificate(
        theorem=theorem,
        contacts=contacts,
        ellipsoid=ellipsoid,
        affine_map=affine_map,
        residuals=dict(obj.get("residuals", {})),
        verdict=dict(obj.get("verdict", {})),
        body_ref=obj.get("body_ref"),
    )
