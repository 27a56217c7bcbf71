"""Polytope bodies: halfspace containers and vertex-hull inner bodies.

Containers are intersections of halfspaces normal.x <= offset with unit
normals ("H-form"); inner bodies are convex hulls of vertex lists ("V-form").
Only H-form bodies can serve as containers for the inscribed-ellipsoid
solver; V-form bodies serve as inner bodies and support-function oracles.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import (
    DimensionMismatchError,
    InfeasibleBodyError,
    NotOnBoundaryError,
    SchemaError,
    UnboundedBodyError,
)

# Default boundary-classification tolerance; scale-relative (multiplied by
# the largest facet offset).
CLASSIFY_TOL = 1e-7


@dataclass(frozen=True)
class HPolytope:
    """Intersection of halfspaces normals[i] . x <= offsets[i].

    Normals must already be unit vectors; build instances through
    :func:`from_halfspaces`, which normalizes raw input and verifies
    boundedness.
    """

    dim: int
    normals: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        normals = np.array(self.normals, dtype=float)
        offsets = np.array(self.offsets, dtype=float)
        if normals.ndim != 2 or normals.shape[1] != self.dim:
            raise DimensionMismatchError(
                f"normals must have shape (n, {self.dim}), got {normals.shape}"
            )
        if offsets.shape != (normals.shape[0],):
            raise DimensionMismatchError("one offset per facet required")
        if normals.shape[0] < self.dim + 1:
            raise UnboundedBodyError(
                f"{normals.shape[0]} facets cannot bound a {self.dim}-dimensional body"
            )
        norms = np.linalg.norm(normals, axis=1)
        if np.abs(norms - 1.0).max(initial=0.0) > 1e-12:
            raise ValueError(
                "facet normals must be unit vectors; use from_halfspaces() "
                "to ingest raw halfspace data"
            )
        normals.setflags(write=False)
        offsets.setflags(write=False)
        object.__setattr__(self, "normals", normals)
        object.__setattr__(self, "offsets", offsets)

    @property
    def n_facets(self):
        return self.normals.shape[0]


@dataclass(frozen=True)
class VPolytope:
    """Convex hull of a vertex list; duplicates are dropped on construction."""

    dim: int
    vertices: np.ndarray

    def __post_init__(self):
        vertices = np.array(self.vertices, dtype=float)
        if vertices.ndim != 2 or vertices.shape[1] != self.dim:
            raise DimensionMismatchError(
                f"vertices must have shape (k, {self.dim}), got {vertices.shape}"
            )
        if vertices.shape[0] < 1:
            raise ValueError("a vertex polytope needs at least one vertex")
        keep = []
        for i in range(vertices.shape[0]):
            if all(
                np.linalg.norm(vertices[i] - vertices[k]) > 1e-10 for k in keep
            ):
                keep.append(i)
        vertices = vertices[keep]
        vertices.setflags(write=False)
        object.__setattr__(self, "vertices", vertices)

    @property
    def n_vertices(self):
        return self.vertices.shape[0]


@dataclass(frozen=True)
class BoundaryQuery:
    point: np.ndarray
    classification: str  # "interior" | "boundary" | "exterior"
    active_facets: tuple
    tol: float


@dataclass(frozen=True)
class LoadReport:
    """Record of what ingestion changed: normal rescaling, vertex dedup."""

    kind: str
    n_rescaled: int = 0
    max_rescale: float = 1.0
    n_deduplicated: int = 0


def _normalize_halfspaces(normals, offsets):
    normals = np.asarray(normals, dtype=float)
    offsets = np.asarray(offsets, dtype=float)
    if normals.ndim != 2:
        raise SchemaError("facet normals must form a 2-d array")
    norms = np.linalg.norm(normals, axis=1)
    if norms.min(initial=np.inf) <= 1e-12:
        raise SchemaError("zero facet normal")
    return normals / norms[:, None], offsets / norms, norms


def _check_bounded(normals, offsets, dim):
    # Bounded iff every coordinate direction has a finite maximum; an
    # unbounded LP in any +-e_i direction rejects the body.
    for i in range(dim):
        for sign in (1.0, -1.0):
            c = np.zeros(dim)
            c[i] = -sign
            res = linprog(c, A_ub=normals, b_ub=offsets, bounds=(None, None), method="highs")
            if res.status == 3:
                raise UnboundedBodyError(
                    f"polytope is unbounded in direction {'+' if sign > 0 else '-'}e_{i}"
                )
            if res.status == 2:
                raise InfeasibleBodyError("halfspace intersection is empty")
            if res.status != 0:
                raise InfeasibleBodyError(f"boundedness check failed: {res.message}")


def from_halfspaces(normals, offsets, check_bounded=True):
    """Ingest raw halfspace data: normalize rows and verify boundedness."""
    unit, scaled, _ = _normalize_halfspaces(normals, offsets)
    dim = unit.shape[1]
    if unit.shape[0] < dim + 1:
        raise UnboundedBodyError(
            f"{unit.shape[0]} facets cannot bound a {dim}-dimensional body"
        )
    if check_bounded:
        _check_bounded(unit, scaled, dim)
    return HPolytope(dim, unit, scaled)


def support(body, v):
    """Support value max{ v . x : x in body }."""
    v = np.asarray(v, dtype=float)
    if v.shape != (body.dim,):
        raise DimensionMismatchError(f"direction has shape {v.shape}, body dim {body.dim}")
    if isinstance(body, VPolytope):
        return float(np.max(body.vertices @ v))
    return float(v @ extreme_point(body, v))


def extreme_point(body, v):
    """A maximizer of v . x over an H-form body, found by linear programming."""
    v = np.asarray(v, dtype=float)
    res = linprog(
        -v, A_ub=body.normals, b_ub=body.offsets, bounds=(None, None), method="highs"
    )
    if res.status == 3:
        raise UnboundedBodyError("support LP is unbounded")
    if res.status != 0:
        raise InfeasibleBodyError(f"support LP failed: {res.message}")
    return np.asarray(res.x, dtype=float)


def classify(body, x, tol=CLASSIFY_TOL):
    """Classify a point as interior/boundary/exterior of an H-form body.

    The tolerance is scale-relative: the effective slab width is
    tol * max_i offsets[i].  A point is on the boundary when it satisfies
    every facet inequality up to +tol and at least one facet is active
    within the slab; active facet indices are reported.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (body.dim,):
        raise DimensionMismatchError(f"point has shape {x.shape}, body dim {body.dim}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    eff = tol * float(np.abs(body.offsets).max())
    vals = body.normals @ x - body.offsets
    worst = float(vals.max())
    if worst > eff:
        cls = "exterior"
        active = ()
    elif worst >= -eff:
        cls = "boundary"
        active = tuple(int(i) for i in np.flatnonzero(vals >= -eff))
    else:
        cls = "interior"
        active = ()
    return BoundaryQuery(point=x, classification=cls, active_facets=active, tol=eff)


def normal_cone_generators(body, u, tol=CLASSIFY_TOL):
    """Unit normals of the facets active at a boundary point u.

    For a polytope these positively span the cone of outward normals of
    supporting hyperplanes at u.
    """
    q = classify(body, u, tol)
    if q.classification != "boundary":
        raise NotOnBoundaryError(
            f"point classified as {q.classification}, expected boundary"
        )
    return np.array(body.normals[list(q.active_facets)])


def is_centrally_symmetric(body, tol=1e-9):
    """True when the facets of an H-form body come in (-normal, offset) pairs."""
    n = body.n_facets
    scale = max(1.0, float(np.abs(body.offsets).max()))
    used = np.zeros(n, dtype=bool)
    for i in range(n):
        if used[i]:
            continue
        diff = np.linalg.norm(body.normals + body.normals[i], axis=1)
        cand = np.flatnonzero(
            (diff <= tol) & ~used & (np.abs(body.offsets - body.offsets[i]) <= tol * scale)
        )
        cand = cand[cand != i]
        if cand.size == 0:
            return False
        used[i] = used[cand[0]] = True
    return True


def _simplex_normals(d):
    # Rows of I - J/(d+1) projected onto the orthogonal complement of the
    # all-ones vector give d+1 unit directions with pairwise dot -1/d.
    P = np.eye(d + 1) - np.full((d + 1, d + 1), 1.0 / (d + 1))
    _, _, vt = np.linalg.svd(P)
    coords = P @ vt[:d].T
    return coords / np.linalg.norm(coords, axis=1)[:, None]


def make_standard(name, d, seed=None):
    """Construct a standard test body.

    cube             [-1, 1]^d, 2d facets.
    cross_polytope   {x : s.x <= 1 for all sign vectors s}, 2^d facets
                     (capped at d <= 16).
    simplex          regular simplex with incenter at the origin and
                     inradius 1.
    random_symmetric seeded facets in +- pairs with offsets in [1, 2].
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    # Every branch below produces normals that positively span E^d (sign
    # pairs of a spanning set, or a regular frame), so boundedness holds by
    # construction and the ingestion LPs are skipped.
    if name == "cube":
        normals = np.vstack([np.eye(d), -np.eye(d)])
        offsets = np.ones(2 * d)
    elif name == "cross_polytope":
        if d > 16:
            raise ValueError("cross_polytope capped at d <= 16 (2^d facets)")
        signs = np.array(list(itertools.product((1.0, -1.0), repeat=d)))
        normals = signs / np.sqrt(d)
        offsets = np.full(signs.shape[0], 1.0 / np.sqrt(d))
    elif name == "simplex":
        normals = _simplex_normals(d)
        offsets = np.ones(d + 1)
    elif name == "random_symmetric":
        rng = np.random.default_rng(seed)
        pairs = 4 * d
        while True:
            dirs = rng.standard_normal((pairs, d))
            norms = np.linalg.norm(dirs, axis=1)
            if norms.min() > 1e-12 and np.linalg.matrix_rank(dirs, tol=1e-9) == d:
                break
        dirs /= norms[:, None]
        offs = 1.0 + rng.uniform(0.0, 1.0, pairs)
        normals = np.vstack([dirs, -dirs])
        offsets = np.concatenate([offs, offs])
    else:
        raise ValueError(f"unknown standard body {name!r}")
    return from_halfspaces(normals, offsets, check_bounded=False)


def body_to_obj(body):
    """JSON-ready dict for an H- or V-form body."""
    if isinstance(body, HPolytope):
        return {
            "type": "hpolytope",
            "dim": body.dim,
            "facets": [
                {"normal": list(map(float, n)), "offset": float(h)}
                for n, h in zip(body.normals, body.offsets)
            ],
        }
    if isinstance(body, VPolytope):
        return {
            "type": "vpolytope",
            "dim": body.dim,
            "vertices": [list(map(float, v)) for v in body.vertices],
        }
    raise TypeError(f"not a body: {type(body).__name__}")


def body_from_obj(obj):
    """Parse a body dict; returns (body, LoadReport).

    Raw (unnormalized) facet normals are accepted; how many were rescaled,
    and by at most how much, is recorded in the report.
    """
    if not isinstance(obj, dict) or "type" not in obj:
        raise SchemaError("body document must be an object with a 'type' key")
    kind = obj["type"]
    try:
        dim = int(obj["dim"])
    except (KeyError, TypeError, ValueError):
        raise SchemaError("body document needs an integer 'dim'") from None
    if kind == "hpolytope":
        try:
            raw_n = np.array([f["normal"] for f in obj["facets"]], dtype=float)
            raw_h = np.array([f["offset"] for f in obj["facets"]], dtype=float)
        except (KeyError, TypeError, ValueError):
            raise SchemaError("each facet needs a 'normal' list and an 'offset'") from None
        if raw_n.ndim != 2 or raw_n.shape[1] != dim:
            raise SchemaError(f"facet normals must have length dim={dim}")
        unit, scaled, norms = _normalize_halfspaces(raw_n, raw_h)
        body = from_halfspaces(unit, scaled, check_bounded=True)
        rescaled = np.abs(norms - 1.0) > 1e-12
        report = LoadReport(
            kind="hpolytope",
            n_rescaled=int(rescaled.sum()),
            max_rescale=float(np.abs(np.log(norms)).max(initial=0.0)),
        )
        return body, report
    if kind == "vpolytope":
        try:
            verts = np.array(obj["vertices"], dtype=float)
        except (KeyError, TypeError, ValueError):
            raise SchemaError("vpolytope needs a 'vertices' array") from None
        if verts.ndim != 2 or verts.shape[1] != dim:
            raise SchemaError(f"vertices must have length dim={dim}")
        body = VPolytope(dim, verts)
        report = LoadReport(
            kind="vpolytope",
            n_deduplicated=int(verts.shape[0] - body.n_vertices),
        )
        return body, report
    raise SchemaError(f"unknown body type {kind!r}")
