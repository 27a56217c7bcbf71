"""johnbox: maximum-volume inscribed ellipsoids of polytopes with
verifiable contact-point decomposition certificates.

The hot per-facet kernels run through a compiled extension when available
and a pure-numpy fallback otherwise; see ``johnbox._kernels``.
"""

from ._kernels import active_backend, available_backends
from .affine import AffineMap, contact_pairs, max_affine_image
from .body import (
    BoundaryQuery,
    HPolytope,
    LoadReport,
    VPolytope,
    body_from_obj,
    body_to_obj,
    classify,
    from_halfspaces,
    is_centrally_symmetric,
    make_standard,
    normal_cone_generators,
    support,
)
from .certify import (
    Certificate,
    certificate_from_obj,
    certificate_to_obj,
    check_theorem1,
    check_theorem2,
    check_theorem3,
    containment_ratio,
)
from .decomposition import (
    BoundsCheck,
    ContactSet,
    DecompositionResult,
    caratheodory_reduce,
    check_bounds,
    john_weights,
    nnls,
    reduce_contacts,
)
from .errors import JohnboxError
from .lift import (
    LiftedPoint,
    frob,
    lift_affine,
    lift_general,
    outer,
    polar_decompose,
    smat,
    split_affine,
    split_general,
    svec,
)
from .solver import (
    EllipsoidParam,
    SolveReport,
    SolverConfig,
    constraint_slacks,
    contact_points,
    john_position,
    mvie,
)

__version__ = "0.1.0"

__all__ = [
    "AffineMap",
    "BoundaryQuery",
    "BoundsCheck",
    "Certificate",
    "ContactSet",
    "DecompositionResult",
    "EllipsoidParam",
    "HPolytope",
    "JohnboxError",
    "LiftedPoint",
    "LoadReport",
    "SolveReport",
    "SolverConfig",
    "VPolytope",
    "active_backend",
    "available_backends",
    "body_from_obj",
    "body_to_obj",
    "caratheodory_reduce",
    "certificate_from_obj",
    "certificate_to_obj",
    "check_bounds",
    "check_theorem1",
    "check_theorem2",
    "check_theorem3",
    "classify",
    "constraint_slacks",
    "contact_pairs",
    "contact_points",
    "containment_ratio",
    "frob",
    "from_halfspaces",
    "is_centrally_symmetric",
    "john_position",
    "john_weights",
    "lift_affine",
    "lift_general",
    "make_standard",
    "max_affine_image",
    "mvie",
    "nnls",
    "normal_cone_generators",
    "outer",
    "polar_decompose",
    "reduce_contacts",
    "smat",
    "split_affine",
    "split_general",
    "support",
    "svec",
]
