"""Command-line interface.

Machine-readable JSON goes to stdout; human-readable logging goes to stderr
(verbosity via the JOHNBOX_LOG environment variable: debug, info, warning,
error).  Exit codes: 0 success, 2 solver non-convergence, 3 verification
failure, 64 malformed input document or usage error, 65 infeasible or
inconsistent body data.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys

import numpy as np

from . import affine as affine_mod
from . import certify as certify_mod
from .body import VPolytope, body_from_obj, body_to_obj, is_centrally_symmetric, make_standard
from .decomposition import (
    KIND_T1,
    KIND_T2,
    ContactSet,
    contacts_with_result,
    john_weights,
    reduce_contacts,
)
from .errors import (
    AsymmetricBodyError,
    BallNotInscribedError,
    ContainmentError,
    ConvergenceError,
    DegenerateBodyError,
    DimensionMismatchError,
    InfeasibleBodyError,
    ReductionPreconditionError,
    SchemaError,
    UnboundedBodyError,
)
from .solver import (
    SolverConfig,
    contact_points,
    ellipsoid_to_obj,
    john_position,
    mvie,
    report_to_obj,
)

EXIT_OK = 0
EXIT_NO_CONVERGENCE = 2
EXIT_INVALID = 3
EXIT_USAGE = 64
EXIT_DATA = 65

_DATA_ERRORS = (
    InfeasibleBodyError,
    UnboundedBodyError,
    AsymmetricBodyError,
    ContainmentError,
    BallNotInscribedError,
    DegenerateBodyError,
    ReductionPreconditionError,
    DimensionMismatchError,
)

log = logging.getLogger("johnbox")


def _setup_logging():
    level = os.environ.get("JOHNBOX_LOG", "info").upper()
    logging.basicConfig(
        stream=sys.stderr,
        level=getattr(logging, level, logging.INFO),
        format="%(levelname)s %(message)s",
    )


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise SchemaError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"malformed JSON in {path}: {exc}") from None


def _load_body(path):
    body, report = body_from_obj(_load_json(path))
    if report.n_rescaled:
        log.info(
            "%s: normalized %d facet normals (max log-rescale %.2e)",
            path, report.n_rescaled, report.max_rescale,
        )
    if report.n_deduplicated:
        log.info("%s: dropped %d duplicate vertices", path, report.n_deduplicated)
    return body


def _emit(obj, out_path):
    text = json.dumps(obj, indent=2, sort_keys=True)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    print(text)


def _solver_config(args):
    kwargs = {}
    if getattr(args, "max_iter", None):
        kwargs["max_newton_iters"] = args.max_iter
    return SolverConfig(**kwargs)


def _solve_pipeline(C, mode, cfg, cert_tol, body_ref=None):
    """mvie -> position -> contacts -> weights -> reduction -> check."""
    E, report = mvie(C, mode=mode, cfg=cfg)
    positioned = john_position(C, E)
    pairs = contact_points(C, E)
    kind = KIND_T1 if mode == "symmetric" else KIND_T2
    contacts = ContactSet(
        dim=C.dim, kind=kind, points=np.array([u for u, _ in pairs]).reshape(-1, C.dim)
    )
    dec = john_weights(contacts)
    reduced = reduce_contacts(contacts_with_result(contacts, dec))
    cert = certify_mod.Certificate(
        theorem=1 if mode == "symmetric" else 2,
        contacts=reduced,
        ellipsoid=E,
        body_ref=body_ref,
    )
    if mode == "symmetric":
        cert = certify_mod.check_theorem1(positioned, cert, tol=cert_tol)
    else:
        cert = certify_mod.check_theorem2(positioned, cert, tol=cert_tol)
    return E, report, positioned, cert


def cmd_solve(args):
    C = _load_body(args.body)
    cfg = _solver_config(args)
    E, report, _, cert = _solve_pipeline(
        C, args.mode, cfg, args.tol, body_ref=args.body
    )
    log.info(
        "solved in %d Newton steps, log det A = %.9g, verdict %s",
        report.iterations, report.objective,
        "valid" if cert.valid else "INVALID",
    )
    _emit(
        {
            "ellipsoid": ellipsoid_to_obj(E),
            "report": report_to_obj(report),
            "certificate": certify_mod.certificate_to_obj(cert),
        },
        args.out,
    )
    return EXIT_OK if cert.valid else EXIT_INVALID


def cmd_certify(args):
    C = _load_body(args.body)
    cert = certify_mod.certificate_from_obj(_load_json(args.certificate))
    theorem = args.theorem or cert.theorem
    if theorem != cert.theorem:
        log.error("certificate is for theorem %d, not %d", cert.theorem, theorem)
        return EXIT_USAGE
    if theorem == 3:
        if not args.inner:
            log.error("theorem-3 certification needs --inner B.json")
            return EXIT_USAGE
        B = _load_body(args.inner)
        if not isinstance(B, VPolytope):
            log.error("--inner must be a vpolytope document")
            return EXIT_USAGE
        if cert.affine_map is not None:
            B = VPolytope(B.dim, cert.affine_map.apply(B.vertices))
        checked = certify_mod.check_theorem3(C, B, cert, tol=args.tol)
    else:
        positioned = john_position(C, cert.ellipsoid) if cert.ellipsoid else C
        if theorem == 1:
            checked = certify_mod.check_theorem1(positioned, cert, tol=args.tol)
        else:
            checked = certify_mod.check_theorem2(positioned, cert, tol=args.tol)
    for name, entry in checked.verdict["checks"].items():
        detail = ""
        if "value" in entry:
            detail = f" ({entry['value']:.3e} vs tol {entry['tol']:.1e})"
        log.info("check %-22s %s%s", name, "ok" if entry["ok"] else "FAIL", detail)
    _emit(certify_mod.certificate_to_obj(checked), args.out)
    return EXIT_OK if checked.valid else EXIT_INVALID


def cmd_reduce(args):
    cert = certify_mod.certificate_from_obj(_load_json(args.certificate))
    if cert.contacts.weights is None:
        log.error("certificate has no weights to reduce")
        return EXIT_DATA
    reduced = reduce_contacts(cert.contacts)
    dec = john_weights(reduced)
    residuals = dict(cert.residuals)
    residuals["identity"] = dec.residual
    verdict = dict(cert.verdict)
    verdict["reduced"] = True
    verdict["n_contacts"] = reduced.n
    verdict["n_max"] = dec.bounds.n_max
    verdict["n_max_ok"] = dec.bounds.n_max_ok
    out = certify_mod.Certificate(
        theorem=cert.theorem,
        contacts=reduced,
        ellipsoid=cert.ellipsoid,
        affine_map=cert.affine_map,
        residuals=residuals,
        verdict=verdict,
        body_ref=cert.body_ref,
    )
    log.info("reduced support %d -> %d (bound %d)", cert.contacts.n, reduced.n, dec.bounds.n_max)
    _emit(certify_mod.certificate_to_obj(out), args.out)
    return EXIT_OK


def cmd_position(args):
    C = _load_body(args.body)
    cfg = _solver_config(args)
    E, report = mvie(C, mode=args.mode, cfg=cfg)
    positioned = john_position(C, E)
    rho = certify_mod.containment_ratio(positioned, tol=args.tol, seed=args.seed)
    symmetric = is_centrally_symmetric(C)
    ratio_ok = rho <= math.sqrt(C.dim) + 1e-6 if symmetric else None
    log.info(
        "containment ratio rho = %.9g, sqrt(d) = %.9g%s",
        rho, math.sqrt(C.dim),
        "" if ratio_ok is None else (" (rho <= sqrt(d): %s)" % ("yes" if ratio_ok else "NO")),
    )
    _emit(
        {
            "body": body_to_obj(positioned),
            "ellipsoid": ellipsoid_to_obj(E),
            "report": report_to_obj(report),
            "ratio": rho,
            "sqrt_dim": math.sqrt(C.dim),
            "symmetric": symmetric,
            "ratio_within_sqrt_dim": ratio_ok,
        },
        args.out,
    )
    return EXIT_OK


def cmd_affine(args):
    B = _load_body(args.inner)
    C = _load_body(args.container)
    if not isinstance(B, VPolytope):
        log.error("inner body must be a vpolytope document")
        return EXIT_USAGE
    cfg = _solver_config(args)
    amap, report = affine_mod.max_affine_image(
        B, C, cfg=cfg, n_starts=args.starts, seed=args.seed
    )
    pairs = affine_mod.contact_pairs(B, C, amap)
    image = VPolytope(B.dim, amap.apply(B.vertices))
    if pairs.n:
        dec = john_weights(pairs)
        reduced = reduce_contacts(contacts_with_result(pairs, dec))
        cert = certify_mod.Certificate(theorem=3, contacts=reduced, affine_map=amap)
        cert = certify_mod.check_theorem3(C, image, cert, tol=args.tol)
    else:
        cert = certify_mod.Certificate(theorem=3, contacts=pairs, affine_map=amap)
        cert.verdict = {
            "valid": False,
            "theorem": 3,
            "certifies_maximality": False,
            "message": "image is interior: no contacts, no stationarity evidence",
            "checks": {},
        }
    log.info(
        "log|det M| = %.9g over %d starts, %d contact pairs, verdict %s",
        report.objective, len(report.start_objectives or []), pairs.n,
        "valid" if cert.valid else "INVALID",
    )
    _emit(
        {
            "map": affine_mod.map_to_obj(amap),
            "canonical_factor": [list(map(float, row)) for row in amap.canonical_factor()],
            "report": report_to_obj(report),
            "certificate": certify_mod.certificate_to_obj(cert),
        },
        args.out,
    )
    return EXIT_OK if cert.valid else EXIT_INVALID


def cmd_gen(args):
    body = make_standard(args.name, args.dim, seed=args.seed)
    _emit(body_to_obj(body), args.out)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="johnbox",
        description="Maximum-volume inscribed ellipsoids and decomposition certificates",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, tol_default=1e-6):
        p.add_argument("--tol", type=float, default=tol_default,
                       help="verification tolerance (default %(default)g)")
        p.add_argument("--max-iter", type=int, default=None,
                       help="Newton step budget for the solver")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None, help="also write the JSON result here")

    p = sub.add_parser("solve", help="inscribe the maximum-volume ellipsoid and certify it")
    p.add_argument("body", help="H-form body JSON")
    p.add_argument("--mode", choices=("symmetric", "general"), default="general")
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("certify", help="verify a certificate against a body")
    p.add_argument("body", help="container body JSON")
    p.add_argument("certificate", help="certificate JSON")
    p.add_argument("--theorem", type=int, choices=(1, 2, 3), default=None)
    p.add_argument("--inner", default=None, help="inner V-form body (theorem 3)")
    common(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("reduce", help="conic Caratheodory reduction of a certificate")
    p.add_argument("certificate", help="certificate JSON")
    common(p)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("position", help="map a body to John position and report its ratio")
    p.add_argument("body", help="H-form body JSON")
    p.add_argument("--mode", choices=("symmetric", "general"), default="general")
    common(p)
    p.set_defaults(func=cmd_position)

    p = sub.add_parser("affine", help="largest affine image of an inner body in a container")
    p.add_argument("inner", help="V-form inner body JSON")
    p.add_argument("container", help="H-form container JSON")
    p.add_argument("--starts", type=int, default=8, help="number of seeded starts")
    common(p)
    p.set_defaults(func=cmd_affine)

    p = sub.add_parser("gen", help="generate a standard body")
    p.add_argument("name", choices=("cube", "cross_polytope", "simplex", "random_symmetric"))
    p.add_argument("dim", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gen)

    return parser


def main(argv=None):
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; remap to the documented code.
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except SchemaError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except ConvergenceError as exc:
        log.error("solver did not converge: %s", exc)
        return EXIT_NO_CONVERGENCE
    except _DATA_ERRORS as exc:
        log.error("%s", exc)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
