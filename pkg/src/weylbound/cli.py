"""Command line interface.

Output is JSON on stdout (or --out FILE, written atomically) with sorted keys
and no timestamps, so identical inputs and seeds give byte-identical output.

Exit codes: 0 for success, including "inconclusive" or negative findings;
2 for unreadable input or bad usage; 3 when a domain invariant fails or a
verification suite reports a violated property.
"""

from __future__ import annotations

import argparse
import sys

from . import jsonio
from .busemann import (
    KernelSpec,
    busemann_value,
    check_condition1,
    check_condition3,
    check_lipschitz,
    kernel_eval,
)
from .chamber import classify, maxface
from .config import KERNEL_FAMILIES, MODELS, Config
from .errors import InputFormatError, InvariantViolation
from .fundseq import is_fundamental, limit_in_quotient, polar_sequence
from .liecore import (
    ChamberVector,
    cartan_decompose,
    distance,
    face_of,
    generalized_radius,
    minimal_face,
)
from .quotient import equivalent, k_act, spd_act
from .verify import (
    SUITES,
    intersection_check,
    refinement_pair_pool,
    refinement_report,
    run_suite,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INVARIANT = 3


def _named_spec(cfg: Config, n: int) -> KernelSpec:
    if cfg.kernel not in KERNEL_FAMILIES:
        raise InputFormatError(
            f"the CLI supports the named kernel families {KERNEL_FAMILIES}")
    return KernelSpec(n, cfg.kernel)


def cmd_decompose(args, cfg: Config):
    P = jsonio.parse_spd(jsonio.load_json(args.file), args.file)
    k, h = cartan_decompose(P)
    payload = {"k": jsonio.encode_matrix(k.mat), "h": jsonio.to_plain(h.h),
               "face": jsonio.to_plain(face_of(h, cfg.tol))}
    return payload, EXIT_OK


def cmd_radius(args, cfg: Config):
    x = jsonio.parse_spd(jsonio.load_json(args.x), args.x)
    y = jsonio.parse_spd(jsonio.load_json(args.y), args.y)
    r = generalized_radius(x, y)
    return {"radius": jsonio.to_plain(r.h), "distance": distance(x, y)}, EXIT_OK


def cmd_face(args, cfg: Config):
    payload = jsonio.load_json(args.file)
    if "vector" in payload:
        try:
            h = ChamberVector(jsonio.parse_vector(payload, args.file), tol=1e-6)
        except InvariantViolation as exc:
            raise InputFormatError(f"{args.file}[vector]: {exc}") from exc
        return {"kind": "chamber", "face": jsonio.to_plain(face_of(h, cfg.tol))}, EXIT_OK
    if "matrix" in payload:
        q = jsonio.parse_rotation(payload, args.file)
        return {"kind": "stabilizer",
                "face": jsonio.to_plain(minimal_face(q, cfg.tol))}, EXIT_OK
    raise InputFormatError(f"{args.file}: expected a 'vector' or 'matrix' key")


def cmd_classify(args, cfg: Config):
    seq = jsonio.parse_chamber_sequence(jsonio.load_json(args.file), args.file)
    verdict = classify(seq, cfg.model, cfg)
    return jsonio.encode_verdict(verdict), EXIT_OK


def cmd_equiv(args, cfg: Config):
    p = jsonio.parse_quotient_point(jsonio.load_json(args.a), args.a)
    q = jsonio.parse_quotient_point(jsonio.load_json(args.b), args.b)
    same = equivalent(p, q, tol=cfg.tol, literal=cfg.literal_maxface)
    payload = {
        "equivalent": same,
        "maxface_a": jsonio.to_plain(maxface(p.x, cfg.tol, cfg.literal_maxface)),
        "maxface_b": jsonio.to_plain(maxface(q.x, cfg.tol, cfg.literal_maxface)),
    }
    return payload, EXIT_OK


def cmd_act(args, cfg: Config):
    g_payload = jsonio.load_json(args.g)
    target = jsonio.load_json(args.point)
    if "k" in target and "x" in target:
        g = jsonio.parse_rotation(g_payload, args.g)
        p = jsonio.parse_quotient_point(target, args.point)
        return jsonio.encode_quotient_point(k_act(g, p)), EXIT_OK
    if "matrix" in target:
        g = jsonio.parse_matrix(g_payload, args.g)
        x = jsonio.parse_spd(target, args.point)
        return {"matrix": jsonio.encode_matrix(spd_act(g, x, cfg.tol).mat)}, EXIT_OK
    raise InputFormatError(
        f"{args.point}: expected a quotient point ('k' and 'x') or a 'matrix'")


def cmd_intersections(args, cfg: Config):
    k = jsonio.parse_rotation(jsonio.load_json(args.k), args.k)
    r = jsonio.parse_rotation(jsonio.load_json(args.r), args.r)
    rep = intersection_check(k, r, cfg)
    payload = {
        "i_min": jsonio.to_plain(rep.i_min),
        "holds": rep.holds,
        "shared_checked": rep.shared_checked,
        "disjoint_checked": rep.disjoint_checked,
        "witness_checked": rep.witness_checked,
        "failures": list(rep.failures),
    }
    return payload, EXIT_OK if rep.holds else EXIT_INVARIANT


def cmd_fundamental(args, cfg: Config):
    pts = jsonio.parse_spd_sequence(jsonio.load_json(args.file), args.file)
    rep = is_fundamental(polar_sequence(pts), cfg.model, cfg)
    return jsonio.encode_fundamental_report(rep), EXIT_OK


def cmd_limit(args, cfg: Config):
    pts = jsonio.parse_spd_sequence(jsonio.load_json(args.file), args.file)
    res = limit_in_quotient(pts, cfg.model, cfg)
    return jsonio.encode_limit_result(res), EXIT_OK


def cmd_refine(args, cfg: Config):
    rep = refinement_report(refinement_pair_pool(cfg, args.n), cfg)
    payload = {
        "pairs": rep.pairs,
        "implications": {k: list(v) for k, v in rep.implications.items()},
        "counterexamples": dict(rep.counterexamples),
        "holds": rep.holds,
    }
    return payload, EXIT_OK if rep.holds else EXIT_INVARIANT


def cmd_kernel(args, cfg: Config):
    spec = _named_spec(cfg, args.n)
    lip = check_lipschitz(spec, cfg)
    c1 = check_condition1(spec, cfg)
    c3 = check_condition3(spec, cfg)
    payload = {
        "family": cfg.kernel,
        "n": args.n,
        "components": [jsonio.to_plain(I) for I in spec.components],
        "lipschitz": {"estimate": lip.estimate, "upper_bound": lip.upper_bound,
                      "budget": lip.budget, "best_kind": lip.best_kind,
                      "note": lip.note},
        "condition3": {"estimate": c3.estimate, "upper_bound": c3.upper_bound,
                       "budget": c3.budget, "best_kind": c3.best_kind,
                       "note": c3.note},
        "condition1": {
            "holds": c1.holds,
            "checked": c1.checked,
            "rate_spread": list(c1.rate_spread),
            "violations": [{"kind": v.kind, "d_near": v.d_near,
                            "norm_near": v.norm_near, "d_far": v.d_far,
                            "norm_far": v.norm_far} for v in c1.violations],
            "note": c1.note,
        },
    }
    return payload, EXIT_OK


def cmd_busemann(args, cfg: Config):
    payload = jsonio.load_json(args.file)
    x = jsonio.parse_spd(payload, args.file, key="x")
    y = jsonio.parse_spd(payload, args.file, key="y")
    o = jsonio.parse_spd(payload, args.file, key="o") if "o" in payload else None
    n = x.n
    spec = _named_spec(cfg, n)
    value = busemann_value(spec, x, y, o)
    out = {
        "family": cfg.kernel,
        "components": [jsonio.to_plain(I) for I in spec.components],
        "value": jsonio.to_plain(value),
        "delta": jsonio.to_plain(kernel_eval(spec, x, y)),
    }
    return out, EXIT_OK


def cmd_verify(args, cfg: Config):
    rep = run_suite(args.property, cfg, n=args.n)
    payload = {
        "name": rep.name,
        "holds": rep.holds,
        "checked": rep.checked,
        "failures": list(rep.failures),
        "details": jsonio.to_plain(rep.details),
    }
    return payload, EXIT_OK if rep.holds else EXIT_INVARIANT


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with configuration fields")
    common.add_argument("--tol", type=float, help="override the validation tolerance")
    common.add_argument("--seed", type=int, help="override the sampling seed")
    common.add_argument("--model", choices=MODELS, help="boundary model")
    common.add_argument("--kernel", choices=KERNEL_FAMILIES,
                        help="kernel component family")
    common.add_argument("--out", help="write output JSON to this file atomically")

    parser = argparse.ArgumentParser(
        prog="weylbound",
        description="Chamber boundary models, glued quotients and kernel checks "
                    "for positive-definite unimodular matrices.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(handler=handler)
        return p

    p = add("decompose", cmd_decompose,
            "factor an SPD matrix as k exp(2H) k^T")
    p.add_argument("file", help="JSON file with a 'matrix' key")

    p = add("radius", cmd_radius,
            "generalized radius vector and distance between two points")
    p.add_argument("x", help="JSON file with a 'matrix' key")
    p.add_argument("y", help="JSON file with a 'matrix' key")

    p = add("face", cmd_face,
            "face of a chamber vector, or minimal stabilized face of a rotation")
    p.add_argument("file", help="JSON file with a 'vector' or 'matrix' key")

    p = add("classify", cmd_classify,
            "boundary verdict of a chamber-vector sequence under --model")
    p.add_argument("file", help="JSON file with a 'vectors' key")

    p = add("equiv", cmd_equiv,
            "whether two quotient points name the same class")
    p.add_argument("a", help="JSON file with 'k' and 'x' keys")
    p.add_argument("b", help="JSON file with 'k' and 'x' keys")

    p = add("act", cmd_act,
            "apply a group element to a matrix or a quotient point")
    p.add_argument("g", help="JSON file with a 'matrix' key")
    p.add_argument("point", help="JSON file with a 'matrix' or 'k'/'x' keys")

    p = add("intersections", cmd_intersections,
            "which boundary classes two chamber frames share")
    p.add_argument("k", help="JSON file with a rotation under 'matrix'")
    p.add_argument("r", help="JSON file with a rotation under 'matrix'")

    p = add("fundamental", cmd_fundamental,
            "polar-decompose a matrix sequence and test fundamentality")
    p.add_argument("file", help="JSON file with a 'matrices' key")

    p = add("limit", cmd_limit,
            "limit class of a matrix sequence in the glued quotient")
    p.add_argument("file", help="JSON file with a 'matrices' key")

    p = add("refine", cmd_refine,
            "refinement relations between the boundary models on a pair corpus")
    p.add_argument("-n", type=int, default=3, help="matrix size (default 3)")

    p = add("kernel", cmd_kernel,
            "Lipschitz, distance-splitting and ray-constant checks for a family")
    p.add_argument("-n", type=int, default=3, help="matrix size (default 3)")

    p = add("busemann", cmd_busemann,
            "kernel difference b_x(y) relative to a base point")
    p.add_argument("file", help="JSON file with 'x', 'y' and optional 'o' keys")

    p = add("verify", cmd_verify, "run one verification suite")
    p.add_argument("property", choices=sorted(SUITES))
    p.add_argument("-n", type=int, default=3, help="matrix size (default 3)")

    return parser


def _build_config(args) -> Config:
    cfg = Config.load(args.config) if args.config else Config()
    overrides = {}
    if args.tol is not None:
        overrides["tol"] = args.tol
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.model is not None:
        overrides["model"] = args.model
    if args.kernel is not None:
        overrides["kernel"] = args.kernel
    return cfg.replace(**overrides) if overrides else cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _build_config(args)
        payload, code = args.handler(args, cfg)
    except InputFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    if args.out:
        jsonio.write_json(args.out, payload)
    else:
        sys.stdout.write(jsonio.dumps(payload))
    return code


if __name__ == "__main__":
    sys.exit(main())
