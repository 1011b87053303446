"""Command-line front end.

Exit codes: 0 when every requested check passed, 1 when a verification
failed, 2 on bad input or usage.
"""
from __future__ import annotations

import argparse
import secrets
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .coherence import build_K2, haar_k2_estimate, k2_norm_sq
from .designs import BlockFamily, build_S, cohesiveness, is_t_design, to_blocks
from .fileio import (FormatError, basis_set_doc, basis_set_from_doc, certificate_doc,
                     design_doc, design_from_doc, dumps, frame_doc, frame_from_doc,
                     read_json, report_doc, sha256_file, write_json)
from .fusion import FrameError, assemble, cross_gramian, rankin_certify
from .mub import UnsupportedConstruction, construct_mubs, max_mub_count, verify_unbiased
from .numerics import DEFAULT_TOL, ProjectorError
from .oracle import (SearchBudget, direct_design_count, extendability_check,
                     max_cohesive_family, random_frame)

OK, FAILED, USAGE = 0, 1, 2
EXPECTATIONS = ("maximal-orthoplectic", "tight", "2-design")


class UsageError(Exception):
    pass


def _emit(doc: dict, out):
    if out:
        write_json(out, doc)
    else:
        sys.stdout.write(dumps(doc))


def _seed(args) -> int:
    if args.seed is None:
        args.seed = secrets.randbits(64)
        print(f"seed {args.seed}", file=sys.stderr)
    return args.seed


# --------------------------------------------------------------------------
# construction


def cmd_construct_design(args) -> int:
    if args.r < 1:
        raise UsageError("--r must be >= 1")
    S = build_S(args.r)
    F = to_blocks(S)
    lam = is_t_design(F, 2) if F.l >= 2 else is_t_design(F, 1)
    if args.format == "csv":
        Path(args.out).write_text(S.to_csv())
    else:
        write_json(args.out, design_doc(F))
    print(f"m={F.m} l={F.l} n={len(F)} lambda={lam}")
    return OK


def cmd_construct_mubs(args) -> int:
    if args.import_path:
        S = basis_set_from_doc(read_json(args.import_path, "basis-set"))
        rep = verify_unbiased(S, args.tol)
        write_json(args.out, basis_set_doc(S))
        print(f"imported {len(S)} bases, worst deviation {rep.worst}")
        return OK if rep.ok else FAILED
    if args.field is None or args.dim is None:
        raise UsageError("--field and --dim are required unless --import is given")
    try:
        S = construct_mubs(args.field, args.dim)
    except UnsupportedConstruction as exc:
        raise UsageError(f"{exc} (construct-mubs --import FILE)") from exc
    write_json(args.out, basis_set_doc(S))
    print(f"k={max_mub_count(args.field, args.dim)} bases={len(S)}")
    return OK


def cmd_verify_mubs(args) -> int:
    S = basis_set_from_doc(read_json(args.mubs, "basis-set"))
    rep = verify_unbiased(S, args.tol)
    res = {"ok": rep.ok, "count": len(S), "maximal": len(S) == max_mub_count(S.field, S.dim),
           "worst_deviation": rep.worst}
    doc = report_doc("mub-verification", {"mubs": sha256_file(args.mubs),
                                          "tolerance": rep.tol}, res)
    _emit(doc, args.out)
    return OK if rep.ok else FAILED


def cmd_assemble(args) -> int:
    S = basis_set_from_doc(read_json(args.mubs, "basis-set"))
    F = design_from_doc(read_json(args.design, "design"))
    if F.m != S.dim:
        raise UsageError(f"design is on {F.m} points but bases have dimension {S.dim}")
    ff = assemble(S, F, args.tol)
    write_json(args.out, frame_doc(ff))
    print(f"n={ff.n} m={ff.m} l={ff.l} mode={ff.mode}")
    return OK


# --------------------------------------------------------------------------
# certification


def _load_frame(path, tol):
    try:
        return frame_from_doc(read_json(path, "frame"), tol)
    except (ProjectorError, FrameError) as exc:
        raise FormatError(f"{path}: {exc}") from exc


def cmd_certify(args) -> int:
    ff = _load_frame(args.frame, args.tol)
    cert = rankin_certify(ff)
    verdicts = {"maximal-orthoplectic": cert.is_maximal_orthoplectic,
                "tight": cert.is_tight, "2-design": cert.is_2design}
    expect = {e: bool(verdicts[e]) for e in (args.expect or [])}
    doc = certificate_doc(cert, {"frame": sha256_file(args.frame)}, expect)
    _emit(doc, args.out)
    A, B = cert.frame_bounds
    print(f"n={cert.n} A={A} B={B} max_trace={cert.max_cross_trace} "
          f"maximal_orthoplectic={cert.is_maximal_orthoplectic} 2-design={cert.is_2design}",
          file=sys.stderr if not args.out else sys.stdout)
    return OK if all(expect.values()) else FAILED


def cmd_gramian(args) -> int:
    ff = _load_frame(args.frame, args.tol)
    G = cross_gramian(ff)
    if args.format == "csv":
        text = G.to_csv()
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
    else:
        vals = G.numer if G.exact else G.values
        rows = [[Fraction(int(v), G.den) if G.exact else float(v) for v in row] for row in vals]
        _emit(report_doc("gramian", {"frame": sha256_file(args.frame)},
                         {"mode": ff.mode, "traces": rows}), args.out)
    return OK


# --------------------------------------------------------------------------
# oracles


def _budget(args) -> SearchBudget:
    return SearchBudget(args.budget, args.max_seconds)


def cmd_max_cohesive(args) -> int:
    c = Fraction(args.c)
    size, fam, res = max_cohesive_family(args.m, args.l, int(c), _budget(args))
    params = {"m": args.m, "l": args.l, "c": c, "max_nodes": args.budget,
              "max_seconds": args.max_seconds}
    result = {"size": size, "witness": [list(b) for b in fam.blocks], "nodes": res.nodes,
              "complete": res.complete, "seconds": round(res.seconds, 3)}
    _emit(report_doc("search-report", params, result), args.out)
    print(f"size={size} complete={res.complete}", file=sys.stderr)
    if args.expect is None:
        return OK
    return OK if res.complete and size == args.expect else FAILED


def _family_arg(args) -> BlockFamily:
    if args.design:
        return design_from_doc(read_json(args.design, "design"))
    if args.r:
        return to_blocks(build_S(args.r))
    raise UsageError("give --design FILE or --r R")


def cmd_extend(args) -> int:
    F = _family_arg(args)
    c = Fraction(args.c) if args.c is not None else Fraction(F.l * F.l, F.m)
    if len(F) >= 2 and cohesiveness(F) > c:
        raise UsageError(f"family is not {c}-cohesive")
    v = extendability_check(F, c)
    result = {"extendable": v.extendable, "witness": v.witness, "candidates": v.candidates}
    _emit(report_doc("extendability", {"m": F.m, "l": F.l, "n": len(F), "c": c}, result),
          args.out)
    if args.expect is None:
        return OK
    return OK if v.extendable == (args.expect == "extendable") else FAILED


def cmd_design_count(args) -> int:
    F = _family_arg(args)
    if args.t > F.l:
        raise UsageError(f"t={args.t} exceeds block size {F.l}")
    hist = direct_design_count(F, args.t)
    is_design = len(hist) == 1
    result = {"histogram": {str(k): v for k, v in sorted(hist.items())},
              "is_design": is_design, "lambda": next(iter(hist)) if is_design else None}
    _emit(report_doc("design-count", {"m": F.m, "l": F.l, "n": len(F), "t": args.t}, result),
          args.out)
    if args.expect is None:
        return OK
    return OK if is_design == (args.expect == "design") else FAILED


def cmd_haar_k2(args) -> int:
    seed = _seed(args)
    est = haar_k2_estimate(args.l, args.dim, args.field, args.samples, seed).to_float()
    exact = build_K2(args.l, args.dim, args.field).matrix.to_float()
    dev = float(np.max(np.abs(est - exact)))
    tr_est = float(np.real(np.trace(est @ est)))
    tr_exact = float(k2_norm_sq(args.l, args.dim, args.field))
    ok = dev <= args.entry_tol and abs(tr_est - tr_exact) <= args.trace_tol
    params = {"dim": args.dim, "l": args.l, "field": args.field, "samples": args.samples,
              "seed": seed, "entry_tol": args.entry_tol, "trace_tol": args.trace_tol}
    result = {"max_entry_deviation": dev, "trace_sq_estimate": tr_est,
              "trace_sq_exact": k2_norm_sq(args.l, args.dim, args.field), "within_tolerance": ok}
    _emit(report_doc("haar-k2", params, result), args.out)
    if not args.expect:
        return OK
    return OK if ok else FAILED


def cmd_random_frame(args) -> int:
    seed = _seed(args)
    if not 1 <= args.l <= args.m or args.n < 1:
        raise UsageError("need 1 <= l <= m and n >= 1")
    ff = random_frame(args.m, args.l, args.n, seed, args.field)
    doc = frame_doc(ff)
    doc["seed"] = seed
    write_json(args.out, doc)
    return OK


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="moff", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"moff {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("construct-design", help="write the block design of S_r")
    q.add_argument("--r", type=int, required=True)
    q.add_argument("--out", required=True)
    q.add_argument("--format", choices=("json", "csv"), default="json")
    q.set_defaults(func=cmd_construct_design)

    q = sub.add_parser("construct-mubs", help="write a maximal MUB set")
    q.add_argument("--field", choices=("real", "complex"))
    q.add_argument("--dim", type=int)
    q.add_argument("--import", dest="import_path", metavar="FILE",
                   help="verify and canonicalize an external basis-set file")
    q.add_argument("--tol", type=float, default=DEFAULT_TOL)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_construct_mubs)

    q = sub.add_parser("verify-mubs", help="check orthonormality and unbiasedness")
    q.add_argument("--mubs", required=True)
    q.add_argument("--tol", type=float, default=DEFAULT_TOL)
    q.add_argument("--out")
    q.set_defaults(func=cmd_verify_mubs)

    q = sub.add_parser("assemble", help="coordinate projections of every basis and block")
    q.add_argument("--mubs", required=True)
    q.add_argument("--design", required=True)
    q.add_argument("--tol", type=float, default=DEFAULT_TOL)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_assemble)

    q = sub.add_parser("certify", help="write a full certificate for a frame")
    q.add_argument("--frame", required=True)
    q.add_argument("--tol", type=float)
    q.add_argument("--expect", action="append", choices=EXPECTATIONS)
    q.add_argument("--out")
    q.set_defaults(func=cmd_certify)

    q = sub.add_parser("gramian", help="export the cross-Gramian tr(P_i P_j)")
    q.add_argument("--frame", required=True)
    q.add_argument("--tol", type=float)
    q.add_argument("--format", choices=("json", "csv"), default="json")
    q.add_argument("--out")
    q.set_defaults(func=cmd_gramian)

    o = sub.add_parser("oracle", help="brute-force cross-checks")
    osub = o.add_subparsers(dest="oracle", required=True)

    q = osub.add_parser("max-cohesive")
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--l", type=int, required=True)
    q.add_argument("--c", required=True)
    q.add_argument("--budget", type=int, default=10**7, help="node budget")
    q.add_argument("--max-seconds", type=float, default=300.0)
    q.add_argument("--expect", type=int, help="required maximum size")
    q.add_argument("--out")
    q.set_defaults(func=cmd_max_cohesive)

    for name, func in (("extend", cmd_extend), ("design-count", cmd_design_count)):
        q = osub.add_parser(name)
        q.add_argument("--design")
        q.add_argument("--r", type=int, help="use build_S(R) instead of a file")
        if name == "extend":
            q.add_argument("--c", help="cohesiveness bound (default l^2/m)")
            q.add_argument("--expect", choices=("extendable", "not-extendable"))
        else:
            q.add_argument("--t", type=int, required=True)
            q.add_argument("--expect", choices=("design", "non-design"))
        q.add_argument("--out")
        q.set_defaults(func=func)

    q = osub.add_parser("haar-k2")
    q.add_argument("--dim", "--m", dest="dim", type=int, required=True)
    q.add_argument("--l", type=int, required=True)
    q.add_argument("--field", choices=("real", "complex"), default="complex")
    q.add_argument("--samples", type=int, default=100000)
    q.add_argument("--seed", type=int)
    q.add_argument("--entry-tol", type=float, default=5e-3)
    q.add_argument("--trace-tol", type=float, default=1e-2)
    q.add_argument("--expect", action="store_true", help="fail unless within tolerance")
    q.add_argument("--out")
    q.set_defaults(func=cmd_haar_k2)

    q = osub.add_parser("random-frame")
    q.add_argument("--m", "--dim", dest="m", type=int, required=True)
    q.add_argument("--l", type=int, required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--field", choices=("real", "complex"), default="complex")
    q.add_argument("--seed", type=int)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_random_frame)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        return args.func(args)
    except (UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
