"""Batch front-end: load a deformation matrix, run the verification and
computation modules, and emit deterministic JSON reports.

Exit codes: 0 all checks pass; 1 some check failed (report still written);
2 invalid configuration.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time

import numpy as np

from . import clifford, forms, holomorphic, kahler
from .report import VerificationReport, default_tol
from .torus import ThetaMatrix


class ConfigError(Exception):
    pass


def atomic_write_json(path, obj):
    """Write via a temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(obj, fh, indent=2, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def load_theta(args, default_n=2):
    if getattr(args, "theta", None):
        with open(args.theta) as fh:
            return ThetaMatrix.from_json(json.load(fh))
    n = getattr(args, "n", None) or default_n
    # deterministic generic irrational-entry default
    return ThetaMatrix.random(n, np.random.default_rng(0))


def parse_eps(text):
    if text in ("both", None):
        return [1, -1]
    if text in ("+1", "1", "+"):
        return [1]
    if text in ("-1", "-"):
        return [-1]
    raise ConfigError(f"--eps-prime must be +1, -1 or both, got {text!r}")


def emit(report_obj, out_path, all_pass):
    if out_path:
        atomic_write_json(out_path, report_obj)
    print(json.dumps(report_obj, indent=2, sort_keys=True))
    return 0 if all_pass else 1


def _meta(args, tol):
    return {"version": "0.1.0", "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
            "tol": tol}


# -- subcommands ------------------------------------------------------------


def cmd_clifford(args):
    rep = clifford.build_gamma(args.n)
    obj = {
        "n": rep.n,
        "N": rep.N,
        "relations_residual": clifford.relations_residual(rep),
        "grading_residual": clifford.grading_product_check(rep),
        "signs_plus": list(rep.signs_plus),
        "signs_minus": list(rep.signs_minus),
    }
    ok = obj["relations_residual"] < 1e-12 and obj["grading_residual"] < 1e-12
    return emit(obj, args.out, ok)


def cmd_enumerate(args):
    ms = kahler.enumerate_matchings(args.n)
    obj = {"n": args.n, "count": len(ms), "matchings": [str(m) for m in ms]}
    return emit(obj, args.out, True)


def cmd_verify(args):
    theta = load_theta(args, default_n=args.n or 2)
    tol = args.tol if args.tol is not None else default_tol()
    if args.matching and args.matching != "all":
        matchings = [kahler.Matching.parse(args.matching)]
        for m in matchings:
            if m.two_k != theta.n:
                raise ConfigError(f"matching {m} is not a perfect matching of 1..{theta.n}")
    else:
        matchings = kahler.enumerate_matchings(theta.n)
    eps_list = parse_eps(args.eps_prime)
    rep = clifford.build_gamma(theta.n)
    merged = VerificationReport(tol=tol)
    dumps = {}
    for matching in matchings:
        for eps in eps_list:
            pkg = kahler.build_kahler_package(theta, matching, eps, rep=rep)
            sub = kahler.verify_n22(pkg, tol=tol)
            for c in sub.checks:
                merged.add(f"[{matching}|eps'={eps:+d}] {c.name}", c.residual, c.tol)
            if args.dump_ops:
                dumps[f"{matching}|eps'={eps:+d}"] = {
                    "del": pkg.del_hol.to_json(),
                    "delbar": pkg.del_bar.to_json(),
                }
        merged.add(f"[{matching}] pm conjugation",
                   kahler.verify_pm_conjugation(theta, matching, rep=rep), 1e-12)
    obj = _meta(args, tol)
    obj.update({
        "n": theta.n,
        "matching": args.matching or "all",
        "eps_prime": args.eps_prime or "both",
        "checks": [c.to_json() for c in merged.checks],
    })
    if dumps:
        obj["operators"] = dumps
    return emit(obj, args.out, merged.all_pass)


def cmd_forms(args):
    theta = load_theta(args, default_n=args.n or 4)
    fbm = forms.build_form_matrices(theta.n)
    table = forms.rank_table(fbm)
    rp = forms.bidegree_decomposition_check(fbm)
    obj = _meta(args, rp.tol)
    obj.update({
        "n": theta.n,
        "nilpotency_residual": forms.nilpotency_residual(fbm),
        "table": table,
        "checks": [c.to_json() for c in rp.checks],
    })
    ok = rp.all_pass and obj["nilpotency_residual"] < 1e-12
    return emit(obj, args.out, ok)


def load_connection(path):
    with open(path) as fh:
        obj = json.load(fh)
    theta = ThetaMatrix.from_json(obj["theta"])
    return holomorphic.Connection.from_json(theta, obj)


def cmd_holo(args):
    tol = args.tol if args.tol is not None else default_tol()
    if args.holo_cmd == "kernel":
        theta = load_theta(args, default_n=args.n or 2)
        basis = holomorphic.holomorphic_kernel(theta, args.radius)
        obj = {"n": theta.n, "radius": args.radius, "dimension": len(basis),
               "basis": [b.to_json() for b in basis]}
        return emit(obj, args.out, len(basis) == 1)
    if args.holo_cmd == "flat":
        conn = load_connection(args.conn)
        res = holomorphic.flatness_check(conn)
        obj = {"m": conn.m, "residual": res, "flat": res < tol}
        return emit(obj, args.out, True)
    if args.holo_cmd == "h0":
        conn = load_connection(args.conn)
        basis = holomorphic.h0_solve(conn, args.radius)
        obj = {"m": conn.m, "radius": args.radius, "dimension": len(basis),
               "basis": [[x.to_json() for x in xi] for xi in basis]}
        return emit(obj, args.out, True)
    if args.holo_cmd == "ps-compare":
        with open(args.theta2) as fh:
            theta = ThetaMatrix.from_json(json.load(fh))
        res = holomorphic.ps_compare(theta, radius=args.radius)
        obj = {"residual": res, "pass": res < 1e-12}
        return emit(obj, args.out, obj["pass"])
    raise ConfigError(f"unknown holo subcommand {args.holo_cmd!r}")


def cmd_report(args):
    """Everything at once for one torus dimension."""
    theta = load_theta(args, default_n=args.n or 2)
    tol = args.tol if args.tol is not None else default_tol()
    rep = clifford.build_gamma(theta.n)
    merged = VerificationReport(tol=tol)
    merged.add("clifford relations", clifford.relations_residual(rep), 1e-12)
    merged.add("grading product", clifford.grading_product_check(rep), 1e-12)
    for matching in kahler.enumerate_matchings(theta.n):
        for eps in (1, -1):
            pkg = kahler.build_kahler_package(theta, matching, eps, rep=rep)
            sub = kahler.verify_n22(pkg, tol=tol)
            for c in sub.checks:
                merged.add(f"[{matching}|eps'={eps:+d}] {c.name}", c.residual, c.tol)
        merged.add(f"[{matching}] pm conjugation",
                   kahler.verify_pm_conjugation(theta, matching, rep=rep), 1e-12)
    for variant in ("plus", "minus"):
        sub = kahler.verify_real_structure(theta, rep=rep, variant=variant, tol=tol)
        for c in sub.checks:
            merged.add(f"[J {variant}] {c.name}", c.residual, c.tol)
    fbm = forms.build_form_matrices(rep)
    merged.add("form nilpotency", forms.nilpotency_residual(fbm), 1e-12)
    merged.extend(forms.bidegree_decomposition_check(fbm, tol=tol))
    kern = holomorphic.holomorphic_kernel(theta, args.radius)
    merged.add("holomorphic kernel is C.1", float(abs(len(kern) - 1)), 0.5)
    obj = _meta(args, tol)
    obj.update({
        "n": theta.n,
        "matching": "all",
        "eps_prime": "both",
        "checks": [c.to_json() for c in merged.checks],
        "summary": {
            "pass_count": sum(c.passed for c in merged.checks),
            "total": len(merged.checks),
            "max_residual": merged.max_residual,
        },
    })
    for line in merged.lines():
        print(line, file=sys.stderr)
    return emit(obj, args.out, merged.all_pass)


# -- argument parsing -------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(
        prog="nckahler",
        description="verify the Kahler operator identities of noncommutative even tori",
    )
    sub = p.add_subparsers(dest="cmd", required=True)

    def common(sp, radius_default=3):
        sp.add_argument("--theta", help="path to a deformation-matrix JSON file")
        sp.add_argument("--n", type=int, help="torus dimension (even)")
        sp.add_argument("--tol", type=float, default=None,
                        help="residual tolerance (default 1e-10 or NCK_TOL)")
        sp.add_argument("--radius", type=int, default=radius_default,
                        help="truncation box radius")
        sp.add_argument("--out", help="write the JSON report to this path (atomic)")

    sp = sub.add_parser("clifford", help="gamma matrices, grading, sign tables")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_clifford)

    sp = sub.add_parser("enumerate", help="perfect matchings of 1..n")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_enumerate)

    sp = sub.add_parser("verify", help="run the N=(2,2) checklist")
    common(sp)
    sp.add_argument("--matching", help='"1-2,3-4" or "all" (default all)')
    sp.add_argument("--eps-prime", dest="eps_prime", help="+1, -1 or both")
    sp.add_argument("--dump-ops", dest="dump_ops", action="store_true",
                    help="include operator normal forms in the report")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("forms", help="differential-form ranks")
    common(sp)
    sp.set_defaults(func=cmd_forms)

    sp = sub.add_parser("holo", help="holomorphic calculus")
    hsub = sp.add_subparsers(dest="holo_cmd", required=True)
    hp = hsub.add_parser("kernel")
    common(hp)
    hp.set_defaults(func=cmd_holo)
    hp = hsub.add_parser("flat")
    hp.add_argument("--conn", required=True, help="connection JSON file")
    hp.add_argument("--tol", type=float, default=None)
    hp.add_argument("--out")
    hp.set_defaults(func=cmd_holo)
    hp = hsub.add_parser("h0")
    hp.add_argument("--conn", required=True)
    hp.add_argument("--radius", type=int, default=3)
    hp.add_argument("--tol", type=float, default=None)
    hp.add_argument("--out")
    hp.set_defaults(func=cmd_holo)
    hp = hsub.add_parser("ps-compare")
    hp.add_argument("--theta2", required=True, help="2x2 deformation matrix JSON")
    hp.add_argument("--radius", type=int, default=4)
    hp.add_argument("--tol", type=float, default=None)
    hp.add_argument("--out")
    hp.set_defaults(func=cmd_holo)

    sp = sub.add_parser("report", help="full verification report")
    common(sp)
    sp.set_defaults(func=cmd_report)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors already
        raise exc
    try:
        return args.func(args)
    except (ConfigError, kahler.MatchingError, FileNotFoundError,
            json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
