"""Command line entry point: ``specgeo <command> ...``.

JSON reports go to stdout, a one-line-per-suite summary to stderr.  Exit codes:
0 all checks pass, 1 some check failed, 2 usage error, 3 internal
inconsistency (e.g. two metric routes disagreeing).
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings

from . import pv, suites
from .corpus import load_entry, shipped_corpus
from .errors import InternalCheckError, NotSpecialWarning, SpecGeoError, UnimplementedEntry
from .jalgebra import IsometricMap, build_u0_rank2, build_u0_rank3, load_isometric_map
from .report import SuiteReport, dump

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _positive(text):
    val = int(text)
    if val < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return val


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")

    p = _Parser(prog="specgeo", description="Exact and numerical checks for hypersurface, tube-domain "
                "and special-cone geometry, J-algebras and prehomogeneous modules.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("tube-check", parents=[common], help="tube-domain isometry, product and pullback checks")
    t.add_argument("--poly", required=True, help="polynomial JSON file (or name of a shipped corpus file)")
    t.add_argument("--suite", choices=suites.TUBE_SUITES + ("all",), default="all")
    t.add_argument("--points", type=_positive, default=10)
    t.add_argument("--seed", type=int, default=0)

    c = sub.add_parser("cone-check", parents=[common], help="Lagrangean cone, gamma and potential checks")
    c.add_argument("--poly", required=True)
    c.add_argument("--suite", choices=suites.CONE_SUITES + ("all",), default="all")
    c.add_argument("--points", type=_positive, default=10)
    c.add_argument("--seed", type=int, default=0)

    j = sub.add_parser("jalg", help="normal J-algebra families")
    jsub = j.add_subparsers(dest="action", required=True, parser_class=_Parser)
    jb = jsub.add_parser("build", parents=[common])
    jb.add_argument("--family", choices=("rank2", "rank3"), required=True)
    jb.add_argument("--p", type=int, default=0)
    jb.add_argument("--s", type=int, default=1)
    jb.add_argument("--psi", help="isometric map JSON (rank3); omit for psi = 0")
    jb.add_argument("--q", type=int, default=0, help="dim x13 for psi = 0 (rank3)")
    jb.add_argument("--gram-signs", default=None,
                    help="rank2: sign of the x block (+1/-1); rank3 with psi = 0: two comma separated signs")
    jv = jsub.add_parser("verify", parents=[common])
    jv.add_argument("--all", action="store_true", required=True)
    jv.add_argument("--seed", type=int, default=0)

    v = sub.add_parser("pv", help="prehomogeneous module catalog")
    vsub = v.add_subparsers(dest="action", required=True, parser_class=_Parser)
    vsub.add_parser("list", parents=[common])
    vc = vsub.add_parser("check", parents=[common])
    vc.add_argument("--entry", required=True)
    vc.add_argument("--samples", type=_positive, default=20)
    vc.add_argument("--seed", type=int, default=0)
    ve = vsub.add_parser("enumerate-keys", parents=[common])
    ve.add_argument("--dmax", type=int, required=True)

    a = sub.add_parser("all", parents=[common], help="every suite on the shipped corpus")
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--points", type=_positive, default=10)
    return p


def _emit(args, reports: list, extra: dict | None = None) -> int:
    if args.format == "json":
        print(dump(reports, extra))
    else:
        for r in reports:
            print(r.summary())
    for r in reports:
        print(r.summary(), file=sys.stderr)
    return EXIT_FAIL if any(r.status == "fail" for r in reports) else EXIT_OK


def _emit_data(args, data) -> int:
    if args.format == "json":
        print(json.dumps(data, indent=2))
    else:
        rows = data if isinstance(data, list) else [data]
        for row in rows:
            print(" ".join(f"{k}={v}" for k, v in row.items()))
    return EXIT_OK


def _signs(text, count):
    if text is None:
        return [1] * count
    vals = [int(x) for x in text.split(",")]
    if len(vals) != count or any(v not in (1, -1) for v in vals):
        raise ValueError(f"--gram-signs needs {count} values from {{1, -1}}")
    return vals


def _signed_zero_psi(p, q, signs) -> IsometricMap:
    psi = IsometricMap.zero(p, q, 0)
    g12 = [[signs[0] if i == j else 0 for j in range(p)] for i in range(p)]
    g13 = [[signs[1] if i == j else 0 for j in range(q)] for i in range(q)]
    return IsometricMap([], g12, g13, psi.psi, f"zero({p},{q})")


def _jalg_build(args) -> int:
    rep = SuiteReport(f"jalg:build:{args.family}")
    if args.family == "rank2":
        (sign,) = _signs(args.gram_signs, 1)
        L, S, h = build_u0_rank2(args.p, args.s, x_sign=sign)
        tag = f"u0({args.p},{args.s})"
    else:
        if args.psi:
            psi = load_isometric_map(args.psi)
        else:
            psi = _signed_zero_psi(args.p, args.q, _signs(args.gram_signs, 2))
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", NotSpecialWarning)
            L, S, h = build_u0_rank3(psi)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        tag = f"u0(psi={psi.name})"
    suites._algebra_records(rep, tag, L, S, h)
    extra = {"algebra": L.to_json(), "polynomial": h.to_text(), "degree": h.d}
    return _emit(args, [rep], extra)


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "tube-check":
            entry = load_entry(args.poly)
            names = suites.TUBE_SUITES if args.suite == "all" else (args.suite,)
            return _emit(args, [suites.tube_suite(entry, s, args.points, args.seed) for s in names],
                         {"command": "tube-check", "seed": args.seed})
        if args.command == "cone-check":
            entry = load_entry(args.poly)
            names = suites.CONE_SUITES if args.suite == "all" else (args.suite,)
            return _emit(args, [suites.cone_suite(entry, s, args.points, args.seed) for s in names],
                         {"command": "cone-check", "seed": args.seed})
        if args.command == "jalg":
            if args.action == "build":
                return _jalg_build(args)
            return _emit(args, [suites.jalg_suite(args.seed)], {"command": "jalg verify", "seed": args.seed})
        if args.command == "pv":
            if args.action == "list":
                return _emit_data(args, [e.describe() for e in pv.catalog()])
            if args.action == "enumerate-keys":
                return _emit_data(args, pv.enumerate_key_solutions(args.dmax))
            return _emit(args, [suites.pv_entry_suite(args.entry, args.samples, args.seed)],
                         {"command": "pv check", "seed": args.seed})
        if args.command == "all":
            return _emit(args, suites.run_all(args.seed, args.points),
                         {"command": "all", "seed": args.seed, "corpus": [e.name for e in shipped_corpus()]})
    except InternalCheckError as exc:
        print(f"internal check failed: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (UnimplementedEntry, KeyError) as exc:
        print(f"specgeo: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SpecGeoError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"specgeo: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE


def main(argv=None):
    sys.exit(run(argv))
