"""Command-line interface.

Exit codes: 0 on success or a passing verdict, 1 on rejection or a failed
verdict, 2 on usage or parse errors.  Maps are written "P; Q"; batch files
hold one map per line.  JUNG_TAME_TOL sets the default verification
tolerance.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace

from .decompose import (
    RejectionError,
    decompose,
    decomposition_to_json,
    invert,
    is_keller,
)
from .generate import GenConfig, random_tame
from .parser import ParseError, parse_map, parse_poly
from .polynomials import GAUSSIAN, RATIONAL, PolyMap, compose
from .puiseux import (
    NotMonicError,
    PuiseuxConfig,
    PuiseuxError,
    expansions_at_infinity,
)
from .witness import NotKellerError, VerifyConfig, verify_division

_FIELD_MODES = {"q": RATIONAL, "qi": GAUSSIAN}


def _build_argparser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="tameplane",
        description="Tame decomposition, inversion and degree-divisibility "
                    "witnesses for plane polynomial automorphisms.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_common(p, with_map=True):
        if with_map:
            group = p.add_mutually_exclusive_group(required=True)
            group.add_argument("map", nargs="?", help="map text \"P; Q\"")
            group.add_argument("--file", help="file with one map per line")
        p.add_argument("--json", action="store_true", help="emit JSON")
        p.add_argument("--field", choices=("q", "qi"), default="q",
                       help="coefficient field: rationals or Gaussian rationals")
        p.add_argument("--tol", type=float, default=None,
                       help="verification tolerance (default env JUNG_TAME_TOL "
                            "or 1e-7)")
        p.add_argument("--trunc", type=int, default=None,
                       help="series truncation (significant terms)")

    for verb, help_text in [
        ("check", "test whether a map is a tame automorphism"),
        ("decompose", "write a map as affine and triangular factors"),
        ("invert", "compute the exact inverse map"),
        ("verify-division", "build the degree-divisibility witness"),
    ]:
        p = sub.add_parser(verb, help=help_text)
        add_common(p)

    p = sub.add_parser("compose", help="compose two maps (first applied last)")
    p.add_argument("outer", help="outer map \"P; Q\"")
    p.add_argument("inner", help="inner map \"P; Q\"")
    p.add_argument("--json", action="store_true")
    p.add_argument("--field", choices=("q", "qi"), default="q")

    p = sub.add_parser("puiseux", help="expand a monic-in-y curve at infinity")
    p.add_argument("poly", help="polynomial text, monic in y")
    p.add_argument("--json", action="store_true")
    p.add_argument("--field", choices=("q", "qi"), default="q")
    p.add_argument("--trunc", type=int, default=None)

    p = sub.add_parser("generate", help="emit a seeded random tame map")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--max-tri-degree", type=int, default=4)
    p.add_argument("--coeff-bound", type=int, default=5)
    p.add_argument("--field", choices=("q", "qi"), default="q")
    p.add_argument("--json", action="store_true")
    return ap


def _default_tol(args) -> float:
    if getattr(args, "tol", None) is not None:
        return args.tol
    env = os.environ.get("JUNG_TAME_TOL")
    if env is not None:
        try:
            return float(env)
        except ValueError:
            pass
    return 1e-7


def _iter_maps(args, mode):
    if getattr(args, "file", None):
        with open(args.file) as fh:
            for line in fh:
                line = line.strip()
                if line:
                    yield parse_map(line, mode)
    else:
        yield parse_map(args.map, mode)


def _emit(obj, as_json: bool, text: str):
    if as_json:
        print(json.dumps(obj, indent=2))
    else:
        print(text)


def _cmd_check(args, mode) -> int:
    status = 0
    for m in _iter_maps(args, mode):
        try:
            d = decompose(m)
            _emit({"ok": True, "factors": len(d.factors)}, args.json,
                  f"ok: tame automorphism with {len(d.factors)} factors")
        except RejectionError as exc:
            status = 1
            _emit({"ok": False, "reason": exc.evidence.reason,
                   "detail": str(exc.evidence.detail)}, args.json,
                  f"rejected: {exc.evidence}")
    return status


def _cmd_decompose(args, mode) -> int:
    status = 0
    for m in _iter_maps(args, mode):
        try:
            d = decompose(m)
            _emit(decomposition_to_json(d), args.json,
                  "\n".join(str(f) for f in decomposition_to_json(d)))
        except RejectionError as exc:
            status = 1
            _emit({"ok": False, "reason": exc.evidence.reason,
                   "detail": str(exc.evidence.detail)}, args.json,
                  f"rejected: {exc.evidence}")
    return status


def _cmd_invert(args, mode) -> int:
    status = 0
    for m in _iter_maps(args, mode):
        try:
            g = invert(m)
            _emit({"p": str(g.p), "q": str(g.q)}, args.json, str(g))
        except RejectionError as exc:
            status = 1
            _emit({"ok": False, "reason": exc.evidence.reason,
                   "detail": str(exc.evidence.detail)}, args.json,
                  f"rejected: {exc.evidence}")
    return status


def _cmd_compose(args, mode) -> int:
    outer = parse_map(args.outer, mode)
    inner = parse_map(args.inner, mode)
    g = compose(outer, inner)
    _emit({"p": str(g.p), "q": str(g.q)}, args.json, str(g))
    return 0


def _cmd_verify(args, mode) -> int:
    pcfg = PuiseuxConfig()
    cfg = VerifyConfig(tol=_default_tol(args), trunc_terms=args.trunc,
                       puiseux=pcfg)
    status = 0
    for m in _iter_maps(args, mode):
        try:
            report = verify_division(m, cfg)
        except NotKellerError as exc:
            status = 1
            _emit({"ok": False, "reason": "not_keller",
                   "jacobian": str(exc.jacobian)}, args.json,
                  f"rejected: {exc}")
            continue
        if args.json:
            print(json.dumps(report.to_json(), indent=2))
        else:
            th = report.theta
            print(f"theta = {th}  phi: {report.phi.render()}")
            print(f"P_phi = {report.to_json()['P_phi']}  (a_phi = {report.p_face.a})")
            print(f"Q_phi = {report.to_json()['Q_phi']}  (b_phi = {report.q_face.a})")
            print(f"m_phi = {report.m_phi}  n_phi = {report.n_phi}")
            for name, v in report.verdicts.items():
                print(f"  {name:22s} {'pass' if v.passed else 'FAIL'} "
                      f"(margin {v.margin:.3g})")
            print(f"conclusion: {report.conclusion} "
                  f"({report.deg_q} | {report.deg_p})")
        if not report.passed:
            status = 1
    return status


def _cmd_puiseux(args, mode) -> int:
    h = parse_poly(args.poly, mode)
    branches = expansions_at_infinity(h, args.trunc)
    if args.json:
        print(json.dumps([b.to_json() for b in branches.branches], indent=2))
    else:
        for b in branches.branches:
            print(f"ram {b.ram}: {b.render()}")
    return 0


def _cmd_generate(args, mode) -> int:
    cfg = GenConfig(seed=args.seed, depth=args.depth,
                    max_tri_degree=args.max_tri_degree,
                    coeff_bound=args.coeff_bound, field_mode=mode)
    m, d = random_tame(cfg)
    payload = {"seed": args.seed, "depth": args.depth,
               "map": {"p": str(m.p), "q": str(m.q)},
               "factors": decomposition_to_json(d)}
    print(json.dumps(payload, indent=2))
    return 0


def main(argv=None) -> int:
    ap = _build_argparser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    mode = _FIELD_MODES[getattr(args, "field", "q")]
    try:
        if args.command == "check":
            return _cmd_check(args, mode)
        if args.command == "decompose":
            return _cmd_decompose(args, mode)
        if args.command == "invert":
            return _cmd_invert(args, mode)
        if args.command == "compose":
            return _cmd_compose(args, mode)
        if args.command == "verify-division":
            return _cmd_verify(args, mode)
        if args.command == "puiseux":
            return _cmd_puiseux(args, mode)
        if args.command == "generate":
            return _cmd_generate(args, mode)
        raise AssertionError(f"unhandled command {args.command}")
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except (NotMonicError, PuiseuxError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
