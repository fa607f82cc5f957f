"""Command-line driver.

Exit status: 0 when everything passes, 1 on a law or verification failure
(counterexample lines are printed), 2 on usage and parse errors.  ``infer``
also exits 2 when any query produces a diagnostic.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import atlas as atl
from .composition import composed_indices
from .dsl import parse_program
from .errors import DslError, NotAbsorbing, RegCalcError
from .families import (
    FAMILY_KINDS, VALUE_MIN, _absorbing, _floor_harmonic, check_distributivity_criterion,
    family_laws, make_family, unary_map,
)
from .index_core import (
    ADD, MAX, GammaRange, IndexFn, default_gamma, format_index, star_harmonic, star_young,
)
from .inference import format_report, run_program
from .oracle.verify import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# operations accepted by `compose`; products extend below 1 so folds stay defined
OPS = {
    "min": VALUE_MIN,
    "max": MAX,
    "add": ADD,
    "holder": IndexFn("holder", _absorbing(star_harmonic)),
    "holder-int": IndexFn("holder-int", _absorbing(_floor_harmonic)),
    "young": IndexFn("young", _absorbing(star_young)),
}


class UsageError(Exception):
    pass


def _out(lines) -> None:
    for line in lines:
        print(line)


# ---------------------------------------------------------------------------
# check

def _auto_gamma_min(kind: str, mode: str, grading, gamma_max: int) -> int:
    floor = {"lp-holder": 2 if mode == "strict" else 1, "lp-young": 1}.get(kind)
    if floor is None:
        return 0
    for m in range(gamma_max + 1):
        if all(grading(i) >= floor for i in range(m, gamma_max + 1)):
            return m
    raise UsageError(f"grading never reaches {floor} on 0..{gamma_max}")


def cmd_check(args) -> int:
    grading = unary_map(args.grading)
    gmax = args.gamma_max if args.gamma_max is not None else default_gamma().max
    gmin = args.gamma_min
    if gmin is None:
        gmin = _auto_gamma_min(args.family, args.mode, grading, gmax)
    gamma = GammaRange(gmax, gmin)
    sob = None
    if args.family == "sobolev":
        if None in (args.n, args.p, args.q, args.r):
            raise UsageError("sobolev needs --n --p --q --r")
        sob = (args.n, args.p, args.q, args.r)
    k = args.k if args.k is not None else gmax
    fam = make_family(args.family, grading, k=k, mode=args.mode, gamma=gamma,
                      domain_kind=args.domain, sobolev=sob)
    print(f"# family {fam.name} gamma {gamma.min}..{gamma.max}")
    reports = family_laws(fam)
    reports.append(check_distributivity_criterion(fam.grading, fam.star, gamma))
    failed = False
    for rep in reports:
        _out(rep.lines("check"))
        failed |= not rep.passed
    return EXIT_FAIL if failed else EXIT_OK


# ---------------------------------------------------------------------------
# compose

def cmd_compose(args) -> int:
    rows = composed_indices(unary_map(args.alpha), OPS[args.eps], OPS[args.delta],
                            unary_map(args.beta), args.order)
    for i, a, b in rows.rows:
        print(f"({i}, {format_index(a)}, {format_index(b)})")
    return EXIT_OK


# ---------------------------------------------------------------------------
# infer

def cmd_infer(args) -> int:
    text = _read(args.file)
    try:
        results = run_program(parse_program(text))
    except DslError as e:
        print(f"{args.file}:{e}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(format_report(results))
    # per-query diagnostics count as parse-level errors
    return EXIT_USAGE if any(r.error for r in results) else EXIT_OK


# ---------------------------------------------------------------------------
# atlas

def cmd_atlas_retract(args) -> int:
    a = atl.parse_atlas(_read(args.file))
    try:
        r = atl.retract_atlas(a, args.mode)
    except NotAbsorbing as e:
        print(f"atlas retract[{args.mode}] FAIL Ck B 0", flush=True)
        print(f"# {e}", file=sys.stderr)
        return EXIT_FAIL
    sys.stdout.write(atl.format_atlas(r))
    return EXIT_OK


def cmd_atlas_check(args) -> int:
    a = atl.parse_atlas(_read(args.file))
    ok = atl.check_b_structure(a)
    ck = [f"{a.labels[i]}->{a.labels[j]}" for i, j in a.pairs() if not a.btag[i, j]]
    print(f"atlas b_structure {'PASS' if ok else 'FAIL'} {len(ck)} {len(a.pairs())} 0")
    for e in ck[:10]:
        print(f"atlas b_structure[{e}] FAIL Ck B 0")
    failed = not ok
    if args.mode is not None:
        magma = atl.transition_magma(a, args.mode)
        rep = atl.check_ideal(magma, atl.bdiffeo_subset(magma), atl.ideal_side(args.mode))
        _out(rep.lines("atlas"))
        failed |= not rep.passed
    return EXIT_FAIL if failed else EXIT_OK


# ---------------------------------------------------------------------------
# verify

def cmd_verify(args) -> int:
    results = run_suite(args.suite, seed=args.seed)
    _out(r.line() for r in results)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


# ---------------------------------------------------------------------------

def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="regcalc", allow_abbrev=False,
                                description="Index calculus for graded regularity families.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", allow_abbrev=False, help="structure laws of a family")
    c.add_argument("--family", required=True, choices=FAMILY_KINDS)
    c.add_argument("--grading", default="id", help="id, const:N, a,b,c")
    c.add_argument("--gamma-max", type=int, default=None)
    c.add_argument("--gamma-min", type=int, default=None)
    c.add_argument("--mode", choices=("strict", "int"), default="strict")
    c.add_argument("--k", type=int, default=None)
    c.add_argument("--domain", choices=("bounded", "unbounded"), default=None,
                   help="default: the family's natural domain")
    for key in "npqr":
        c.add_argument(f"--{key}", type=int, default=None)
    c.set_defaults(func=cmd_check)

    m = sub.add_parser("compose", allow_abbrev=False, help="composed index table")
    m.add_argument("--alpha", required=True)
    m.add_argument("--beta", default="id")
    m.add_argument("--eps", choices=sorted(OPS), default="holder")
    m.add_argument("--delta", choices=sorted(OPS), default="min")
    m.add_argument("--order", type=int, required=True)
    m.set_defaults(func=cmd_compose)

    i = sub.add_parser("infer", allow_abbrev=False, help="run a DSL program")
    i.add_argument("file")
    i.set_defaults(func=cmd_infer)

    a = sub.add_parser("atlas", allow_abbrev=False, help="atlas tools")
    asub = a.add_subparsers(dest="atlas_command", required=True)
    modes = [mo.value for mo in atl.AbsorbMode]
    r = asub.add_parser("retract", allow_abbrev=False)
    r.add_argument("--mode", choices=modes, required=True)
    r.add_argument("file")
    r.set_defaults(func=cmd_atlas_retract)
    k = asub.add_parser("check", allow_abbrev=False)
    k.add_argument("--mode", choices=modes, default=None)
    k.add_argument("file")
    k.set_defaults(func=cmd_atlas_check)

    v = sub.add_parser("verify", allow_abbrev=False, help="numerical oracle suites")
    v.add_argument("--suite", choices=sorted(SUITES) + ["all"], default="all")
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return args.func(args)
    except UsageError as e:
        print(f"regcalc: {e}", file=sys.stderr)
        return EXIT_USAGE
    except RegCalcError as e:
        print(f"regcalc: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
