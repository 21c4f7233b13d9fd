"""Command-line front end: ``kflag {present,verify,nf,mult,weyl}``.

Exit codes: 0 success, 1 input error, 2 computation error, 3 verification
failure.
"""

from __future__ import annotations

import argparse
import random
import sys
import time

from .errors import ArgumentError, KFlagError, ParseError, UnsupportedError, VerificationFailure
from .expr import dumps, load_tower_spec, parse_poly
from .flag_nf import build_engine, mult_table
from .groebner import (
    EngineAlignment,
    RankReport,
    groebner_for,
    nf_oracle,
    quotient_dimension,
    verify_rank,
)
from .laurent import render
from .sampling import random_laurent
from .tower import equivariant_presentation, expected_rank, ordinary_presentation
from .weyl import Stage, coset_rank, invariant_generators, parabolic_generators, weyl_order

CROSS_CHECK_SAMPLES = 20


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ArgumentError(f"{self.prog}: {message}")


def build_parser():
    p = _Parser(prog="kflag", description="K-ring presentations of flag Bott towers.")
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output and errors")
    common.add_argument("-o", "--output", metavar="FILE", help="write output to FILE")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("present", parents=[common], help="print the presentation")
    sp.add_argument("tower")
    sp.add_argument("--equivariant", action="store_true")

    sp = sub.add_parser("verify", parents=[common], help="check the rank of the quotient")
    sp.add_argument("tower")
    engine = sp.add_mutually_exclusive_group()
    engine.add_argument("--groebner", action="store_true", help="rational Groebner oracle only")
    engine.add_argument("--typeA", action="store_true", help="exact type-A engine only")

    sp = sub.add_parser("nf", parents=[common], help="normal form of an expression")
    sp.add_argument("tower")
    sp.add_argument("expr")
    sp.add_argument("--equivariant", action="store_true")
    sp.add_argument("--groebner", action="store_true", help="coordinates from the Groebner oracle")

    sp = sub.add_parser("mult", parents=[common], help="structure constants of the quotient")
    sp.add_argument("tower")
    sp.add_argument("--equivariant", action="store_true")

    sp = sub.add_parser("weyl", parents=[common], help="Weyl data of a single stage")
    sp.add_argument("family")
    sp.add_argument("vars", type=int)
    sp.add_argument("blocks", type=int, nargs="*")
    return p


# ---------------------------------------------------------------------------
# subcommands


def cmd_present(args):
    t = load_tower_spec(args.tower)
    pres = equivariant_presentation(t) if args.equivariant else ordinary_presentation(t)
    if args.json:
        return dumps(pres.to_json()), 0
    lines = [f"mode: {pres.mode}", "generators:"]
    lines += [f"  {g}" for g in pres.ring_generators]
    lines.append("relations:")
    lines += [f"  {rel}" for rel in pres.relations]
    return "\n".join(lines), 0


def _engine_report(t):
    start = time.perf_counter()
    e = build_engine(t)
    elapsed = int((time.perf_counter() - start) * 1000)
    expected = expected_rank(t)
    computed = len(e.basis)
    return RankReport(t.digest(), expected, computed, computed == expected, len(e.rows()), elapsed, "typeA")


def _cross_check(t):
    """Run both engines and compare ranks and normal forms on a seeded sample."""
    start = time.perf_counter()
    gb = groebner_for(t, inverses="all")
    computed = quotient_dimension(gb)
    expected = expected_rank(t)
    e = build_engine(t)
    passed = computed == expected == len(e.basis)
    if passed:
        align = EngineAlignment(e, gb)
        rng = random.Random(t.digest())
        passed = all(align.agrees(random_laurent(t, rng)) for _ in range(CROSS_CHECK_SAMPLES))
    elapsed = int((time.perf_counter() - start) * 1000)
    return RankReport(t.digest(), expected, computed, passed, len(gb), elapsed, "both")


def cmd_verify(args):
    t = load_tower_spec(args.tower)
    if args.typeA:
        if not t.is_type_a_full_flag():
            raise UnsupportedError("--typeA needs a tower whose stages are all full-flag type A")
        report = _engine_report(t)
    elif args.groebner or not t.is_type_a_full_flag():
        report = verify_rank(t)
    else:
        report = _cross_check(t)
    return dumps(report.to_json()), 0 if report.passed else VerificationFailure.exit_code


def cmd_nf(args):
    t = load_tower_spec(args.tower)
    p = parse_poly(args.expr, t)
    if args.groebner:
        if args.equivariant:
            raise ArgumentError("--groebner works with the ordinary presentation only")
        vec = nf_oracle(groebner_for(t, inverses="all"), p)
    else:
        vec = build_engine(t, "equivariant" if args.equivariant else "ordinary").normal_form(p)
    return dumps(vec.to_json()), 0


def cmd_mult(args):
    t = load_tower_spec(args.tower)
    table = mult_table(build_engine(t, "equivariant" if args.equivariant else "ordinary"))
    if args.json:
        return dumps(table.to_json()), 0
    lines = [f"basis: {', '.join(str(m) for m in table.basis)}"]
    for a, row in zip(table.basis, table.table):
        for b, vec in zip(table.basis, row):
            lines.append(f"{a} * {b} = {render(vec.expansion())}")
    return "\n".join(lines), 0


def cmd_weyl(args):
    s = Stage(args.family, args.vars, tuple(args.blocks))
    data = {
        "family": s.family,
        "vars": s.m,
        "blocks": list(s.blocks),
        "weyl_order": weyl_order(s),
        "coset_rank": coset_rank(s),
        "invariant_generators": [str(g) for g in invariant_generators(s)],
        "parabolic_generators": [str(g) for g in parabolic_generators(s)],
    }
    if args.json:
        return dumps(data), 0
    lines = [
        f"stage: {s.describe()}",
        f"weyl order: {data['weyl_order']}",
        f"coset rank: {data['coset_rank']}",
        "invariant generators:",
    ]
    lines += [f"  {g}" for g in data["invariant_generators"]]
    return "\n".join(lines), 0


COMMANDS = {
    "present": cmd_present,
    "verify": cmd_verify,
    "nf": cmd_nf,
    "mult": cmd_mult,
    "weyl": cmd_weyl,
}


# ---------------------------------------------------------------------------


def _error_payload(exc, code):
    payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    if isinstance(exc, ParseError):
        payload.update(line=exc.line, column=exc.column, expected=list(exc.expected))
    progress = getattr(exc, "progress", None)
    if progress:
        payload["progress"] = progress
    return payload


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    want_json = "--json" in argv
    try:
        args = build_parser().parse_args(argv)
        text, code = COMMANDS[args.command](args)
    except KFlagError as exc:
        code = exc.exit_code
        msg = dumps(_error_payload(exc, code)) if want_json else f"error: {exc}"
        print(msg, file=stderr)
        return code
    except RecursionError as exc:
        code = 2
        msg = dumps(_error_payload(exc, code)) if want_json else "error: expression nested too deeply"
        print(msg, file=stderr)
        return code
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text, file=stdout)
    return code


def main(argv=None):
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
