"""Command line driver: ``tlsf check|convert|eval|solve``.

Exit codes: 0 ok / satisfied / realizable, 1 violated / unrealizable,
2 usage or input error, 3 unknown verdict.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .ast import Semantics, Variant
from .elaborator import DEFAULT_RECURSION_CAP, elaborate
from .errors import TLSFError
from .exporters import (
    simplify,
    simplify_spec,
    write_ast_dump,
    write_basic_tlsf,
    write_flat_formula,
    write_full_tlsf,
)
from .ltlf import evaluate, parse_trace
from .parser import parse_spec
from .realizability import DEFAULT_STATE_CAP, solve
from .semantics import compose, strict_to_standard

EXIT_OK, EXIT_NO, EXIT_ERROR, EXIT_UNKNOWN = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _param(text):
    name, sep, value = text.partition("=")
    if not sep or not name.strip():
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"parameter value must be a natural number: {text!r}") from None
    if number < 0:
        raise argparse.ArgumentTypeError(f"parameter value must be a natural number: {text!r}")
    return name.strip(), number


def build_parser():
    parser = argparse.ArgumentParser(prog="tlsf", description="TLSF front end with LTLf support")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("file", help="TLSF source file")
        p.add_argument("-p", "--param", action="append", type=_param, default=[],
                       metavar="NAME=VALUE", help="override a parameter")
        p.add_argument("--recursion-cap", type=int, default=DEFAULT_RECURSION_CAP,
                       help="maximum number of function applications")
        p.add_argument("--basic", action="store_true", help="parse with the basic-format grammar")

    p = sub.add_parser("check", help="parse and elaborate, report problems")
    common(p)

    p = sub.add_parser("convert", help="elaborate and export")
    common(p)
    p.add_argument("--format", required=True, choices=["basic", "full", "flat-fin", "flat-inf", "ast"])
    p.add_argument("--simplify", action="store_true", help="fold boolean constants before writing")
    p.add_argument("--strict-to-standard", action="store_true",
                   help="rewrite Strict semantics into an equivalent Standard specification")

    p = sub.add_parser("eval", help="evaluate the composed formula on a finite trace")
    common(p)
    p.add_argument("--trace", required=True, help="trace file such as '{a b} {} {b}'")

    p = sub.add_parser("solve", help="decide realizability (Finite semantics)")
    common(p)
    p.add_argument("--state-cap", type=int, default=DEFAULT_STATE_CAP)
    p.add_argument("--strategy-out", metavar="PATH", help="write the controller table here")
    return parser


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as err:
        raise UsageError(f"{path}: error: cannot read file: {err.strerror}") from None


def _load(args):
    source = _read(args.file)
    spec = parse_spec(source, "basic" if args.basic else "full")
    overrides = dict(args.param)
    return spec, elaborate(spec, overrides, args.recursion_cap)


def _convert(args, out):
    spec, elab = _load(args)
    if args.strict_to_standard:
        if elab.info.semantics.variant is not Variant.STRICT:
            raise UsageError(f"{args.file}: error: --strict-to-standard needs Strict semantics")
        elab = strict_to_standard(elab)
    if args.format == "full":
        if args.simplify or args.strict_to_standard:
            raise UsageError("error: --format full prints the parsed file and takes no rewriting flags")
        out.write(write_full_tlsf(spec))
    elif args.format == "basic":
        out.write(write_basic_tlsf(simplify_spec(elab) if args.simplify else elab))
    elif args.format == "ast":
        out.write(write_ast_dump(simplify_spec(elab) if args.simplify else elab))
    else:
        formula = compose(elab).formula
        if args.simplify:
            formula = simplify(formula)
        dialect = "finite" if args.format == "flat-fin" else "infinite"
        out.write(write_flat_formula(formula, dialect) + "\n")
    return EXIT_OK


def _eval(args, out):
    _, elab = _load(args)
    sem = elab.info.semantics
    if sem.variant is Variant.STANDARD:
        elab = replace(elab, info=replace(elab.info, semantics=Semantics(sem.model, Variant.FINITE)))
    try:
        word = parse_trace(_read(args.trace), elab.inputs + elab.outputs)
    except TLSFError as exc:
        raise UsageError(f"{args.trace}: error: {exc.message}") from None
    ok = evaluate(compose(elab).formula, word)
    out.write(("satisfied" if ok else "violated") + "\n")
    return EXIT_OK if ok else EXIT_NO


def _solve(args, out):
    _, elab = _load(args)
    verdict = solve(elab, args.state_cap)
    states = len(verdict.arena.states) if verdict.arena else 0
    out.write(f"{verdict.status} ({states} states)\n")
    if args.strategy_out and verdict.status == "realizable":
        try:
            with open(args.strategy_out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(verdict.dump())
        except OSError as err:
            raise UsageError(f"{args.strategy_out}: error: cannot write: {err.strerror}") from None
    return {"realizable": EXIT_OK, "unrealizable": EXIT_NO}.get(verdict.status, EXIT_UNKNOWN)


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        if args.command == "check":
            _, elab = _load(args)
            out.write(f"ok: {len(elab.inputs)} inputs, {len(elab.outputs)} outputs\n")
            return EXIT_OK
        if args.command == "convert":
            return _convert(args, out)
        if args.command == "eval":
            return _eval(args, out)
        return _solve(args, out)
    except UsageError as exc:
        err.write(f"{exc}\n")
        return EXIT_ERROR
    except TLSFError as exc:
        err.write(exc.render(args.file) + "\n")
        return EXIT_ERROR


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
