"""Command-line entry point: ``boolmobius {transform,weight,verify,bench}``.

Exit codes: 0 success, 1 usage, 2 parse error, 3 capacity, 4 divergence.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import bench
from .core import (
    BoolMobiusError,
    CapacityError,
    DenseForm,
    Role,
    SparsePoly,
    bits_to_poly,
    check_sparse_capacity,
    dense_to_sparse,
    poly_to_bits,
)
from .fastpath import Expr, Family, NoFastPath, expand, fast_weight, variables, weight_of
from .oracle import weight_naive
from .parser import CORPUS_DIR, Indexing, ParseError, parse_corpus, parse_dense, serialize
from .transforms import Algo, OpCounter, mobius_dense, mobius_list_sequential, mu_full

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_CAPACITY, EXIT_DIVERGENCE = range(5)

TRANSFORM_ALGOS = [a.value for a in Algo]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class Loaded:
    """One CLI input: either a dense vector or a polynomial expression."""

    dense: DenseForm | None
    expr: Expr | None
    nvars: int
    indexing: Indexing

    def anf_poly(self) -> SparsePoly:
        """The polynomial form of the function itself (its ANF)."""
        if self.expr is not None:
            return expand(self.expr, self.nvars)
        if self.dense.role is Role.ANF:
            return dense_to_sparse(self.dense)
        # a truth table: its transform is the ANF
        return mu_full(bits_to_poly(self.dense.bits))[0]


def _read_source(args) -> str:
    if getattr(args, "corpus", None) == "achterbahn":
        return (CORPUS_DIR / "achterbahn.poly").read_text(encoding="utf-8")
    if args.expr is not None:
        return args.expr
    if args.source in (None, "-"):
        return sys.stdin.read()
    return Path(args.source).read_text(encoding="utf-8")


def _load(args) -> Loaded:
    text = _read_source(args)
    body = "\n".join(line for line in text.splitlines() if not line.strip().startswith("#")).strip()
    indexing = Indexing(args.indexing) if args.indexing is not None else Indexing.ONE_BASED
    if body.startswith(("anf:", "tt:")):
        dense = parse_dense(body)
        if args.n is not None and args.n != dense.n:
            raise UsageError(f"--n {args.n} does not match the dense input (n={dense.n})")
        return Loaded(dense, None, dense.n, indexing)
    corpus = parse_corpus(text, indexing)
    used = variables(corpus.expr).bit_length()
    nvars = args.n if args.n is not None else corpus.nvars if corpus.nvars is not None else used
    if nvars < used:
        raise UsageError(f"n={nvars} is smaller than the highest variable used ({used})")
    check_sparse_capacity(nvars)
    return Loaded(None, corpus.expr, nvars, corpus.indexing)


def _parse_order(text: str, indexing: Indexing) -> list[int]:
    try:
        order = [int(tok) - indexing.value for tok in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"bad --order {text!r}; expected comma-separated indices") from exc
    return order


# --- subcommands ----------------------------------------------------------

def cmd_transform(args) -> int:
    src = _load(args)
    algo = Algo(args.algo)
    counter = OpCounter()
    if src.dense is not None:
        out = args.out or "dense"
        result = mobius_dense(src.dense, algo, counter)
        if out == "poly":
            print(serialize(bits_to_poly(result.bits), src.indexing))
            return EXIT_OK
        if out != "dense" and Role(out) is not result.role:
            raise UsageError(f"the transform of {src.dense.role.value} input is a {result.role.value} vector")
        print(serialize(result))
        return EXIT_OK

    p = src.anf_poly()
    if args.order is not None:
        if algo is not Algo.EXCLUSIVE_MULT_LIST:
            raise UsageError("--order only applies to --algo list")
        image = mobius_list_sequential(p, order=_parse_order(args.order, src.indexing), counter=counter)
    else:
        image, counter = mu_full(p, algo, counter)
    out = args.out or "poly"
    if out == "poly":
        print(serialize(image, src.indexing))
    elif out == "tt":
        print(serialize(DenseForm(poly_to_bits(image), Role.TRUTH_TABLE)))
    else:
        raise UsageError("the transform of a polynomial input is its truth table; use --out tt or poly")
    if args.counts:
        print(json.dumps({"op_count": counter.total, "op_unit": counter.unit.value,
                          "per_step": counter.per_step}, sort_keys=True), file=sys.stderr)
    return EXIT_OK


_PAIR_FAMILIES = (Family.MONO_TIMES_MONO_PAIR, Family.PADDED_MONO_TIMES_MONO_PAIR)


def cmd_weight(args) -> int:
    src = _load(args)
    if args.method == "fastpath":
        if src.expr is None:
            print("warning: dense input has no factored form; falling back to transform", file=sys.stderr)
        else:
            try:
                w, hit = fast_weight(src.expr, src.nvars)
            except NoFastPath:
                print("warning: no closed-form family matches; falling back to transform", file=sys.stderr)
            else:
                print(f"family: {hit.family.value}", file=sys.stderr)
                if hit.family in _PAIR_FAMILIES:
                    print(f"as-published formula gives {weight_of(hit, as_published=True)}", file=sys.stderr)
                print(w)
                return EXIT_OK
    if src.dense is not None and src.dense.role is Role.TRUTH_TABLE:
        print(int(src.dense.bits.sum()))
        return EXIT_OK
    p = src.anf_poly()
    if args.method == "naive":
        print(weight_naive(p))
    else:
        print(len(mu_full(p)[0]))
    return EXIT_OK


def cmd_verify(args) -> int:
    samples = None if args.samples == "all" else int(args.samples)
    result = bench.verify(args.n, samples, args.seed)
    print(json.dumps(result.to_dict(), sort_keys=True))
    if not result.ok:
        d = result.divergence
        print(f"divergence: {d.algorithm} on {d.input}: expected {d.expected}, got {d.got}", file=sys.stderr)
        return EXIT_DIVERGENCE
    return EXIT_OK


def _print_reports(reports, as_json: bool) -> None:
    if as_json:
        sys.stdout.write(bench.report_lines(reports))
        return
    for r in reports:
        agrees = r.get("agrees_with_oracle")
        flag = "" if agrees is None else ("  ok" if agrees else "  MISMATCH")
        line = f"{r['algorithm']:<20} n={r['n']:<3} {r['op_count']:>10} {r['op_unit']}{flag}"
        if "savings_percent" in r:
            line += f"  savings {r['savings_percent']} vs {r['baseline']}"
        print(line)


def cmd_bench(args) -> int:
    if args.corpus == "achterbahn":
        reports = bench.bench_achterbahn(timing=args.timing)
    elif args.expr is not None or args.source is not None:
        src = _load(args)
        p = src.anf_poly()
        order = _parse_order(args.order, src.indexing) if args.order is not None else None
        reports = bench.bench_poly(p, serialize(p, src.indexing), order=order, timing=args.timing)
    else:
        if args.n is None:
            raise UsageError("--corpus random needs --n or an explicit input")
        if args.order is not None:
            raise UsageError("--order needs an explicit input")
        reports = bench.bench_random(args.n, args.samples, args.seed, args.density, timing=args.timing)
    _print_reports(reports, args.json)
    return EXIT_OK


# --- argument parsing -----------------------------------------------------

def _add_input(p: argparse.ArgumentParser) -> None:
    p.add_argument("source", nargs="?", help="input file ('-' or omitted: stdin)")
    p.add_argument("-e", "--expr", help="input text given inline instead of a file")
    p.add_argument("--n", type=int, help="number of variables (default: header or highest variable)")
    p.add_argument("--indexing", type=int, choices=(0, 1), help="variable numbering (default 1; corpus headers win)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="boolmobius", description="Möbius transform and Hamming weight of Boolean functions.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("transform", help="convert between ANF and truth table")
    _add_input(t)
    t.add_argument("--corpus", choices=("achterbahn",))
    t.add_argument("--algo", choices=TRANSFORM_ALGOS, default="auto")
    t.add_argument("--out", choices=("poly", "anf", "tt"))
    t.add_argument("--order", help="forced variable order for --algo list, e.g. '2,1,3'")
    t.add_argument("--counts", action="store_true", help="print the operation count on stderr")
    t.set_defaults(func=cmd_transform)

    w = sub.add_parser("weight", help="Hamming weight")
    _add_input(w)
    w.add_argument("--corpus", choices=("achterbahn",))
    w.add_argument("--method", choices=("fastpath", "transform", "naive"), default="transform")
    w.set_defaults(func=cmd_weight)

    v = sub.add_parser("verify", help="differential test of every algorithm against the oracle")
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--samples", default="all", help="number of random functions, or 'all'")
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="operation-count reports")
    _add_input(b)
    b.add_argument("--corpus", choices=("achterbahn", "random"), default="random")
    b.add_argument("--samples", type=int, default=1)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--density", type=float, default=0.5)
    b.add_argument("--order", help="also run the list algorithm with this forced order")
    b.add_argument("--json", action="store_true", help="emit JSON lines")
    b.add_argument("--timing", action="store_true", help="record wall time (makes output nondeterministic)")
    b.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "verify" and args.samples != "all":
            if not args.samples.isdigit():
                parser.error(f"--samples must be a non-negative integer or 'all', got {args.samples!r}")
    except SystemExit as exc:  # argparse exits on --help and on usage errors
        return exc.code
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (UsageError, BoolMobiusError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
