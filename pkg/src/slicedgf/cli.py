"""Command-line front end.

Exit codes: 0 success, 1 usage, 2 input (unreadable or malformed files,
unwritable output), 3 computational failure (invariant violation, oracle
mismatch, failed self-test).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time

from . import bench, selftest
from .code import random_code, read_matrix, write_matrix
from .engine import BRUTE_FORCE_BUDGET, EngineOptions, brute_force_min_weight, minimum_weight
from .errors import BudgetExceededError, InputError, InvariantError
from .field import is_prime

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_COMPUTE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


# ---------------------------------------------------------------------------
# gen


def _out_paths(out: str, count: int) -> list[str]:
    if count == 1:
        return [out]
    if "{i}" in out:
        return [out.replace("{i}", str(i)) for i in range(count)]
    root, ext = os.path.splitext(out)
    return [f"{root}_{i}{ext}" for i in range(count)]


def cmd_gen(args) -> int:
    if args.p < 3 or not is_prime(args.p):
        raise UsageError("p must be prime ≥ 3")
    if not 1 <= args.k <= args.n:
        raise UsageError("need 1 ≤ k ≤ n")
    if args.count < 1:
        raise UsageError("count must be positive")
    for i, path in enumerate(_out_paths(args.out, args.count)):
        G = random_code(args.p, args.k, args.n, args.seed + i)
        try:
            write_matrix(G, path)
        except OSError as exc:
            _err(f"cannot write {path}: {exc.strerror or exc}")
            return EXIT_INPUT
    return EXIT_OK


# ---------------------------------------------------------------------------
# mindist


def _human_report(path, G, d, elapsed, state, opts, verified) -> str:
    lines = [
        f"input            {path}",
        f"code             [n={G.n}, k={G.k}] over F_{G.field.p}",
        f"distance         {d}",
        f"elapsed seconds  {elapsed:.4f}",
        f"codewords        {state.visited}",
        f"early stop       {'yes' if state.early_terminated else 'no'}",
        f"options          threads={opts.threads} word={opts.word_width} "
        f"isometric={opts.use_isometric} early_term={opts.early_termination} "
        f"generic={opts.force_generic_arith}",
    ]
    if verified is not None:
        lines.append(f"brute force      {verified}")
    lines.append("stages           g  L  U")
    lines.extend(f"                 {g}  {L}  {U}" for g, L, U in state.snapshots)
    return "\n".join(lines)


def cmd_mindist(args) -> int:
    try:
        G = read_matrix(args.input)
    except OSError as exc:
        _err(f"cannot read {args.input}: {exc.strerror or exc}")
        return EXIT_INPUT
    except InputError as exc:
        _err(f"{args.input}: {exc}")
        return EXIT_INPUT
    try:
        opts = EngineOptions(threads=args.threads, use_isometric=not args.no_isometric,
                             early_termination=not args.no_early_term, word_width=args.word,
                             force_generic_arith=args.force_generic, backend=args.backend)
    except InputError as exc:
        raise UsageError(str(exc)) from None

    start = time.perf_counter()
    try:
        d, state = minimum_weight(G, opts)
    except InputError as exc:
        _err(f"{args.input}: {exc}")
        return EXIT_INPUT
    except (InvariantError, RuntimeError) as exc:
        _err(f"internal error: {exc}")
        return EXIT_COMPUTE
    elapsed = time.perf_counter() - start

    verified = None
    if args.verify_brute_force:
        try:
            ref = brute_force_min_weight(G, BRUTE_FORCE_BUDGET, args.backend)
        except BudgetExceededError as exc:
            verified = f"skipped ({exc})"
        except InvariantError as exc:
            _err(f"internal error: {exc}")
            return EXIT_COMPUTE
        else:
            if ref != d:
                print(f"mindist {d}")
                _err(f"oracle mismatch: search gave {d}, brute force gave {ref}")
                return EXIT_COMPUTE
            verified = f"agrees ({ref})"

    print(f"mindist {d}")
    if args.json:
        report = {
            "p": G.field.p, "k": G.k, "n": G.n, "d": d,
            "elapsed_seconds": elapsed,
            "codewords_visited": state.visited,
            "stages": [{"g": g, "L": L, "U": U} for g, L, U in state.snapshots],
            "options": {
                "threads": opts.threads, "word": opts.word_width,
                "isometric": opts.use_isometric, "early_termination": opts.early_termination,
                "force_generic": opts.force_generic_arith,
                "verify_brute_force": bool(args.verify_brute_force),
            },
        }
        _err(json.dumps(report, indent=2))
    else:
        _err(_human_report(args.input, G, d, elapsed, state, opts, verified))
    return EXIT_OK


# ---------------------------------------------------------------------------
# bench-add


def cmd_bench_add(args) -> int:
    methods = bench.METHODS if args.method == "all" else (args.method,)
    if args.method == "all" and args.p != 3:
        methods = tuple(m for m in methods if m != "kat3")
    try:
        for m in methods:
            bench.check_method(args.p, m)
    except InputError as exc:
        raise UsageError(str(exc)) from None
    if min(args.len, args.vectors) < 1 or args.reps < 0:
        raise UsageError("--len and --vectors must be positive, --reps non-negative")
    print(bench.HEADER)
    for m in methods:
        bench.warm_up(args.p, m, args.backend)
        res = bench.run(args.p, m, args.len, args.vectors, args.reps, args.seed, args.backend)
        print(bench.format_row(res), flush=True)
    return EXIT_OK


# ---------------------------------------------------------------------------
# selftest


def cmd_selftest(args) -> int:
    return EXIT_OK if selftest.run(deep=args.deep) else EXIT_COMPUTE


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="slicedgf", description="Bit-sliced F_p arithmetic and minimum distance of linear codes.")
    ap.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="write seeded random generator matrices")
    g.add_argument("--p", type=int, required=True)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out", required=True,
                   help="output file; with --count, '{i}' is replaced by the index (else _i is appended)")
    g.add_argument("--count", type=int, default=1, help="number of files, seeds seed, seed+1, ...")
    g.set_defaults(func=cmd_gen)

    m = sub.add_parser("mindist", help="minimum distance of the code in a matrix file")
    m.add_argument("--in", dest="input", required=True)
    m.add_argument("--threads", type=int, default=1)
    m.add_argument("--word", type=int, choices=(32, 64), default=64)
    m.add_argument("--no-isometric", action="store_true")
    m.add_argument("--no-early-term", action="store_true")
    m.add_argument("--force-generic", action="store_true", help="use the loop adders even for F3/F7")
    m.add_argument("--verify-brute-force", action="store_true")
    m.add_argument("--json", action="store_true", help="JSON report on stderr instead of the text report")
    m.add_argument("--backend", choices=("numba", "numpy"), default=None)
    m.set_defaults(func=cmd_mindist)

    b = sub.add_parser("bench-add", help="time pairwise vector addition")
    b.add_argument("--p", type=int, required=True)
    b.add_argument("--method", choices=bench.METHODS + ("all",), required=True)
    b.add_argument("--len", type=int, default=bench.DEFAULT_LENGTH)
    b.add_argument("--vectors", type=int, default=bench.DEFAULT_VECTORS)
    b.add_argument("--reps", type=int, default=bench.DEFAULT_REPS)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--backend", choices=("numba", "numpy"), default=None)
    b.set_defaults(func=cmd_bench_add)

    s = sub.add_parser("selftest", help="exhaustive arithmetic checks")
    s.add_argument("--deep", action="store_true", help="add p = 11, 13, 31 and a 200-code oracle sweep")
    s.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        _err(f"slicedgf {args.command}: error: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
