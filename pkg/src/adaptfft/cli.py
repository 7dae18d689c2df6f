"""``adaptfft`` command-line harness.

Sample files are raw little-endian float64 values, interleaved re, im.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from ._validation import check_positive_int, parse_sizes
from .bench import ACCURACY_FIELDS, BENCH_FIELDS, accuracy, bench, write_records
from .cachemodel import STRATEGIES, run, write_csv
from .cachemodel.simulator import POLICIES
from .codegen import ALGORITHMS, CodeletSpec, applicable, build_codelet, max_live, unparse
from .oracle import FORWARD
from .planner import Planner, PlannerConfig, WisdomError
from .plans.base import PlanError
from .problem import BACKWARD, DftProblem
from .selftest import self_test
from .twiddle import KINDS

SAMPLE_DTYPE = np.dtype("<f8")
EMIT_TARGETS = {"source": "neutral-source", "dag-json": "dag-json"}


class CliError(Exception):
    """User-facing failure; reported without a traceback."""


def read_samples(path) -> np.ndarray:
    raw = np.fromfile(path, dtype=SAMPLE_DTYPE)
    if raw.size % 2:
        raise CliError(f"{path}: odd number of float64 values; expected interleaved re,im pairs")
    return (raw[0::2] + 1j * raw[1::2]).astype(np.complex128)


def write_samples(path, z: np.ndarray) -> None:
    z = np.asarray(z, dtype=np.complex128).reshape(-1)
    out = np.empty(2 * z.size, dtype=SAMPLE_DTYPE)
    out[0::2] = z.real
    out[1::2] = z.imag
    out.tofile(path)


def cmd_transform(args) -> int:
    n = check_positive_int(args.n, "--n")
    x = read_samples(args.inp)
    if x.size == 0 or x.size % n:
        raise CliError(f"{args.inp}: {x.size} samples is not a positive multiple of n={n}")
    planner = Planner(PlannerConfig(mode=args.mode))
    if args.wisdom and os.path.exists(args.wisdom):
        with open(args.wisdom, encoding="utf-8") as fh:
            planner.import_wisdom(fh.read())
    batch = x.size // n
    y = np.empty_like(x)
    sign = BACKWARD if args.inverse else FORWARD
    plan = planner.execute(DftProblem(((n, 1, 1),), ((batch, n, n),), x, y, 0, 0, sign))
    write_samples(args.out, y)
    if args.wisdom:
        with open(args.wisdom, "w", encoding="utf-8") as fh:
            fh.write(planner.export_wisdom())
    print(f"n={n} batch={batch} sign={sign} plan={plan.sexpr()} timings={planner.stats.timings}")
    return 0


def cmd_bench(args) -> int:
    recs = bench(parse_sizes(args.sizes), mode=args.mode, baseline=args.baseline, repetitions=args.repetitions)
    if args.csv:
        write_records(args.csv, recs, BENCH_FIELDS)
    for r in recs:
        print(f"n={r.n} ours={r.seconds * 1e3:.3f}ms baseline={r.baseline_seconds * 1e3:.3f}ms ratio={r.ratio:.2f} plan={r.plan}")
    return 0


def cmd_accuracy(args) -> int:
    recs = accuracy(parse_sizes(args.sizes), twiddle=args.twiddle, trials=args.trials, seed=args.seed)
    if args.csv:
        write_records(args.csv, recs, ACCURACY_FIELDS)
    for r in recs:
        print(f"n={r.n} twiddle={r.twiddle} twiddle_max_error={r.twiddle_max_error:.3e} fft_rel_rms_error={r.fft_rel_rms_error:.3e}")
    return 0


def cmd_cachesim(args) -> int:
    try:
        rec = run(args.strategy, args.n, args.Z, args.L, args.policy)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    if args.csv:
        write_csv(args.csv, [rec])
    print(f"n={rec.n} strategy={rec.strategy} Z={rec.Z} L={rec.L} policy={rec.policy} misses={rec.misses} accesses={rec.accesses}")
    return 0


def cmd_codelet(args) -> int:
    n = check_positive_int(args.n, "--n")
    if not applicable(args.alg, n):
        raise CliError(f"algorithm {args.alg!r} does not apply to n={n}")
    c = build_codelet(CodeletSpec(args.kind, n, args.alg, args.sign))
    if args.emit == "stats":
        adds, mults = c.ops
        text = json.dumps(
            {"n": n, "alg": args.alg, "kind": args.kind, "adds": adds, "mults": mults, "total": adds + mults,
             "nodes": len(c.dag.nodes), "max_live": max_live(c.dag, c.sched.order)},
            sort_keys=True,
        ) + "\n"
    else:
        text = unparse(c.sched, EMIT_TARGETS[args.emit])
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_selftest(args) -> int:
    n = check_positive_int(args.n, "--n")
    planner = Planner()
    plan = planner.plan_1d(n)

    def transform(x):
        y = np.empty_like(x)
        plan.execute(x, 0, y, 0)
        return y

    report = self_test(transform, n, args.trials, rng=args.seed)
    print(f"{report.summary()} plan={plan.sexpr()}")
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="adaptfft", description="Self-optimizing FFT library and experiment harness.")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("transform", help="transform a binary sample file")
    t.add_argument("--n", type=int, required=True)
    t.add_argument("--inverse", action="store_true", help="unnormalized backward transform")
    t.add_argument("--mode", choices=("measure", "estimate"), default="estimate")
    t.add_argument("--wisdom", help="wisdom file read before and written after planning")
    t.add_argument("--in", dest="inp", required=True)
    t.add_argument("--out", required=True)
    t.set_defaults(func=cmd_transform)

    b = sub.add_parser("bench", help="time planned transforms against the textbook FFT")
    b.add_argument("--sizes", required=True, help="e.g. 1024,4096 or 2^10..2^16")
    b.add_argument("--baseline", choices=("textbook",), default="textbook")
    b.add_argument("--mode", choices=("measure", "estimate"), default="estimate")
    b.add_argument("--repetitions", type=int, default=9)
    b.add_argument("--csv")
    b.set_defaults(func=cmd_bench)

    a = sub.add_parser("accuracy", help="twiddle and transform error versus size")
    a.add_argument("--sizes", required=True)
    a.add_argument("--twiddle", choices=KINDS, default="full")
    a.add_argument("--trials", type=int, default=3)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--csv")
    a.set_defaults(func=cmd_accuracy)

    c = sub.add_parser("cachesim", help="ideal-cache misses of a traversal order")
    c.add_argument("--strategy", choices=STRATEGIES, required=True)
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--Z", type=int, required=True)
    c.add_argument("--L", type=int, default=1)
    c.add_argument("--policy", choices=POLICIES, default="opt")
    c.add_argument("--csv")
    c.set_defaults(func=cmd_cachesim)

    g = sub.add_parser("codelet", help="generate a codelet and print it")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--alg", choices=ALGORITHMS, default="ct")
    g.add_argument("--emit", choices=("source", "dag-json", "stats"), default="source")
    g.add_argument("--kind", choices=("notw", "twiddle", "twiddle_dif"), default="notw")
    g.add_argument("--sign", type=int, choices=(-1, 1), default=-1)
    g.add_argument("--out")
    g.set_defaults(func=cmd_codelet)

    s = sub.add_parser("selftest", help="randomized self-test of the planned transform")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--trials", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, WisdomError, PlanError, ValueError, OSError) as exc:
        print(f"adaptfft {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
