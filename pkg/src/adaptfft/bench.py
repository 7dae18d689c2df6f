"""Benchmarks against a textbook radix-2 FFT, and accuracy experiments."""

from __future__ import annotations

import csv
import math
import time
from dataclasses import asdict, dataclass, fields

import numpy as np

from .oracle import FORWARD, reference_dft, rel_l2_error, tolerance
from .planner import Planner, PlannerConfig
from .twiddle import KINDS, make_provider, max_error


def bit_reverse(i: int, bits: int) -> int:
    out = 0
    for _ in range(bits):
        out = (out << 1) | (i & 1)
        i >>= 1
    return out


def bit_reversal_permutation(n: int) -> np.ndarray:
    lg = n.bit_length() - 1
    idx = np.arange(n, dtype=np.int64)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(lg):
        rev |= ((idx >> b) & 1) << (lg - 1 - b)
    return rev


def textbook_fft(x, sign: int = FORWARD) -> np.ndarray:
    """Iterative breadth-first radix-2 FFT with a separate bit-reversal pass.

    Each pass runs every butterfly of one span; numpy vectorizes the
    butterflies within a pass, nothing more.
    """
    x = np.asarray(x, dtype=np.complex128).reshape(-1)
    n = x.size
    if n < 1 or n & (n - 1):
        raise ValueError(f"textbook_fft needs a power-of-two length, got {n}")
    a = x[bit_reversal_permutation(n)]
    h = 1
    while h < n:
        w = np.exp(sign * 2j * np.pi * np.arange(h) / (2 * h))
        blocks = a.reshape(-1, 2 * h)
        t = blocks[:, h:] * w
        u = blocks[:, :h].copy()
        blocks[:, :h] = u + t
        blocks[:, h:] = u - t
        h *= 2
    return a


@dataclass(frozen=True)
class BenchRecord:
    n: int
    mode: str
    plan: str
    seconds: float  # median per transform
    speed: float  # transforms per second
    baseline_seconds: float
    ratio: float  # baseline_seconds / seconds, i.e. our speed over the baseline's


BENCH_FIELDS = tuple(f.name for f in fields(BenchRecord))


def _median_time(fn, repetitions: int, min_time: float) -> float:
    samples = []
    for _ in range(repetitions):
        calls, t0 = 0, time.perf_counter()
        while True:
            fn()
            calls += 1
            el = time.perf_counter() - t0
            if el >= min_time:
                break
        samples.append(el / calls)
    return float(np.median(samples))


def compare_times(fa, fb, repetitions: int = 9, min_time: float = 0.02) -> tuple[float, float]:
    """Interleaved median timings of two callables (after one warm-up call each)."""
    fa()
    fb()
    ta, tb = [], []
    for _ in range(repetitions):
        ta.append(_median_time(fa, 1, min_time))
        tb.append(_median_time(fb, 1, min_time))
    return float(np.median(ta)), float(np.median(tb))


def bench(
    sizes,
    mode: str = "estimate",
    baseline: str = "textbook",
    planner: Planner | None = None,
    repetitions: int = 9,
    min_time: float = 0.02,
    seed: int = 0,
) -> list[BenchRecord]:
    """Time planned transforms against the baseline; both are checked first."""
    if baseline != "textbook":
        raise ValueError(f"unknown baseline {baseline!r}")
    planner = planner or Planner(PlannerConfig(mode=mode, seed=seed))
    rng = np.random.default_rng(seed)
    out = []
    for n in sizes:
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        y = np.empty_like(x)
        plan = planner.plan_1d(n)
        ref = reference_dft(x)
        plan.execute(x, 0, y, 0)
        if rel_l2_error(y, ref) > tolerance(n):
            raise AssertionError(f"planned transform of size {n} disagrees with the oracle")
        if rel_l2_error(textbook_fft(x), ref) > tolerance(n):
            raise AssertionError(f"textbook transform of size {n} disagrees with the oracle")
        ours, base = compare_times(lambda: plan.execute(x, 0, y, 0), lambda: textbook_fft(x), repetitions, min_time)
        out.append(BenchRecord(n, planner.config.mode, plan.sexpr(), ours, 1.0 / ours, base, base / ours))
    return out


@dataclass(frozen=True)
class AccuracyRecord:
    n: int
    twiddle: str
    twiddle_max_error: float  # max_k |w(k) - exact|
    fft_rel_rms_error: float  # ||y - exact|| / ||exact||, RMS over trials
    trials: int


ACCURACY_FIELDS = tuple(f.name for f in fields(AccuracyRecord))


def twiddle_error(kind: str, n: int) -> float:
    return max_error(make_provider(kind, n))


def fft_error(n: int, twiddle: str = "full", trials: int = 3, seed: int = 0, planner: Planner | None = None) -> float:
    """Relative RMS error of the planned forward transform on uniform random input."""
    planner = planner or Planner(PlannerConfig(twiddle=twiddle))
    plan = planner.plan_1d(n)
    rng = np.random.default_rng(seed)
    errs = []
    for _ in range(trials):
        x = rng.uniform(-0.5, 0.5, n) + 1j * rng.uniform(-0.5, 0.5, n)
        y = np.empty_like(x)
        plan.execute(x, 0, y, 0)
        errs.append(rel_l2_error(y, reference_dft(x)))
    return math.sqrt(sum(e * e for e in errs) / len(errs))


def accuracy(sizes, twiddle: str = "full", trials: int = 3, seed: int = 0) -> list[AccuracyRecord]:
    if twiddle not in KINDS:
        raise ValueError(f"twiddle must be one of {KINDS}")
    planner = Planner(PlannerConfig(twiddle=twiddle, seed=seed))
    return [
        AccuracyRecord(n, twiddle, twiddle_error(twiddle, n), fft_error(n, twiddle, trials, seed, planner), trials)
        for n in sizes
    ]


def write_records(path, records, field_names) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=field_names, lineterminator="\n")
        w.writeheader()
        for r in records:
            w.writerow(asdict(r))
