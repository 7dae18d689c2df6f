"""Data-access traces of three radix-2 FFT traversal orders.

Convention: a butterfly on elements (a, b) is the four accesses
read a, read b, write a, write b.  Twiddle factors and the initial
bit-reversal permutation are not part of any trace.  A transpose moves
each element once: read its source, write its destination.
"""

from __future__ import annotations

import numpy as np

from .simulator import AccessTrace

STRATEGIES = ("bf", "df", "fourstep")


def _check_pow2(n: int) -> int:
    if n < 1 or n & (n - 1):
        raise ValueError(f"n must be a power of two, got {n}")
    return n.bit_length() - 1


def _butterflies(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Interleave (a, b, a, b) per butterfly into one access stream."""
    return np.stack([a, b, a, b], axis=1).reshape(-1)


def trace_breadth_first(n: int) -> AccessTrace:
    """Iterative radix-2: all butterflies of one span before the next span."""
    lg = _check_pow2(n)
    parts = []
    for s in range(lg):
        h = 1 << s
        j = np.arange(n // 2, dtype=np.int64)
        a = (j // h) * 2 * h + j % h
        parts.append(_butterflies(a, a + h))
    return AccessTrace(n, "bf", np.concatenate(parts) if parts else np.zeros(0, np.int64))


def trace_depth_first(n: int) -> AccessTrace:
    """Recursive radix-2: both halves finish before the combining butterflies."""
    _check_pow2(n)
    parts: list[np.ndarray] = []

    def rec(lo: int, size: int) -> None:
        if size == 1:
            return
        h = size // 2
        rec(lo, h)
        rec(lo + h, h)
        a = np.arange(lo, lo + h, dtype=np.int64)
        parts.append(_butterflies(a, a + h))

    rec(0, n)
    return AccessTrace(n, "df", np.concatenate(parts) if parts else np.zeros(0, np.int64))


def _transpose_trace(base: int, stride: int, rows: int, cols: int, out: list) -> None:
    """Recursive (cache-oblivious) rows x cols transpose within one index set."""
    src = []
    dst = []

    def rec(r0, r1, c0, c1):
        if (r1 - r0) * (c1 - c0) <= 4:
            for i in range(r0, r1):
                for j in range(c0, c1):
                    src.append(i * cols + j)
                    dst.append(j * rows + i)
            return
        if r1 - r0 >= c1 - c0:
            rm = (r0 + r1) // 2
            rec(r0, rm, c0, c1)
            rec(rm, r1, c0, c1)
        else:
            cm = (c0 + c1) // 2
            rec(r0, r1, c0, cm)
            rec(r0, r1, cm, c1)

    rec(0, rows, 0, cols)
    s = base + stride * np.array(src, dtype=np.int64)
    d = base + stride * np.array(dst, dtype=np.int64)
    out.append(np.stack([s, d], axis=1).reshape(-1))


def split_sqrt(n: int) -> tuple[int, int]:
    """n = n1 * n2 with n1 = 2^ceil(lg(n)/2)."""
    lg = _check_pow2(n)
    n1 = 1 << ((lg + 1) // 2)
    return n1, n // n1


def trace_four_step(n: int) -> AccessTrace:
    """Recursive radix-sqrt(n): column transforms, row transforms, transpose."""
    _check_pow2(n)
    parts: list[np.ndarray] = []

    def rec(base: int, stride: int, m: int) -> None:
        if m == 1:
            return
        if m == 2:
            parts.append(np.array([base, base + stride, base, base + stride], dtype=np.int64))
            return
        m1, m2 = split_sqrt(m)
        for j2 in range(m2):  # m2 transforms of size m1 down the columns
            rec(base + j2 * stride, stride * m2, m1)
        for j1 in range(m1):  # m1 transforms of size m2 along the rows
            rec(base + j1 * m2 * stride, stride, m2)
        _transpose_trace(base, stride, m1, m2, parts)

    rec(0, 1, n)
    return AccessTrace(n, "fourstep", np.concatenate(parts) if parts else np.zeros(0, np.int64))


def make_trace(strategy: str, n: int) -> AccessTrace:
    if strategy == "bf":
        return trace_breadth_first(n)
    if strategy == "df":
        return trace_depth_first(n)
    if strategy == "fourstep":
        return trace_four_step(n)
    raise ValueError(f"strategy must be one of {STRATEGIES}, got {strategy!r}")
