"""Ideal-cache simulator: exact miss counts under optimal or LRU replacement."""

from __future__ import annotations

import heapq
from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np

POLICIES = ("opt", "lru")


@dataclass(frozen=True)
class IdealCache:
    """Fully associative cache of ``Z`` elements in lines of ``L`` elements."""

    Z: int
    L: int = 1
    policy: str = "opt"

    def __post_init__(self):
        if self.L < 1 or self.Z < self.L:
            raise ValueError(f"need Z >= L >= 1, got Z={self.Z}, L={self.L}")
        if self.L > 1 and self.Z < self.L * self.L:
            raise ValueError(f"tall cache required: Z={self.Z} < L^2={self.L * self.L}")
        if self.policy not in POLICIES:
            raise ValueError(f"policy must be one of {POLICIES}, got {self.policy!r}")

    @property
    def lines(self) -> int:
        return self.Z // self.L


@dataclass(frozen=True)
class AccessTrace:
    """Element addresses touched by a traversal, in program order."""

    n: int
    strategy: str
    addresses: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.asarray(self.addresses, dtype=np.int64)
        if a.size and (a.min() < 0 or a.max() >= max(self.n, 1)):
            raise ValueError("trace addresses must lie in [0, n)")
        object.__setattr__(self, "addresses", a)

    def __len__(self) -> int:
        return int(self.addresses.size)

    @property
    def distinct(self) -> int:
        return int(np.unique(self.addresses).size)


def next_use(lines: np.ndarray) -> np.ndarray:
    """For each position, the position of the next access to the same line (len if none)."""
    T = lines.size
    order = np.argsort(lines, kind="stable")
    nxt = np.full(T, T, dtype=np.int64)
    same = lines[order[1:]] == lines[order[:-1]]
    nxt[order[:-1][same]] = order[1:][same]
    return nxt


def _simulate_opt(lines: np.ndarray, capacity: int) -> int:
    """Belady's rule: on a miss with a full cache, evict the line used farthest ahead."""
    nxt = next_use(lines).tolist()
    seq = lines.tolist()
    cur: dict[int, int] = {}  # resident line -> its next use
    heap: list[tuple[int, int]] = []  # (-next use, line); stale entries skipped lazily
    misses = 0
    for i, a in enumerate(seq):
        nu = nxt[i]
        if a not in cur:
            misses += 1
            if len(cur) >= capacity:
                while True:
                    negnu, b = heapq.heappop(heap)
                    if cur.get(b) == -negnu:
                        del cur[b]
                        break
        cur[a] = nu
        heapq.heappush(heap, (-nu, a))
        if len(heap) > 4 * capacity + 64:
            heap = [(-v, b) for b, v in cur.items()]
            heapq.heapify(heap)
    return misses


def _simulate_lru(lines: np.ndarray, capacity: int) -> int:
    cache: OrderedDict[int, None] = OrderedDict()
    misses = 0
    for a in lines.tolist():
        if a in cache:
            cache.move_to_end(a)
            continue
        misses += 1
        if len(cache) >= capacity:
            cache.popitem(last=False)
        cache[a] = None
    return misses


def simulate(trace, cache: IdealCache) -> int:
    """Exact number of misses of ``trace`` (an AccessTrace or address array)."""
    addrs = trace.addresses if isinstance(trace, AccessTrace) else np.asarray(trace, dtype=np.int64)
    lines = addrs // cache.L
    if cache.policy == "opt":
        return _simulate_opt(lines, cache.lines)
    return _simulate_lru(lines, cache.lines)
