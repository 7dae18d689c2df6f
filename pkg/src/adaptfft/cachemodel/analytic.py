"""Exact evaluation of the cache-complexity recurrences.

Convention: every Theta(n) term is exactly n and the base case is
Q(n) = n for n <= Z (one compulsory miss per element).
"""

from __future__ import annotations

from functools import lru_cache


def _pow2(x: int, name: str) -> None:
    if x < 1 or x & (x - 1):
        raise ValueError(f"{name} must be a power of two, got {x}")


@lru_cache(maxsize=None)
def recurrence_Q2(n: int, Z: int) -> int:
    """Depth-first radix-2: Q(n) = 2 Q(n/2) + n."""
    _pow2(n, "n")
    _pow2(Z, "Z")
    if n <= Z:
        return n
    return 2 * recurrence_Q2(n // 2, Z) + n


@lru_cache(maxsize=None)
def recurrence_Qo(n: int, Z: int) -> int:
    """Radix-sqrt(n): Q(n) = n1 Q(n2) + n2 Q(n1) + n, i.e. 2 sqrt(n) Q(sqrt(n)) + n for squares."""
    _pow2(n, "n")
    _pow2(Z, "Z")
    if n <= Z:
        return n
    lg = n.bit_length() - 1
    n1 = 1 << ((lg + 1) // 2)
    n2 = n // n1
    return n1 * recurrence_Qo(n2, Z) + n2 * recurrence_Qo(n1, Z) + n


def ceil_log(n: int, base: int) -> int:
    """Smallest k >= 0 with base**k >= n (exact integer arithmetic)."""
    if base < 2 or n < 1:
        raise ValueError("need base >= 2 and n >= 1")
    k, p = 0, 1
    while p < n:
        p *= base
        k += 1
    return k


def closed_Qb(n: int, Z: int) -> int:
    """Optimal bound n * ceil(log_Z n), floored at n (every element misses once)."""
    if n < 1 or Z < 2:
        raise ValueError("need n >= 1 and Z >= 2")
    return n * max(1, ceil_log(n, Z))
