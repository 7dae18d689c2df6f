"""Twiddle-factor providers with different accuracy/memory trade-offs.

All providers hand out forward roots ``w_n^k = exp(-2 pi i k / n)``; plans
conjugate them for the backward transform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .oracle import roots_of_unity

KINDS = ("full", "twotable", "rec-naive", "rec-improved")


@dataclass(frozen=True)
class TwiddleProvider:
    kind: str
    n: int
    tables: tuple = field(repr=False)
    radix: int = 0  # split radix of the two-table scheme

    def lookup(self, k):
        """``w_n^k`` for scalar or array ``k`` with ``0 <= k < n``."""
        k = np.asarray(k, dtype=np.int64)
        if k.size and (k.min() < 0 or k.max() >= self.n):
            raise IndexError(f"twiddle index out of range for n={self.n}")
        if self.kind == "twotable":
            fine, coarse = self.tables
            out = fine[k % self.radix] * coarse[k // self.radix]
        else:
            out = self.tables[0][k]
        return out[()] if out.ndim == 0 else out

    def values(self) -> np.ndarray:
        return self.lookup(np.arange(self.n))


def make_full_table(n: int) -> TwiddleProvider:
    """One accurately computed entry per k (exact rational angle reduction)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return TwiddleProvider("full", n, (roots_of_unity(n),))


def make_two_table(n: int) -> TwiddleProvider:
    """Two tables of about sqrt(n) entries; one complex multiply per lookup."""
    if n < 1:
        raise ValueError("n must be >= 1")
    r = math.isqrt(n - 1) + 1 if n > 1 else 1  # ceil(sqrt(n))
    w = roots_of_unity(n)
    fine = w[:r].copy()
    coarse = w[(np.arange((n + r - 1) // r) * r) % n].copy()
    return TwiddleProvider("twotable", n, (fine, coarse), radix=r)


def two_table_lookup(provider: TwiddleProvider, k: int) -> complex:
    if provider.kind != "twotable":
        raise ValueError("provider is not a two-table provider")
    if not 0 <= k < provider.n:
        raise IndexError(f"k={k} out of range for n={provider.n}")
    return complex(provider.lookup(k))


def recurrence_naive(n: int) -> np.ndarray:
    """Repeated multiplication by ``exp(-i theta)``; error grows like O(n)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    theta = 2 * math.pi / n
    step = complex(math.cos(theta), -math.sin(theta))
    out = [1 + 0j] * n
    w = 1 + 0j
    for k in range(1, n):
        w = w * step
        out[k] = w
    return np.array(out, dtype=np.complex128)


def recurrence_improved(n: int) -> np.ndarray:
    """``w += w * (exp(-i theta) - 1)`` with ``cos - 1 = -2 sin^2(theta/2)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    theta = 2 * math.pi / n
    sh = math.sin(theta / 2)
    delta = complex(-2.0 * sh * sh, -math.sin(theta))
    out = [1 + 0j] * n
    w = 1 + 0j
    for k in range(1, n):
        w = w + w * delta
        out[k] = w
    return np.array(out, dtype=np.complex128)


def make_provider(kind: str, n: int) -> TwiddleProvider:
    if kind == "full":
        return make_full_table(n)
    if kind == "twotable":
        return make_two_table(n)
    if kind == "rec-naive":
        return TwiddleProvider(kind, n, (recurrence_naive(n),))
    if kind == "rec-improved":
        return TwiddleProvider(kind, n, (recurrence_improved(n),))
    raise ValueError(f"unknown twiddle kind {kind!r}; expected one of {KINDS}")


def exact_roots(n: int) -> np.ndarray:
    """Roots of unity in extended precision (angles reduced from k/n)."""
    k = np.arange(n, dtype=np.int64)
    frac = (k % n).astype(np.longdouble) / np.longdouble(n)
    ang = frac * (8 * np.arctan(np.longdouble(1)))
    return np.cos(ang) - 1j * np.sin(ang).astype(np.clongdouble)


def max_error(approx, n: int | None = None) -> float:
    """Largest ``|approx(k) - w_n^k|`` over all k, measured in extended precision."""
    if isinstance(approx, TwiddleProvider):
        n = approx.n if n is None else n
        vals = approx.lookup(np.arange(n))
    else:
        vals = np.asarray(approx, dtype=np.complex128)
        n = vals.size if n is None else n
        vals = vals[:n]
    exact = exact_roots(n)
    return float(np.max(np.abs(vals.astype(np.clongdouble) - exact)))
