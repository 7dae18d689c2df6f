"""Shared machinery for plan nodes: strided views, execution context, costs."""

from __future__ import annotations

from math import prod
from typing import Iterable, Sequence

import numpy as np
from numpy.lib.stride_tricks import as_strided

from ..problem import IoDim, Signature, addresses, normalize_signature

ALPHA = 0.5  # cost per non-unit-stride access
BETA = 16.0  # per-node overhead, in real operations
ITEM = 16  # bytes per complex128 element


class PlanError(ValueError):
    """Plan not applicable to a problem, or a malformed plan description."""


class ExecContext:
    """Per-call execution state; optionally records a shadow access log.

    With ``log=True`` every leaf records which element addresses it reads
    and writes on each buffer, in program order.
    """

    def __init__(self, log: bool = False):
        self.events: list | None = [] if log else None

    @property
    def logging(self) -> bool:
        return self.events is not None

    def record(self, op: str, buf: np.ndarray, base: int, dims: Sequence[IoDim], which: str) -> None:
        if self.events is not None:
            self.events.append((op, id(buf), base + addresses(dims, which)))

    def first_access_violations(self, buf: np.ndarray) -> np.ndarray:
        """Addresses of ``buf`` whose first recorded access is a write.

        An in-place transform must consume every input element before it
        overwrites it; a write-first address means that element's input
        value would have been lost.
        """
        if self.events is None:
            raise RuntimeError("context was created without logging")
        seen: dict[int, str] = {}
        for op, bid, addrs in self.events:
            if bid != id(buf):
                continue
            for a in np.unique(addrs).tolist():
                seen.setdefault(a, op)
        return np.array(sorted(a for a, op in seen.items() if op == "w"), dtype=np.int64)


NULL_CTX = ExecContext()


def strided(buf: np.ndarray, base: int, dims: Sequence[IoDim], which: str, part: str | None = None) -> np.ndarray:
    """View of ``buf`` addressed by ``dims``; ``part`` selects 're'/'im' float views."""
    attr = 1 if which == "in" else 2
    shape = tuple(d[0] for d in dims)
    if part is None:
        return as_strided(buf[base:], shape=shape, strides=tuple(d[attr] * ITEM for d in dims))
    fl = buf.view(np.float64)
    off = 2 * base + (0 if part == "re" else 1)
    return as_strided(fl[off:], shape=shape, strides=tuple(d[attr] * ITEM for d in dims))


def gather(buf, base, dims, which="in") -> np.ndarray:
    """Contiguous complex copy of the addressed elements, shape (dims[0].n, rest)."""
    v = strided(buf, base, dims, which)
    return np.ascontiguousarray(v).reshape(dims[0][0] if dims else 1, -1)


def gather_split(buf, base, dims, which="in") -> tuple[np.ndarray, np.ndarray]:
    n = dims[0][0]
    re = np.ascontiguousarray(strided(buf, base, dims, which, "re")).reshape(n, -1)
    im = np.ascontiguousarray(strided(buf, base, dims, which, "im")).reshape(n, -1)
    return re, im


def scatter(buf, base, dims, values, which="out") -> None:
    v = strided(buf, base, dims, which)
    v[...] = np.reshape(values, v.shape)


def scatter_split(buf, base, dims, re, im, which="out") -> None:
    vr = strided(buf, base, dims, which, "re")
    vi = strided(buf, base, dims, which, "im")
    vr[...] = np.reshape(re, vr.shape)
    vi[...] = np.reshape(im, vi.shape)


def vec_size(dims: Iterable[IoDim]) -> int:
    return prod(d[0] for d in dims)


def nonunit_accesses(sig_or_dims, n_elems: int) -> float:
    """Element accesses along a non-unit first dim (input and output counted apart)."""
    dims = sig_or_dims
    if not dims:
        return 0.0
    d0 = dims[0]
    return float((abs(d0.istride) != 1) * n_elems + (abs(d0.ostride) != 1) * n_elems)


def loop_legal(sig: Signature, dim_index: int) -> bool:
    """Can vector dim ``dim_index`` be run as a sequential loop?

    Out of place, always.  In place, each iteration must read and write the
    same set of addresses, so no iteration clobbers another's input.
    """
    if not sig.inplace:
        return True
    d = sig.V[dim_index]
    if d.istride != d.ostride:
        return False
    rest = sig.N + sig.V[:dim_index] + sig.V[dim_index + 1 :]
    if all(x.istride == x.ostride for x in rest):
        return True
    return bool(np.array_equal(np.sort(addresses(rest, "in")), np.sort(addresses(rest, "out"))))


def child_sig(N, V, inplace: bool, sign: int) -> Signature:
    return normalize_signature(Signature(tuple(IoDim(*d) for d in N), tuple(IoDim(*d) for d in V), inplace, sign))
