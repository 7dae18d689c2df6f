"""Executable plan nodes.

Every node is built for one signature (sizes, strides, in-place flag, sign)
and executes as ``node.execute(I, ib, O, ob, ctx)`` on flat complex128
buffers with base offsets.  Nodes never change after construction; the only
mutable state is a private cache of derived constant tables.
"""

from __future__ import annotations

from functools import lru_cache
from math import prod

import numpy as np

from ..codegen.codelet import get_codelet
from ..codegen.create import is_prime, primitive_root
from ..oracle import reference_dft, roots_of_unity
from ..problem import IoDim, Signature, addresses, output_strides, tensor_size
from ..twiddle import make_provider
from .base import (
    ALPHA,
    BETA,
    NULL_CTX,
    ExecContext,
    PlanError,
    child_sig,
    gather,
    gather_split,
    loop_legal,
    scatter,
    scatter_split,
    strided,
    vec_size,
)

CODELET_SIZES = (2, 3, 4, 5, 7, 8, 11, 13, 16, 32, 64)
TWIDDLE_KINDS = ("full", "twotable", "rec-naive", "rec-improved")

# below this many columns, codelets run on Python floats one transform at a time
SMALL_BATCH = 12
# column chunk for vectorized codelet runs (keeps the live rows cache-resident)
CHUNK_ELEMS = 1 << 17


def _dims(*groups) -> tuple:
    out = []
    for g in groups:
        out.extend(IoDim(*d) for d in g)
    return tuple(out)


def _in_form(dims) -> tuple:
    return tuple(IoDim(d.n, d.istride, d.istride) for d in dims)


@lru_cache(maxsize=256)
def _provider(kind: str, n: int):
    return make_provider(kind, n)


def twiddle_table(kind: str, n: int, rows: int, cols: int, sign: int) -> np.ndarray:
    """``w_n^(sign * i * j)`` for i < rows, j < cols."""
    e = (np.arange(rows)[:, None] * np.arange(cols)[None, :]) % n
    w = _provider(kind, n).lookup(e)
    return np.conj(w) if sign == 1 else w


def run_codelet(codelet, xr, xi, wr=None, wi=None):
    """Apply a compiled codelet to (n, B) row arrays; returns (yr, yi)."""
    n, B = xr.shape
    fn = codelet.fn
    if B < SMALL_BATCH:
        cols_r, cols_i = xr.T.tolist(), xi.T.tolist()
        tw_r = wr.T.tolist() if wr is not None else [None] * B
        tw_i = wi.T.tolist() if wi is not None else [None] * B
        outr = np.empty((B, n))
        outi = np.empty((B, n))
        for j in range(B):
            yr = [0.0] * n
            yi = [0.0] * n
            fn(cols_r[j], cols_i[j], tw_r[j], tw_i[j], yr, yi)
            outr[j] = yr
            outi[j] = yi
        return outr.T, outi.T
    yr = np.empty_like(xr)
    yi = np.empty_like(xi)
    chunk = max(256, CHUNK_ELEMS // n)
    if B <= chunk:
        fn(xr, xi, wr, wi, yr, yi)
        return yr, yi
    for j0 in range(0, B, chunk):
        s = slice(j0, j0 + chunk)
        fn(
            xr[:, s],
            xi[:, s],
            None if wr is None else wr[:, s],
            None if wi is None else wi[:, s],
            yr[:, s],
            yi[:, s],
        )
    return yr, yi


class Plan:
    """Base class; subclasses set ``kind`` and implement ``_run``."""

    kind = "?"

    def __init__(self, sig: Signature, children=()):
        object.__setattr__(self, "sig", sig)
        object.__setattr__(self, "children", tuple(children))
        object.__setattr__(self, "_cache", {})

    def __setattr__(self, name, value):
        raise AttributeError("plans are immutable")

    # -- interface -------------------------------------------------------
    def execute(self, I, ib, O, ob, ctx: ExecContext = NULL_CTX) -> None:
        self._run(I, ib, O, ob, ctx)

    def _run(self, I, ib, O, ob, ctx):  # pragma: no cover - abstract
        raise NotImplementedError

    def params(self) -> list:
        return []

    def sexpr(self) -> str:
        parts = [self.kind] + [str(p) for p in self.params()] + [c.sexpr() for c in self.children]
        return "(" + " ".join(parts) + ")"

    def local_cost(self) -> float:
        return BETA

    def cost(self) -> float:
        return self.local_cost() + sum(c.cost() for c in self.children)

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.sexpr()} for {self.sig}>"

    # helpers
    def _cached(self, key, fn):
        c = self._cache
        if key not in c:
            c[key] = fn()
        return c[key]

    @property
    def batch(self) -> int:
        return vec_size(self.sig.V)


def _strided_fraction(d: IoDim) -> float:
    return (abs(d.istride) != 1) + (abs(d.ostride) != 1)


# ---------------------------------------------------------------- rank 0


class Copy(Plan):
    """Rank-0 data motion; in place with differing strides goes through a temporary."""

    kind = "copy"

    def __init__(self, sig: Signature):
        if sig.N:
            raise PlanError("copy needs a rank-0 problem")
        super().__init__(sig)

    def _run(self, I, ib, O, ob, ctx):
        V = self.sig.V
        if self.sig.inplace and self.sig.all_strides_equal:
            return
        src = strided(I, ib, V, "in")
        ctx.record("r", I, ib, V, "in")
        if self.sig.inplace:
            src = src.copy()
        ctx.record("w", O, ob, V, "out")
        strided(O, ob, V, "out")[...] = src

    def local_cost(self) -> float:
        n = tensor_size(self.sig.V)
        if self.sig.inplace and self.sig.all_strides_equal:
            return BETA
        extra = n if self.sig.inplace else 0
        last = self.sig.V[-1] if self.sig.V else IoDim(1, 1, 1)
        return n + extra + ALPHA * n * _strided_fraction(last) + BETA


def square_pair(sig: Signature):
    """Indices (i, j) of V dims forming an in-place square transpose, if any."""
    if sig.N or not sig.inplace:
        return None
    V = sig.V
    odd = [k for k, d in enumerate(V) if d.istride != d.ostride]
    if len(odd) != 2:
        return None
    a, b = V[odd[0]], V[odd[1]]
    if a.n == b.n and a.istride == b.ostride and a.ostride == b.istride:
        return tuple(odd)
    return None


def _transpose_rec(A, lo, hi, tile):
    size = hi - lo
    if size <= tile:
        blk = A[..., lo:hi, lo:hi]
        blk[...] = np.swapaxes(blk, -1, -2).copy()
        return
    mid = lo + size // 2
    _transpose_rec(A, lo, mid, tile)
    _transpose_rec(A, mid, hi, tile)
    _swap_rec(A, lo, mid, mid, hi, tile)


def _swap_rec(A, r0, r1, c0, c1, tile):
    """Exchange block [r0:r1, c0:c1] with the transpose of [c0:c1, r0:r1]."""
    if r1 - r0 <= tile and c1 - c0 <= tile:
        B = A[..., r0:r1, c0:c1]
        C = A[..., c0:c1, r0:r1]
        tmp = B.copy()
        B[...] = np.swapaxes(C, -1, -2)
        C[...] = np.swapaxes(tmp, -1, -2)
        return
    if r1 - r0 >= c1 - c0:
        rm = (r0 + r1) // 2
        _swap_rec(A, r0, rm, c0, c1, tile)
        _swap_rec(A, rm, r1, c0, c1, tile)
    else:
        cm = (c0 + c1) // 2
        _swap_rec(A, r0, r1, c0, cm, tile)
        _swap_rec(A, r0, r1, cm, c1, tile)


class TransposeSquare(Plan):
    """In-place square transpose by recursive quadrant splitting (8x8 tiles).

    Extra vector dims with equal strides are carried along as a batch.
    """

    kind = "transposq"
    TILE = 8

    def __init__(self, sig: Signature):
        pair = square_pair(sig)
        if pair is None:
            raise PlanError("transposq needs an in-place pair {(n,a,b),(n,b,a)}")
        super().__init__(sig)
        self._cache["pair"] = pair

    @property
    def n(self) -> int:
        return self.sig.V[self._cache["pair"][0]].n

    def params(self):
        return [self.n]

    def _run(self, I, ib, O, ob, ctx):
        i, j = self._cache["pair"]
        V = self.sig.V
        rest = [d for k, d in enumerate(V) if k not in (i, j)]
        dims = rest + [V[i], V[j]]
        ctx.record("r", I, ib, dims, "in")
        ctx.record("w", O, ob, dims, "out")
        A = strided(O, ob, dims, "in")
        _transpose_rec(A, 0, self.n, self.TILE)

    def local_cost(self) -> float:
        return 2 * tensor_size(self.sig.V) + BETA


# ---------------------------------------------------------------- leaves


class Direct(Plan):
    """Generated codelet applied to every vector iteration at once."""

    kind = "direct"

    def __init__(self, sig: Signature):
        if len(sig.N) != 1 or sig.N[0].n not in CODELET_SIZES:
            raise PlanError(f"direct needs a rank-1 size in {CODELET_SIZES}")
        super().__init__(sig)

    @property
    def n(self) -> int:
        return self.sig.N[0].n

    @property
    def codelet(self):
        return get_codelet(self.n, "notw", self.sig.sign)

    def params(self):
        return [self.n]

    def _run(self, I, ib, O, ob, ctx):
        dims = self.sig.N + self.sig.V
        xr, xi = gather_split(I, ib, dims, "in")
        ctx.record("r", I, ib, dims, "in")
        yr, yi = run_codelet(self.codelet, xr, xi)
        ctx.record("w", O, ob, dims, "out")
        scatter_split(O, ob, dims, yr, yi, "out")

    def local_cost(self) -> float:
        B = self.batch
        n = self.n
        return sum(self.codelet.ops) * B + ALPHA * n * B * _strided_fraction(self.sig.N[0]) + BETA


class TwiddleCodelet(Plan):
    """Codelet with fused twiddle multiplication.

    ``post=False`` multiplies input ``l`` by ``w_ntw^(l*j)`` before the
    transform (decimation in time); ``post=True`` multiplies output ``k``
    by ``w_ntw^(k*j)`` afterwards (decimation in frequency).  ``j`` is the
    index along vector dim ``tdim``.
    """

    kind = "directtw"

    def __init__(self, sig: Signature, ntw: int, tdim: int, post: bool, twiddle: str = "full"):
        if len(sig.N) != 1 or sig.N[0].n not in CODELET_SIZES:
            raise PlanError(f"directtw needs a size in {CODELET_SIZES}")
        if not 0 <= tdim < len(sig.V):
            raise PlanError("twiddle dim out of range")
        super().__init__(sig)
        c = self._cache
        c["ntw"], c["tdim"], c["post"], c["twiddle"] = ntw, tdim, post, twiddle

    @property
    def n(self) -> int:
        return self.sig.N[0].n

    @property
    def codelet(self):
        return get_codelet(self.n, "twiddle_dif" if self._cache["post"] else "twiddle", self.sig.sign)

    def params(self):
        return [self.n]

    def _tables(self):
        def build():
            c = self._cache
            V = self.sig.V
            r = self.n
            m = V[c["tdim"]].n
            W = twiddle_table(c["twiddle"], c["ntw"], r, m, self.sig.sign)
            shape = [r] + [1] * len(V)
            shape[1 + c["tdim"]] = m
            full = np.broadcast_to(W.reshape(shape), (r,) + tuple(d.n for d in V)).reshape(r, -1)
            return np.ascontiguousarray(full.real), np.ascontiguousarray(full.imag)

        return self._cached("tables", build)

    def _run(self, I, ib, O, ob, ctx):
        dims = self.sig.N + self.sig.V
        xr, xi = gather_split(I, ib, dims, "in")
        ctx.record("r", I, ib, dims, "in")
        wr, wi = self._tables()
        yr, yi = run_codelet(self.codelet, xr, xi, wr, wi)
        ctx.record("w", O, ob, dims, "out")
        scatter_split(O, ob, dims, yr, yi, "out")

    def local_cost(self) -> float:
        B = self.batch
        return sum(self.codelet.ops) * B + ALPHA * self.n * B * _strided_fraction(self.sig.N[0]) + BETA


@lru_cache(maxsize=64)
def _dft_matrix(n: int, sign: int) -> np.ndarray:
    w = roots_of_unity(n, sign)
    return w[np.outer(np.arange(n), np.arange(n)) % n]


class Generic(Plan):
    """Direct O(n^2) summation for any rank-1 size and stride."""

    kind = "generic"

    def __init__(self, sig: Signature):
        if len(sig.N) != 1:
            raise PlanError("generic needs a rank-1 problem")
        super().__init__(sig)

    @property
    def n(self) -> int:
        return self.sig.N[0].n

    def params(self):
        return [self.n]

    def _run(self, I, ib, O, ob, ctx):
        dims = self.sig.N + self.sig.V
        X = gather(I, ib, dims, "in")
        ctx.record("r", I, ib, dims, "in")
        Y = _dft_matrix(self.n, self.sig.sign) @ X
        ctx.record("w", O, ob, dims, "out")
        scatter(O, ob, dims, Y, "out")

    def local_cost(self) -> float:
        n = self.n
        return 8.0 * n * n * self.batch + ALPHA * n * self.batch * _strided_fraction(self.sig.N[0]) + BETA


def _conv_child_sig(length: int, batch: int) -> Signature:
    """In-place forward transforms of ``batch`` contiguous rows of ``length``."""
    return child_sig(((length, 1, 1),), ((batch, length, length),), True, -1)


def _run_rows_forward(child: Plan, S: np.ndarray, ctx) -> None:
    child.execute(S.reshape(-1), 0, S.reshape(-1), 0, ctx)


@lru_cache(maxsize=64)
def _rader_tables(p: int, sign: int):
    g = primitive_root(p)
    ginv = pow(g, p - 2, p)
    perm = np.array([pow(g, q, p) for q in range(p - 1)], dtype=np.int64)
    outperm = np.array([pow(ginv, q, p) for q in range(p - 1)], dtype=np.int64)
    b = roots_of_unity(p, sign)[outperm]
    kernel = reference_dft(b, -1) / (p - 1)
    return g, perm, outperm, kernel


class Rader(Plan):
    """Prime size p via a cyclic convolution of length p-1."""

    kind = "rader"

    def __init__(self, sig: Signature, child: Plan):
        if len(sig.N) != 1 or not (sig.N[0].n >= 3 and is_prime(sig.N[0].n)):
            raise PlanError("rader needs a rank-1 prime size >= 3")
        p = sig.N[0].n
        if child.sig != self.child_signature(sig):
            raise PlanError("rader child has the wrong signature")
        super().__init__(sig, (child,))

    @staticmethod
    def child_signature(sig: Signature) -> Signature:
        return _conv_child_sig(sig.N[0].n - 1, vec_size(sig.V))

    @property
    def p(self) -> int:
        return self.sig.N[0].n

    @property
    def generator(self) -> int:
        return _rader_tables(self.p, self.sig.sign)[0]

    def params(self):
        return [self.p]

    def _run(self, I, ib, O, ob, ctx):
        p = self.p
        _, perm, outperm, kernel = _rader_tables(p, self.sig.sign)
        dims = self.sig.N + self.sig.V
        X = gather(I, ib, dims, "in")  # (p, B)
        ctx.record("r", I, ib, dims, "in")
        S = np.ascontiguousarray(X[perm].T)  # (B, p-1)
        child = self.children[0]
        _run_rows_forward(child, S, ctx)
        S *= kernel
        np.conjugate(S, out=S)
        _run_rows_forward(child, S, ctx)
        np.conjugate(S, out=S)
        Y = np.empty_like(X)
        Y[0] = X.sum(axis=0)
        Y[outperm] = X[0] + S.T
        ctx.record("w", O, ob, dims, "out")
        scatter(O, ob, dims, Y, "out")

    def local_cost(self) -> float:
        p, B = self.p, self.batch
        return 12.0 * p * B + ALPHA * p * B * _strided_fraction(self.sig.N[0]) + BETA

    def cost(self) -> float:
        return self.local_cost() + 2 * self.children[0].cost()


def bluestein_length(n: int) -> int:
    m = 1
    while m < 2 * n - 1:
        m *= 2
    return m


@lru_cache(maxsize=64)
def _bluestein_tables(n: int, m: int, sign: int):
    j = np.arange(n, dtype=np.int64)
    chirp = roots_of_unity(2 * n, -sign)[(j * j) % (2 * n)]  # exp(-sign*pi*i*j^2/n)
    h = np.zeros(m, dtype=np.complex128)
    h[:n] = chirp
    if n > 1:
        h[m - n + 1 :] = chirp[1:][::-1]
    kernel = reference_dft(h, -1) / m
    return np.conj(chirp), kernel


class Bluestein(Plan):
    """Any size n via chirp-z: a cyclic convolution of power-of-two length m."""

    kind = "bluestein"

    def __init__(self, sig: Signature, m: int, child: Plan):
        if len(sig.N) != 1:
            raise PlanError("bluestein needs a rank-1 problem")
        n = sig.N[0].n
        if m < 2 * n - 1 or m & (m - 1):
            raise PlanError(f"bluestein padding {m} must be a power of two >= 2n-1")
        if child.sig != self.child_signature(sig, m):
            raise PlanError("bluestein child has the wrong signature")
        super().__init__(sig, (child,))
        self._cache["m"] = m

    @staticmethod
    def child_signature(sig: Signature, m: int) -> Signature:
        return _conv_child_sig(m, vec_size(sig.V))

    @property
    def n(self) -> int:
        return self.sig.N[0].n

    @property
    def m(self) -> int:
        return self._cache["m"]

    def params(self):
        return [self.n, self.m]

    def _run(self, I, ib, O, ob, ctx):
        n, m = self.n, self.m
        cconj, kernel = _bluestein_tables(n, m, self.sig.sign)
        dims = self.sig.N + self.sig.V
        X = gather(I, ib, dims, "in")  # (n, B)
        ctx.record("r", I, ib, dims, "in")
        S = np.zeros((X.shape[1], m), dtype=np.complex128)
        S[:, :n] = (X * cconj[:, None]).T
        child = self.children[0]
        _run_rows_forward(child, S, ctx)
        S *= kernel
        np.conjugate(S, out=S)
        _run_rows_forward(child, S, ctx)
        np.conjugate(S, out=S)
        Y = S[:, :n].T * cconj[:, None]
        ctx.record("w", O, ob, dims, "out")
        scatter(O, ob, dims, Y, "out")

    def local_cost(self) -> float:
        B = self.batch
        return 20.0 * self.m * B + ALPHA * self.n * B * _strided_fraction(self.sig.N[0]) + BETA

    def cost(self) -> float:
        return self.local_cost() + 2 * self.children[0].cost()


# ---------------------------------------------------------------- composite


def _rank1(sig: Signature, what: str) -> IoDim:
    if len(sig.N) != 1:
        raise PlanError(f"{what} needs a rank-1 problem")
    return sig.N[0]


def _twiddle_multiply(buf, base, dims, W, ctx):
    """In-place ``buf[dims] *= W`` with W broadcast over trailing dims."""
    ctx.record("r", buf, base, dims, "out")
    ctx.record("w", buf, base, dims, "out")
    v = strided(buf, base, dims, "out")
    v *= W.reshape(W.shape + (1,) * (len(dims) - W.ndim))


class DIT(Plan):
    """Cooley-Tukey, decimation in time, radix r: n = r*m.

    child 1: dft({(m, r*is, os)}, V + {(r, is, m*os)}) from I to O
    child 2: dft({(r, m*os, m*os)}, V_o + {(m, os, os)}) in place on O with
             twiddles w_n^(l2*k1), fused into a twiddle codelet when r is a
             codelet size, else multiplied explicitly before child 2 runs.
    """

    kind = "dit"

    def __init__(self, sig: Signature, r: int, child1: Plan, child2: Plan | None = None, twiddle: str = "full"):
        d = _rank1(sig, "dit")
        n = d.n
        if r < 2 or r >= n or n % r:
            raise PlanError(f"radix {r} does not split n={n}")
        s1, s2 = self.child_signatures(sig, r)
        if child1.sig != s1:
            raise PlanError("dit child 1 has the wrong signature")
        fused = child2 is None
        if fused:
            child2 = TwiddleCodelet(self.twiddle_step(sig, r), n, len(sig.V), post=False, twiddle=twiddle)
        elif child2.sig != s2:
            raise PlanError("dit child 2 has the wrong signature")
        super().__init__(sig, (child1, child2))
        self._cache.update(r=r, fused=fused, twiddle=twiddle)

    @staticmethod
    def twiddle_step(sig: Signature, r: int) -> Signature:
        d = sig.N[0]
        m = d.n // r
        return Signature(((r, m * d.ostride, m * d.ostride),), _dims(output_strides(sig.V), [(m, d.ostride, d.ostride)]), True, sig.sign)

    @staticmethod
    def child_signatures(sig: Signature, r: int):
        d = sig.N[0]
        m = d.n // r
        s1 = child_sig(((m, r * d.istride, d.ostride),), _dims(sig.V, [(r, d.istride, m * d.ostride)]), sig.inplace, sig.sign)
        step = DIT.twiddle_step(sig, r)
        s2 = child_sig(step.N, step.V, True, sig.sign)
        return s1, s2

    @property
    def r(self) -> int:
        return self._cache["r"]

    def params(self):
        return [self.r]

    def _run(self, I, ib, O, ob, ctx):
        c1, c2 = self.children
        c1.execute(I, ib, O, ob, ctx)
        if not self._cache["fused"]:
            d = self.sig.N[0]
            r, m = self.r, d.n // self.r
            W = self._cached("W", lambda: twiddle_table(self._cache["twiddle"], d.n, r, m, self.sig.sign))
            dims = _dims([(r, m * d.ostride, m * d.ostride), (m, d.ostride, d.ostride)], output_strides(self.sig.V))
            _twiddle_multiply(O, ob, dims, W, ctx)
        c2.execute(O, ob, O, ob, ctx)

    def local_cost(self) -> float:
        if self._cache["fused"]:
            return BETA
        return BETA + 6.0 * self.sig.N[0].n * self.batch


class DIF(Plan):
    """Cooley-Tukey, decimation in frequency, radix r: n = r*m.

    Out of place: A = dft({(r, m*is, m*os)}, V + {(m, is, os)}) from I to O
    with twiddles applied to its outputs, then B = dft({(m, os, r*os)},
    V_o + {(r, m*os, os)}) in place on O.  In place, A runs on the input
    layout and B moves the data into the output layout.
    """

    kind = "dif"

    def __init__(self, sig: Signature, r: int, childA: Plan | None, childB: Plan, twiddle: str = "full"):
        d = _rank1(sig, "dif")
        n = d.n
        if r < 2 or r >= n or n % r:
            raise PlanError(f"radix {r} does not split n={n}")
        step, sA, sB = self.child_signatures(sig, r)
        fused = childA is None
        if fused:
            childA = TwiddleCodelet(step, n, len(step.V) - 1, post=True, twiddle=twiddle)
        elif childA.sig != sA:
            raise PlanError("dif child A has the wrong signature")
        if childB.sig != sB:
            raise PlanError("dif child B has the wrong signature")
        super().__init__(sig, (childA, childB))
        self._cache.update(r=r, fused=fused, twiddle=twiddle)

    @staticmethod
    def child_signatures(sig: Signature, r: int):
        d = sig.N[0]
        m = d.n // r
        ist, ost = d.istride, d.ostride
        if sig.inplace:
            step = Signature(((r, m * ist, m * ist),), _dims(_in_form(sig.V), [(m, ist, ist)]), True, sig.sign)
            sB = child_sig(((m, ist, r * ost),), _dims(sig.V, [(r, m * ist, ost)]), True, sig.sign)
        else:
            step = Signature(((r, m * ist, m * ost),), _dims(sig.V, [(m, ist, ost)]), False, sig.sign)
            sB = child_sig(((m, ost, r * ost),), _dims(output_strides(sig.V), [(r, m * ost, ost)]), True, sig.sign)
        sA = child_sig(step.N, step.V, step.inplace, sig.sign)
        return step, sA, sB

    @property
    def r(self) -> int:
        return self._cache["r"]

    def params(self):
        return [self.r]

    def _run(self, I, ib, O, ob, ctx):
        A, B = self.children
        d = self.sig.N[0]
        r, m = self.r, d.n // self.r
        inplace = self.sig.inplace
        A.execute(I, ib, O, ob, ctx)
        tbuf, tb = (I, ib) if inplace else (O, ob)
        if not self._cache["fused"]:
            s = d.istride if inplace else d.ostride
            W = self._cached("W", lambda: twiddle_table(self._cache["twiddle"], d.n, r, m, self.sig.sign))
            V = _in_form(self.sig.V) if inplace else output_strides(self.sig.V)
            dims = _dims([(r, m * s, m * s), (m, s, s)], V)
            _twiddle_multiply(tbuf, tb, dims, W, ctx)
        B.execute(tbuf, tb, O, ob, ctx)

    def local_cost(self) -> float:
        if self._cache["fused"]:
            return BETA
        return BETA + 6.0 * self.sig.N[0].n * self.batch


class Loop(Plan):
    """Runs vector dim ``dim`` as an explicit sequential loop around the child."""

    kind = "loop"

    def __init__(self, sig: Signature, dim: int, child: Plan):
        if not 0 <= dim < len(sig.V):
            raise PlanError(f"loop dim {dim} out of range for vector rank {len(sig.V)}")
        if not loop_legal(sig, dim):
            raise PlanError("loop would overwrite inputs of later iterations")
        if child.sig != self.child_signature(sig, dim):
            raise PlanError("loop child has the wrong signature")
        super().__init__(sig, (child,))
        self._cache["dim"] = dim

    @staticmethod
    def child_signature(sig: Signature, dim: int) -> Signature:
        return child_sig(sig.N, sig.V[:dim] + sig.V[dim + 1 :], sig.inplace, sig.sign)

    @property
    def dim(self) -> int:
        return self._cache["dim"]

    def params(self):
        return [self.dim]

    def _run(self, I, ib, O, ob, ctx):
        d = self.sig.V[self.dim]
        child = self.children[0]
        for j in range(d.n):
            child.execute(I, ib + j * d.istride, O, ob + j * d.ostride, ctx)

    def cost(self) -> float:
        return self.sig.V[self.dim].n * self.children[0].cost() + BETA


class Indirect(Plan):
    """Move data into the output layout first, then transform in place there."""

    kind = "indirect"

    def __init__(self, sig: Signature, child1: Plan, child2: Plan):
        if not sig.N:
            raise PlanError("indirect needs rank >= 1")
        s1, s2 = self.child_signatures(sig)
        if child1.sig != s1 or child2.sig != s2:
            raise PlanError("indirect children have the wrong signatures")
        super().__init__(sig, (child1, child2))

    @staticmethod
    def child_signatures(sig: Signature):
        s1 = child_sig((), sig.N + sig.V, sig.inplace, sig.sign)
        s2 = child_sig(output_strides(sig.N), output_strides(sig.V), True, sig.sign)
        return s1, s2

    def _run(self, I, ib, O, ob, ctx):
        c1, c2 = self.children
        c1.execute(I, ib, O, ob, ctx)
        c2.execute(O, ob, O, ob, ctx)


class Buffer(Plan):
    """Copy into contiguous scratch, transform there in place, copy back."""

    kind = "buffer"

    def __init__(self, sig: Signature, child: Plan):
        _rank1(sig, "buffer")
        if child.sig != self.child_signature(sig):
            raise PlanError("buffer child has the wrong signature")
        super().__init__(sig, (child,))

    @staticmethod
    def child_signature(sig: Signature) -> Signature:
        n = sig.N[0].n
        return child_sig(((n, 1, 1),), ((vec_size(sig.V), n, n),), True, sig.sign)

    @property
    def block(self) -> int:
        return self.sig.N[0].n * self.batch

    def params(self):
        return [self.block]

    def _run(self, I, ib, O, ob, ctx):
        dims = self.sig.V + self.sig.N  # transform index fastest in scratch
        S = np.ascontiguousarray(strided(I, ib, dims, "in")).reshape(-1)
        ctx.record("r", I, ib, dims, "in")
        self.children[0].execute(S, 0, S, 0, ctx)
        ctx.record("w", O, ob, dims, "out")
        strided(O, ob, dims, "out")[...] = S.reshape(tuple(d.n for d in dims))

    def local_cost(self) -> float:
        b = self.block
        return 2.0 * b + ALPHA * b * _strided_fraction(self.sig.N[0]) + BETA


class RankReduce(Plan):
    """Multi-dimensional DFT as one rank-1 pass per dimension."""

    kind = "rankreduce"

    def __init__(self, sig: Signature, children):
        if len(sig.N) < 2:
            raise PlanError("rankreduce needs rank >= 2")
        children = tuple(children)
        if [c.sig for c in children] != self.child_signatures(sig):
            raise PlanError("rankreduce children have the wrong signatures")
        super().__init__(sig, children)

    @staticmethod
    def child_signatures(sig: Signature):
        N = sig.N
        out = [child_sig((N[0],), sig.V + N[1:], sig.inplace, sig.sign)]
        No = output_strides(N)
        Vo = output_strides(sig.V)
        for i in range(1, len(N)):
            out.append(child_sig((No[i],), Vo + No[:i] + No[i + 1 :], True, sig.sign))
        return out

    def _run(self, I, ib, O, ob, ctx):
        first, *rest = self.children
        first.execute(I, ib, O, ob, ctx)
        for c in rest:
            c.execute(O, ob, O, ob, ctx)


class InplaceComposite(Plan):
    """In-place n = p*q*m with p = q: radix-p DIT outside, radix-q DIF inside.

    Steps, all in place:
      A  size-q transforms with post-twiddles w_(qm)^(a*d)
      R  m (times V) square p x p transposes
      C  size-m transforms
      D  size-p transforms with pre-twiddles w_n^(l*k)
    """

    kind = "inplace"

    def __init__(self, sig: Signature, p: int, q: int, m: int, R: Plan, C: Plan, twiddle: str = "full"):
        if p != q:
            raise PlanError("only the square case p = q is supported")
        d = _rank1(sig, "inplace")
        if not sig.inplace or not sig.all_strides_equal:
            raise PlanError("inplace composite needs an in-place problem with equal strides")
        if d.n != p * q * m or p not in CODELET_SIZES:
            raise PlanError(f"inplace composite needs n = p*q*m with p in {CODELET_SIZES}")
        stepA, sR, sC, stepD = self.child_signatures(sig, p, q, m)
        if R.sig != sR or C.sig != sC:
            raise PlanError("inplace composite children have the wrong signatures")
        A = TwiddleCodelet(stepA, q * m, len(sig.V), post=True, twiddle=twiddle)
        D = TwiddleCodelet(stepD, d.n, len(sig.V), post=False, twiddle=twiddle)
        super().__init__(sig, (A, R, C, D))
        self._cache.update(p=p, q=q, m=m)

    @staticmethod
    def child_signatures(sig: Signature, p: int, q: int, m: int):
        s = sig.N[0].istride
        V = sig.V
        stepA = Signature(((q, p * m * s, p * m * s),), _dims(V, [(m, p * s, p * s), (p, s, s)]), True, sig.sign)
        sR = child_sig((), _dims(V, [(m, p * s, p * s), (p, s, p * m * s), (p, p * m * s, s)]), True, sig.sign)
        sC = child_sig(((m, p * s, p * s),), _dims(V, [(p, p * m * s, p * m * s), (q, s, s)]), True, sig.sign)
        stepD = Signature(((p, q * m * s, q * m * s),), _dims(V, [(q * m, s, s)]), True, sig.sign)
        return stepA, sR, sC, stepD

    def params(self):
        c = self._cache
        return [c["p"], c["q"], c["m"]]

    def _run(self, I, ib, O, ob, ctx):
        for c in self.children:
            c.execute(O, ob, O, ob, ctx)


def estimate_cost(plan: Plan) -> float:
    """Heuristic cost: real ops + 0.5 per non-unit-stride access + 16 per node."""
    return float(plan.cost())


def apply(plan: Plan, problem, ctx: ExecContext | None = None) -> None:
    """Execute ``plan`` on ``problem`` (whose normalized signature must match)."""
    from ..problem import problem_normalize

    p = problem_normalize(problem)
    if p.signature != plan.sig:
        raise PlanError(f"plan was built for {plan.sig}, problem is {p.signature}")
    plan.execute(p.input, p.ibase, p.output, p.obase, ctx or NULL_CTX)


def leaf_batch(sig: Signature) -> int:
    return prod(d.n for d in sig.V)
