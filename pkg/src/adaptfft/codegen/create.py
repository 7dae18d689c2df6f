"""Creation phase: symbolic evaluation of a DFT algorithm into a raw dag.

Nothing is optimized here; multiplications by 1 and additions of 0 are kept
so that operation counts of the textbook algorithms can be checked exactly.
"""

from __future__ import annotations

import math

import numpy as np

from ..oracle import roots_of_unity
from .dag import Builder, CodeletSpec, ComplexOps, Cx, Dag

ALGORITHMS = ("ct", "splitradix", "pfa", "rader")


class CreateError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % p for p in range(2, math.isqrt(n) + 1))


def prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        while n % p == 0:
            out.append(p)
            n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def primitive_root(p: int) -> int:
    """Smallest generator of the multiplicative group mod prime ``p``."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p == 2:
        return 1
    phi = p - 1
    qs = set(prime_factors(phi))
    for g in range(2, p):
        if all(pow(g, phi // q, p) != 1 for q in qs):
            return g
    raise AssertionError("no primitive root")  # unreachable for primes


def pfa_split(n: int) -> tuple[int, int] | None:
    """Coprime split n = n1*n2 with 1 < n1 <= n2 <= 16 and n1 as large as possible."""
    best = None
    for n1 in range(2, math.isqrt(n) + 1):
        if n % n1 == 0:
            n2 = n // n1
            if math.gcd(n1, n2) == 1 and n2 <= 16:
                best = (n1, n2)
    return best


def applicable(alg: str, n: int) -> bool:
    if alg == "ct":
        return n >= 1
    if alg == "splitradix":
        return n >= 1 and n & (n - 1) == 0
    if alg == "pfa":
        return pfa_split(n) is not None
    if alg == "rader":
        return n >= 3 and is_prime(n)
    return False


def _w(n: int, e: int, sign: int) -> complex:
    return complex(roots_of_unity(n, sign)[e % n])


class _Gen:
    def __init__(self, ops: ComplexOps, sign: int):
        self.c = ops
        self.sign = sign

    def dft(self, xs: list[Cx], alg: str) -> list[Cx]:
        n = len(xs)
        if alg == "ct":
            return self.ct(xs)
        if alg == "splitradix":
            return self.splitradix(xs)
        if alg == "pfa":
            return self.pfa(xs)
        if alg == "rader":
            return self.rader(xs)
        raise CreateError(f"unknown algorithm {alg!r} for n={n}")

    # naive sum of a prime-size DFT; multiplications by w^0 skipped
    def small(self, xs: list[Cx]) -> list[Cx]:
        n = len(xs)
        if n == 1:
            return list(xs)
        if n == 2:
            return [self.c.add(xs[0], xs[1]), self.c.sub(xs[0], xs[1])]
        out = []
        for k in range(n):
            terms = [xs[0]]
            for ell in range(1, n):
                e = (ell * k) % n
                terms.append(xs[ell] if e == 0 else self.c.mulconst(_w(n, e, self.sign), xs[ell]))
            out.append(self.c.sum(terms))
        return out

    def _butterfly(self, xs: list[Cx]) -> list[Cx]:
        if len(xs) == 2:
            return [self.c.add(xs[0], xs[1]), self.c.sub(xs[0], xs[1])]
        return self.small(xs)

    def ct(self, xs: list[Cx]) -> list[Cx]:
        """Decimation in time by the smallest prime factor; every twiddle is multiplied."""
        n = len(xs)
        if n == 1:
            return list(xs)
        p = prime_factors(n)[0]
        if p == n and p != 2:
            return self.small(xs)
        m = n // p
        inner = [self.ct(xs[l2::p]) for l2 in range(p)]
        for l2 in range(1, p):
            inner[l2] = [self.c.mulconst(_w(n, l2 * k1, self.sign), v) for k1, v in enumerate(inner[l2])]
        out = [None] * n
        for k1 in range(m):
            col = self._butterfly([inner[l2][k1] for l2 in range(p)])
            for k2 in range(p):
                out[k1 + k2 * m] = col[k2]
        return out

    def splitradix(self, xs: list[Cx]) -> list[Cx]:
        n = len(xs)
        if n == 1:
            return list(xs)
        if n == 2:
            return self.small(xs)
        u = self.splitradix(xs[0::2])
        z = self.splitradix(xs[1::4])
        zp = self.splitradix(xs[3::4])
        q = n // 4
        j = _w(4, 1, self.sign)  # w_n^(n/4)
        out = [None] * n
        for k in range(q):
            a = self.c.mulconst(_w(n, k, self.sign), z[k])
            b = self.c.mulconst(_w(n, 3 * k, self.sign), zp[k])
            s = self.c.add(a, b)
            d = self.c.mulconst(j, self.c.sub(a, b))
            out[k] = self.c.add(u[k], s)
            out[k + 2 * q] = self.c.sub(u[k], s)
            out[k + q] = self.c.add(u[k + q], d)
            out[k + 3 * q] = self.c.sub(u[k + q], d)
        return out

    def pfa(self, xs: list[Cx]) -> list[Cx]:
        """Good-Thomas: 2-D DFT without twiddles under CRT index maps."""
        n = len(xs)
        split = pfa_split(n)
        if split is None:
            raise CreateError(f"pfa needs n with coprime factors <= 16, got {n}")
        n1, n2 = split
        grid = [[xs[(n2 * l1 + n1 * l2) % n] for l2 in range(n2)] for l1 in range(n1)]
        # transform along l1 for every l2, then along l2
        cols = [self._sub([grid[l1][l2] for l1 in range(n1)]) for l2 in range(n2)]  # cols[l2][k1]
        rows = [self._sub([cols[l2][k1] for l2 in range(n2)]) for k1 in range(n1)]  # rows[k1][k2]
        out = [None] * n
        for k1 in range(n1):
            for k2 in range(n2):
                k = next(v for v in range(k1, n, n1) if v % n2 == k2)
                out[k] = rows[k1][k2]
        return out

    def _sub(self, xs: list[Cx]) -> list[Cx]:
        if len(xs) > 2 and pfa_split(len(xs)) is not None:
            return self.pfa(xs)
        return self.ct(xs)

    def rader(self, xs: list[Cx]) -> list[Cx]:
        """Prime n: cyclic convolution of length n-1 done with symbolic ct DFTs."""
        n = len(xs)
        if not (n >= 3 and is_prime(n)):
            raise CreateError(f"rader needs a prime n >= 3, got {n}")
        g = primitive_root(n)
        ginv = pow(g, n - 2, n)
        m = n - 1
        a = [xs[pow(g, q, n)] for q in range(m)]
        b = np.array([roots_of_unity(n, self.sign)[pow(ginv, q, n)] for q in range(m)])
        bhat = np.fft.fft(b) / m  # constant kernel, scaled for the inverse below
        fwd = _Gen(self.c, -1)  # convolution theorem needs the same sign as np.fft.fft
        A = fwd.ct(a)
        C = [self.c.mulconst(complex(bhat[k]), A[k]) for k in range(m)]
        conv = fwd.ct(C[:1] + C[:0:-1])  # inverse DFT via index reversal
        out = [None] * n
        out[0] = self.c.sum(xs)
        for q in range(m):
            out[pow(ginv, q, n)] = self.c.add(xs[0], conv[q])
        return out


def create_dag(spec: CodeletSpec) -> Dag:
    """Raw dag for ``spec``: loads ``x[k]`` (and ``w[k]``), stores ``y[k]``."""
    n, alg = spec.n, spec.algorithm
    if alg not in ALGORITHMS:
        raise CreateError(f"unknown algorithm {alg!r}")
    if n > 1 and not applicable(alg, n):
        raise CreateError(f"algorithm {alg!r} does not apply to n={n}")
    builder = Builder(simplify=False)
    ops = ComplexOps(builder)
    xs = [ops.load("x", k) for k in range(n)]
    if spec.kind == "twiddle":
        xs = [xs[0]] + [ops.mul(xs[k], ops.load("w", k)) for k in range(1, n)]
    gen = _Gen(ops, spec.sign)
    ys = xs if n == 1 else gen.dft(xs, alg)
    if spec.kind == "twiddle_dif":
        ys = [ys[0]] + [ops.mul(ys[k], ops.load("w", k)) for k in range(1, n)]
    for k, y in enumerate(ys):
        ops.store("y", k, y)
    return builder.dag(spec)
