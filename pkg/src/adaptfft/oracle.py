"""Reference DFTs used as ground truth for every fast path.

``naive_dft`` evaluates the definition directly.  ``naive_dft_reference``
does the same with error-compensated summation so that its result is good
to a few ulps.  ``reference_fft_extended`` is a slow radix-2 / mixed-radix
FFT carried out in x87 extended precision, for sizes where an O(n^2)
reference is out of reach.
"""

from __future__ import annotations

import math

import numpy as np

FORWARD = -1


def tolerance(n: int) -> float:
    """Relative L2 tolerance for a size-n transform."""
    return 1e-10 * math.log2(n + 2)


def rel_l2_error(approx, exact) -> float:
    approx = np.asarray(approx)
    exact = np.asarray(exact)
    den = np.linalg.norm(exact)
    num = np.linalg.norm(approx - exact)
    if den == 0.0:
        return float(num)
    return float(num / den)


def roots_of_unity(n: int, sign: int = FORWARD) -> np.ndarray:
    """``exp(sign * 2 pi i k / n)`` for k < n, each angle reduced exactly.

    The octant symmetry keeps every evaluated angle within [0, pi/4], where
    the library sin/cos are accurate to about half an ulp.
    """
    if n < 1:
        return np.zeros(0, dtype=np.complex128)
    k = np.arange(n, dtype=np.int64)
    # angle = 2 pi k / n = (pi/4) * (8k / n); split 8k = q*n + r exactly
    q, r = np.divmod(8 * k, n)
    frac = r / n  # in [0, 1)
    # reflect to keep the argument within [0, pi/4]
    odd = (q % 2) == 1
    t = np.where(odd, 1.0 - frac, frac) * (math.pi / 4)
    c = np.cos(t)
    s = np.sin(t)
    # at exactly pi/4 the library sin and cos round to neighbouring doubles
    diag = odd & (r == 0)
    c[diag] = s[diag] = np.sqrt(0.5)
    # octant q: (cos, sin) of q*pi/4 + frac*pi/4
    octant = q % 8
    cos_tab = np.empty(n)
    sin_tab = np.empty(n)
    # for each octant, express cos/sin of the full angle via (c, s) of the reduced one
    mapping = {
        0: (c, s),
        1: (s, c),
        2: (-s, c),
        3: (-c, s),
        4: (-c, -s),
        5: (-s, -c),
        6: (s, -c),
        7: (c, -s),
    }
    for o, (cc, ss) in mapping.items():
        m = octant == o
        cos_tab[m] = cc[m]
        sin_tab[m] = ss[m]
    return cos_tab + 1j * (sign * sin_tab)


def naive_dft(x, sign: int = FORWARD) -> np.ndarray:
    """Direct O(n^2) evaluation of ``Y[k] = sum_l x[l] w^(sign*l*k)``."""
    x = np.asarray(x, dtype=np.complex128)
    n = x.size
    if n == 0:
        return np.zeros(0, dtype=np.complex128)
    w = roots_of_unity(n, sign)
    idx = np.outer(np.arange(n), np.arange(n)) % n
    return w[idx] @ x


def _two_sum(a, b):
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def naive_dft_reference(x, sign: int = FORWARD) -> np.ndarray:
    """Naive DFT with compensated (two-sum) accumulation of every term.

    Vectorized over output frequencies; the loop runs over inputs.
    """
    x = np.asarray(x, dtype=np.complex128)
    n = x.size
    if n == 0:
        return np.zeros(0, dtype=np.complex128)
    w = roots_of_unity(n, sign)
    wr, wi = w.real, w.imag
    k = np.arange(n, dtype=np.int64)
    sr = np.zeros(n)
    si = np.zeros(n)
    cr = np.zeros(n)
    ci = np.zeros(n)
    for ell in range(n):
        xr, xi = x[ell].real, x[ell].imag
        if xr == 0.0 and xi == 0.0:
            continue
        idx = (ell * k) % n
        tr, ti = wr[idx], wi[idx]
        # each product split into its two real terms, each summed compensated
        for term in (xr * tr, -(xi * ti)):
            sr, e = _two_sum(sr, term)
            cr += e
        for term in (xr * ti, xi * tr):
            si, e = _two_sum(si, term)
            ci += e
    return (sr + cr) + 1j * (si + ci)


def _extended_pi() -> np.longdouble:
    return np.arctan(np.longdouble(1)) * 4


def _extended_roots(n: int, sign: int) -> np.ndarray:
    k = np.arange(n, dtype=np.longdouble)
    ang = (k / np.longdouble(n)) * (2 * _extended_pi())
    return np.cos(ang) + 1j * (sign * np.sin(ang)).astype(np.clongdouble)


def _smallest_factor(n: int) -> int:
    for p in range(2, math.isqrt(n) + 1):
        if n % p == 0:
            return p
    return n


def reference_fft_extended(x, sign: int = FORWARD, max_prime: int = 4096) -> np.ndarray:
    """Recursive mixed-radix DFT in extended precision, rounded to complex128.

    Leaves (prime factors) use the naive sum; ``max_prime`` bounds their size.
    """
    x = np.asarray(x, dtype=np.complex128)
    n = x.size
    if n == 0:
        return np.zeros(0, dtype=np.complex128)
    xe = x.astype(np.clongdouble)
    out = _ext_rec(xe[None, :], sign, max_prime)
    return out[0].astype(np.complex128)


def _ext_rec(xs: np.ndarray, sign: int, max_prime: int) -> np.ndarray:
    """DFT of each row of ``xs`` in extended precision."""
    b, n = xs.shape
    if n == 1:
        return xs.copy()
    p = _smallest_factor(n)
    if p == n:
        if n > max_prime:
            raise ValueError(f"prime factor {n} too large for the extended reference")
        w = _extended_roots(n, sign)
        idx = np.outer(np.arange(n), np.arange(n)) % n
        return xs @ w[idx]
    m = n // p
    # DIT: p sub-transforms of size m over x[l1*p + l2]
    sub = xs.reshape(b, m, p).transpose(0, 2, 1).reshape(b * p, m)
    inner = _ext_rec(sub, sign, max_prime).reshape(b, p, m)
    w = _extended_roots(n, sign)
    l2 = np.arange(p)[:, None]
    k1 = np.arange(m)[None, :]
    inner = inner * w[(l2 * k1) % n][None, :, :]
    wp = _extended_roots(p, sign)
    fp = wp[np.outer(np.arange(p), np.arange(p)) % p]  # (k2, l2)
    out = np.einsum("ql,blk->bqk", fp, inner)  # out[b, k2, k1]
    return out.reshape(b, n)


def reference_dft(x, sign: int = FORWARD, naive_limit: int = 4096) -> np.ndarray:
    """Best available accurate DFT: compensated naive for small n, else extended FFT."""
    x = np.asarray(x, dtype=np.complex128)
    if x.size <= naive_limit:
        return naive_dft_reference(x, sign)
    return reference_fft_extended(x, sign)
