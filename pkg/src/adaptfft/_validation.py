"""Input checks shared by the estimator and the CLI."""

from __future__ import annotations

import numpy as np

from .oracle import FORWARD
from .problem import BACKWARD


def check_signal_matrix(X, name: str = "X") -> np.ndarray:
    """2-D, C-contiguous complex128 copy-or-view of ``X`` with finite entries.

    A 1-D input is treated as a single signal (one row).
    """
    A = np.asarray(X)
    if A.dtype.kind not in "biufc":
        raise TypeError(f"{name} must be numeric, got dtype {A.dtype}")
    if A.ndim == 1:
        A = A[None, :]
    if A.ndim != 2:
        raise ValueError(f"{name} must be 1-D or 2-D, got shape {A.shape}")
    if A.shape[1] == 0:
        raise ValueError(f"{name} has no samples per signal")
    A = np.ascontiguousarray(A, dtype=np.complex128)
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains NaN or infinity")
    return A


def check_sign(sign: int) -> int:
    if sign not in (FORWARD, BACKWARD):
        raise ValueError(f"sign must be -1 or +1, got {sign}")
    return int(sign)


def check_positive_int(value, name: str) -> int:
    if isinstance(value, bool) or int(value) != value or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def parse_sizes(text: str) -> list[int]:
    """Comma-separated sizes; ``2^k`` and ``a..b`` (powers of two between) allowed."""
    out: list[int] = []
    for tok in (t.strip() for t in text.split(",")):
        if not tok:
            continue
        if ".." in tok:
            lo, hi = (_size_token(t) for t in tok.split("..", 1))
            p = 1
            while p < lo:
                p *= 2
            while p <= hi:
                out.append(p)
                p *= 2
        else:
            out.append(_size_token(tok))
    if not out:
        raise ValueError("empty size list")
    return out


def _size_token(tok: str) -> int:
    tok = tok.strip()
    try:
        v = 2 ** int(tok[2:]) if tok.startswith("2^") else int(tok)
    except ValueError:
        raise ValueError(f"bad size {tok!r}") from None
    return check_positive_int(v, "size")
