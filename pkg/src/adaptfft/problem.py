"""I/O dimensions, I/O tensors and DFT problems.

A problem ``dft(N, V, I, O)`` describes ``rank(V)`` nested loops of
``rank(N)``-dimensional DFTs.  Every dimension is an ``IoDim`` triple of
(length, input stride, output stride); strides count complex elements, not
bytes.  Buffers are flat ``complex128`` numpy arrays owned by the caller.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Iterable, NamedTuple

import numpy as np

FORWARD = -1
BACKWARD = 1


class ProblemError(ValueError):
    """Raised for malformed problems (bad strides, aliasing, out of bounds)."""


class IoDim(NamedTuple):
    n: int
    istride: int
    ostride: int

    def __str__(self) -> str:
        return f"{self.n}:{self.istride}:{self.ostride}"

    @property
    def in_place_form(self) -> "IoDim":
        """Same dim with the input stride replaced by the output stride."""
        return IoDim(self.n, self.ostride, self.ostride)


IoTensor = tuple  # tuple[IoDim, ...]


def as_tensor(dims: Iterable) -> tuple[IoDim, ...]:
    out = []
    for d in dims:
        d = IoDim(*d)
        if d.n < 0:
            raise ProblemError(f"negative length in {d}")
        out.append(IoDim(int(d.n), int(d.istride), int(d.ostride)))
    return tuple(out)


def tensor_size(dims: Iterable[IoDim]) -> int:
    return prod(d.n for d in dims)


def output_strides(dims: Iterable[IoDim]) -> tuple[IoDim, ...]:
    return tuple(d.in_place_form for d in dims)


def input_strides(dims: Iterable[IoDim]) -> tuple[IoDim, ...]:
    return tuple(IoDim(d.n, d.istride, d.istride) for d in dims)


def format_tensor(dims: Iterable[IoDim]) -> str:
    return "{" + ";".join(str(d) for d in dims) + "}"


def parse_tensor(text: str) -> tuple[IoDim, ...]:
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise ProblemError(f"bad tensor {text!r}")
    body = text[1:-1].strip()
    if not body:
        return ()
    dims = []
    for part in body.split(";"):
        fields = part.split(":")
        if len(fields) != 3:
            raise ProblemError(f"bad dim {part!r}")
        try:
            dims.append(IoDim(*(int(f) for f in fields)))
        except ValueError as exc:
            raise ProblemError(f"bad dim {part!r}") from exc
    return as_tensor(dims)


def addresses(dims: Iterable[IoDim], which: str) -> np.ndarray:
    """All element offsets touched by ``dims`` (``which`` is 'in' or 'out')."""
    attr = "istride" if which == "in" else "ostride"
    offs = np.zeros(1, dtype=np.int64)
    for d in dims:
        step = np.arange(d.n, dtype=np.int64) * getattr(d, attr)
        offs = (offs[:, None] + step[None, :]).ravel()
    return offs


def extent(dims: Iterable[IoDim], which: str) -> tuple[int, int]:
    """(min, max) offset relative to the base pointer; (0, -1) if empty."""
    dims = tuple(dims)
    if any(d.n == 0 for d in dims):
        return 0, -1
    attr = "istride" if which == "in" else "ostride"
    lo = sum(min(0, (d.n - 1) * getattr(d, attr)) for d in dims)
    hi = sum(max(0, (d.n - 1) * getattr(d, attr)) for d in dims)
    return lo, hi


def is_injective(dims: Iterable[IoDim], which: str) -> bool:
    offs = addresses(dims, which)
    return np.unique(offs).size == offs.size


@dataclass(frozen=True)
class Signature:
    """Buffer-independent description of a problem, used as a plan key."""

    N: tuple[IoDim, ...]
    V: tuple[IoDim, ...]
    inplace: bool
    sign: int

    def __post_init__(self):
        object.__setattr__(self, "N", as_tensor(self.N))
        object.__setattr__(self, "V", as_tensor(self.V))
        object.__setattr__(self, "inplace", bool(self.inplace))

    def __str__(self) -> str:
        return (
            f"dft n={format_tensor(self.N)} v={format_tensor(self.V)} "
            f"inplace={int(self.inplace)} sign={self.sign}"
        )

    @property
    def rank(self) -> int:
        return len(self.N)

    @property
    def vrank(self) -> int:
        return len(self.V)

    @property
    def all_strides_equal(self) -> bool:
        return all(d.istride == d.ostride for d in self.N + self.V)


@dataclass
class DftProblem:
    """A loop of DFTs over caller-owned buffers.

    ``input``/``output`` are 1-D ``complex128`` arrays; ``ibase``/``obase``
    are element offsets.  The problem is in place iff both refer to the same
    array and the same base.
    """

    N: tuple[IoDim, ...]
    V: tuple[IoDim, ...]
    input: np.ndarray
    output: np.ndarray
    ibase: int = 0
    obase: int = 0
    sign: int = FORWARD
    _checked: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        self.N = as_tensor(self.N)
        self.V = as_tensor(self.V)
        if self.sign not in (FORWARD, BACKWARD):
            raise ProblemError(f"sign must be -1 or +1, got {self.sign}")
        for name in ("input", "output"):
            buf = getattr(self, name)
            if not isinstance(buf, np.ndarray) or buf.dtype != np.complex128 or buf.ndim != 1:
                raise ProblemError(f"{name} must be a 1-D complex128 array")

    @property
    def inplace(self) -> bool:
        return self.input is self.output and self.ibase == self.obase

    @property
    def signature(self) -> Signature:
        return Signature(self.N, self.V, self.inplace, self.sign)

    def validate(self) -> "DftProblem":
        dims = self.N + self.V
        for buf, base, which in ((self.input, self.ibase, "in"), (self.output, self.obase, "out")):
            lo, hi = extent(dims, which)
            if hi >= lo and (base + lo < 0 or base + hi >= buf.size):
                raise ProblemError(
                    f"{which}put offsets [{base + lo}, {base + hi}] outside buffer of length {buf.size}"
                )
        if tensor_size(dims) > 0:
            if not is_injective(dims, "out"):
                raise ProblemError("output strides alias distinct elements")
            if not is_injective(dims, "in"):
                raise ProblemError("input strides alias distinct elements")
            if not self.inplace and np.shares_memory(self.input, self.output):
                ia = self.ibase + addresses(dims, "in")
                oa = self.obase + addresses(dims, "out")
                if np.intersect1d(ia, oa).size:
                    raise ProblemError("input and output overlap but the problem is not in place")
        self._checked = True
        return self


def normalize_signature(sig: Signature) -> Signature:
    """Drop length-1 dims and sort V by descending |os|, then |is|."""
    if any(d.n == 0 for d in sig.N + sig.V):
        # empty problem: all empty problems are equivalent no-ops
        return Signature((), (IoDim(0, 1, 1),), sig.inplace, sig.sign)
    N = tuple(d for d in sig.N if d.n != 1)
    V = tuple(d for d in sig.V if d.n != 1)
    V = tuple(sorted(V, key=lambda d: (-abs(d.ostride), -abs(d.istride), d.n, d.istride, d.ostride)))
    return Signature(N, V, sig.inplace, sig.sign)


def problem_normalize(p: DftProblem) -> DftProblem:
    """Canonical form of ``p``: same buffers, same semantics."""
    if not p._checked:
        p.validate()
    s = normalize_signature(p.signature)
    q = DftProblem(s.N, s.V, p.input, p.output, p.ibase, p.obase, p.sign)
    q._checked = True
    return q


def contiguous_problem(x: np.ndarray, y: np.ndarray | None = None, sign: int = FORWARD) -> DftProblem:
    """Single unit-stride 1-D DFT of ``x`` into ``y`` (in place if ``y`` is None)."""
    y = x if y is None else y
    return DftProblem(((x.size, 1, 1),), (), x, y, 0, 0, sign).validate()
