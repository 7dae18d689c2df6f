"""Executable codelets: generated straight-line Python over rows of data.

A codelet function reads ``xr[k]``/``xi[k]`` (and twiddles ``wr[k]``/``wi[k]``)
and assigns ``yr[k]``/``yi[k]``.  The values may be Python floats or numpy
rows; with ``(n, B)`` arrays one call processes B transforms at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Union

import numpy as np

from ..oracle import roots_of_unity
from .create import ALGORITHMS, applicable, create_dag, is_prime
from .dag import (
    ADD,
    LOAD_RE,
    LOADS,
    MUL,
    MULCONST,
    NEG,
    STORE_RE,
    STORES,
    SUB,
    CodeletSpec,
    Dag,
    op_count,
)
from .schedule import Schedule, schedule
from .simplify import simplify


def python_source(sched: Schedule, name: str = "kernel") -> str:
    """Straight-line Python for ``sched`` with registers recycled after last use."""
    dag = sched.dag
    order = sched.order
    users = dag.users()
    pos = {i: p for p, i in enumerate(order)}
    last = {i: max((pos[u] for u in users[i]), default=-1) for i in order}
    free: list[str] = []
    reg: dict[int, str] = {}
    counter = 0
    dying: dict[int, list[int]] = {}
    for i, p in last.items():
        dying.setdefault(p, []).append(i)
    lines = [f"def {name}(xr, xi, wr, wi, yr, yi):"]
    for p, i in enumerate(order):
        nd = dag.nodes[i]
        k = nd.kind
        if k in STORES:
            arr = "yr" if k == STORE_RE else "yi"
            lines.append(f"    {arr}[{nd.slot[1]}] = {reg[nd.args[0]]}")
        else:
            if k in LOADS:
                src = nd.slot[0] + ("r" if k == LOAD_RE else "i")
                expr = f"{src}[{nd.slot[1]}]"
            elif k == ADD:
                expr = f"{reg[nd.args[0]]} + {reg[nd.args[1]]}"
            elif k == SUB:
                expr = f"{reg[nd.args[0]]} - {reg[nd.args[1]]}"
            elif k == NEG:
                expr = f"-{reg[nd.args[0]]}"
            elif k == MULCONST:
                expr = f"{nd.const!r} * {reg[nd.args[0]]}"
            elif k == MUL:
                expr = f"{reg[nd.args[0]]} * {reg[nd.args[1]]}"
            else:  # pragma: no cover
                raise ValueError(k)
            # operands dying here can hand their register to the result
            for d in dying.get(p, ()):
                if d != i and d in reg:
                    free.append(reg[d])
            if free:
                r = free.pop()
            else:
                r = f"r{counter}"
                counter += 1
            reg[i] = r
            lines.append(f"    {r} = {expr}")
            if last[i] == -1:
                free.append(r)
            continue
        for d in dying.get(p, ()):
            if d in reg:
                free.append(reg[d])
    lines.append("    return None")
    return "\n".join(lines) + "\n"


def compile_schedule(sched: Schedule, name: str = "kernel") -> Callable:
    src = python_source(sched, name)
    ns: dict = {}
    exec(compile(src, f"<codelet {name}>", "exec"), ns)
    fn = ns[name]
    fn.__source__ = src
    return fn


@dataclass
class Codelet:
    """A simplified, scheduled and compiled DFT kernel."""

    spec: CodeletSpec
    dag: Dag
    sched: Schedule
    fn: Callable = field(repr=False)

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def ops(self) -> tuple[int, int]:
        return op_count(self.dag)

    def run(self, xr, xi, wr=None, wi=None, yr=None, yi=None):
        """Apply to rows ``xr``/``xi`` (shape (n, ...)); returns (yr, yi)."""
        n = self.n
        if len(xr) != n or len(xi) != n:
            raise ValueError(f"codelet of size {n} got {len(xr)} inputs")
        if self.spec.has_twiddles and (wr is None or wi is None):
            raise ValueError("twiddle codelet needs twiddle inputs")
        if yr is None:
            if isinstance(xr, np.ndarray):
                yr = np.empty_like(xr, dtype=np.float64)
                yi = np.empty_like(xr, dtype=np.float64)
            else:
                yr = [0.0] * n
                yi = [0.0] * n
        self.fn(xr, xi, wr, wi, yr, yi)
        return yr, yi


def build_codelet(spec: CodeletSpec, simplified: bool = True) -> Codelet:
    dag = create_dag(spec)
    if simplified:
        dag = simplify(dag)
    sched = schedule(dag)
    return Codelet(spec, dag, sched, compile_schedule(sched, f"{spec.kind}_{spec.n}"))


def best_algorithm(n: int) -> str:
    """Creation algorithm with the fewest simplified operations for size n."""
    return _best_algorithm(n)


@lru_cache(maxsize=None)
def _best_algorithm(n: int) -> str:
    if n <= 2:
        return "ct"
    best = None
    for alg in ALGORITHMS:
        if not applicable(alg, n):
            continue
        total = sum(op_count(simplify(create_dag(CodeletSpec("notw", n, alg)))))
        if best is None or total < best[0]:
            best = (total, alg)
    return best[1]


@lru_cache(maxsize=None)
def get_codelet(n: int, kind: str = "notw", sign: int = -1, algorithm: str | None = None) -> Codelet:
    """Cached codelet factory used by the plan executor."""
    alg = algorithm or best_algorithm(n)
    return build_codelet(CodeletSpec(kind, n, alg, sign))


Executable = Union[Dag, Schedule, Codelet]


def _as_codelet(obj: Executable) -> Codelet:
    if isinstance(obj, Codelet):
        return obj
    sched = obj if isinstance(obj, Schedule) else schedule(obj)
    dag = sched.dag
    spec = dag.spec
    if spec is None:
        n = sum(1 for nd in dag.nodes if nd.kind == STORE_RE)
        kinds = {nd.slot[0] for nd in dag.nodes if nd.kind in LOADS}
        spec = CodeletSpec("twiddle" if "w" in kinds else "notw", max(n, 1))
    return Codelet(spec, dag, sched, compile_schedule(sched))


def execute_codelet(obj: Executable, inputs, twiddles=None) -> np.ndarray:
    """Evaluate a dag, schedule or codelet on complex ``inputs`` of shape (n,) or (n, B)."""
    c = _as_codelet(obj)
    x = np.asarray(inputs, dtype=np.complex128)
    if x.ndim == 0 or x.shape[0] != c.n:
        raise ValueError(f"codelet expects {c.n} inputs, got shape {x.shape}")
    wr = wi = None
    if c.spec.has_twiddles:
        if twiddles is None:
            raise ValueError("twiddle codelet needs twiddles")
        w = np.asarray(twiddles, dtype=np.complex128)
        if w.shape[0] != c.n:
            raise ValueError(f"expected {c.n} twiddles, got {w.shape[0]}")
        wr, wi = np.ascontiguousarray(w.real), np.ascontiguousarray(w.imag)
    xr = np.ascontiguousarray(x.real)
    xi = np.ascontiguousarray(x.imag)
    yr = np.empty_like(xr)
    yi = np.empty_like(xr)
    c.fn(xr, xi, wr, wi, yr, yi)
    return yr + 1j * yi


def extract_matrix(obj: Executable, twiddles=None) -> np.ndarray:
    """Matrix of the linear map, obtained by feeding unit vectors."""
    c = _as_codelet(obj)
    n = c.n
    if c.spec.has_twiddles and twiddles is None:
        twiddles = np.ones(n, dtype=np.complex128)
    if twiddles is not None:
        twiddles = np.broadcast_to(np.asarray(twiddles, dtype=np.complex128)[:, None], (n, n))
    return execute_codelet(c, np.eye(n, dtype=np.complex128), twiddles)


def dft_matrix(n: int, sign: int = -1) -> np.ndarray:
    w = roots_of_unity(n, sign)
    return w[np.outer(np.arange(n), np.arange(n)) % n]


__all__ = [
    "Codelet",
    "build_codelet",
    "best_algorithm",
    "get_codelet",
    "execute_codelet",
    "extract_matrix",
    "dft_matrix",
    "python_source",
    "compile_schedule",
    "is_prime",
]
