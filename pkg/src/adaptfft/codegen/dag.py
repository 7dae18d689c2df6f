"""Real-valued linear-network dags for small DFT kernels.

Nodes are stored in a list whose order is a valid topological order
(operands always have smaller ids).  Complex arithmetic is broken open into
real and imaginary parts before anything reaches the dag.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

LOAD_RE, LOAD_IM = "LoadRe", "LoadIm"
STORE_RE, STORE_IM = "StoreRe", "StoreIm"
ADD, SUB, MULCONST, NEG = "Add", "Sub", "MulConst", "Neg"
# product of two variables; only twiddle codelets contain it
MUL = "Mul"

LOADS = (LOAD_RE, LOAD_IM)
STORES = (STORE_RE, STORE_IM)
ARITH = (ADD, SUB, MULCONST, NEG, MUL)
KINDS = LOADS + STORES + ARITH


class DagError(ValueError):
    pass


@dataclass(frozen=True)
class DagNode:
    id: int
    kind: str
    args: tuple = ()
    const: Optional[float] = None
    slot: Optional[tuple] = None  # (array name, index) for loads and stores


@dataclass(frozen=True)
class CodeletSpec:
    kind: str  # "notw", "twiddle" (inputs twiddled) or "twiddle_dif" (outputs twiddled)
    n: int
    algorithm: str = "ct"
    sign: int = -1

    def __post_init__(self):
        if self.kind not in ("notw", "twiddle", "twiddle_dif"):
            raise ValueError(f"unknown codelet kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("codelet size must be >= 1")
        if self.sign not in (-1, 1):
            raise ValueError("sign must be -1 or +1")

    @property
    def has_twiddles(self) -> bool:
        return self.kind != "notw"


@dataclass
class Dag:
    nodes: list
    spec: Optional[CodeletSpec] = None
    _users: Optional[list] = field(default=None, repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def stores(self) -> list:
        return [nd for nd in self.nodes if nd.kind in STORES]

    @property
    def loads(self) -> list:
        return [nd for nd in self.nodes if nd.kind in LOADS]

    @property
    def is_linear(self) -> bool:
        return all(nd.kind != MUL for nd in self.nodes)

    def users(self) -> list:
        if self._users is None:
            users = [[] for _ in self.nodes]
            for nd in self.nodes:
                for a in nd.args:
                    users[a].append(nd.id)
            self._users = users
        return self._users

    def check(self) -> "Dag":
        for i, nd in enumerate(self.nodes):
            if nd.id != i:
                raise DagError(f"node {i} carries id {nd.id}")
            if nd.kind not in KINDS:
                raise DagError(f"unknown node kind {nd.kind!r}")
            if any(a >= i or a < 0 for a in nd.args):
                raise DagError(f"node {i} is not topologically ordered")
        return self


class Builder:
    """Node factory with optional hash-consing and algebraic rewrites.

    ``ZERO`` (None) stands for the constant zero; it never becomes a node.
    With ``simplify=False`` every requested operation is materialised, which
    is what the creation phase needs.
    """

    ZERO = None

    def __init__(self, simplify: bool = False, positive_constants: bool = False):
        self.nodes: list[DagNode] = []
        self.simplify = simplify
        self.positive = positive_constants
        self._table: dict = {}

    # -- raw node creation -------------------------------------------------
    def _make(self, kind, args=(), const=None, slot=None) -> int:
        if self.simplify:
            key = (kind, args, const, slot)
            hit = self._table.get(key)
            if hit is not None:
                return hit
        nid = len(self.nodes)
        self.nodes.append(DagNode(nid, kind, tuple(args), const, slot))
        if self.simplify:
            self._table[(kind, tuple(args), const, slot)] = nid
        return nid

    def kind(self, v) -> Optional[str]:
        return None if v is None else self.nodes[v].kind

    def _neg_arg(self, v):
        """Operand of ``v`` if ``v`` is a negation, else None."""
        if v is not None and self.nodes[v].kind == NEG:
            return self.nodes[v].args[0]
        return None

    # -- public operations -------------------------------------------------
    def load(self, kind: str, slot: tuple) -> int:
        return self._make(kind, (), None, tuple(slot))

    def store(self, kind: str, slot: tuple, v) -> int:
        if v is None:
            raise DagError(f"store of constant zero into {slot}")
        return self._make(kind, (v,), None, tuple(slot))

    def neg(self, a):
        if not self.simplify:
            return self._make(NEG, (a,))
        if a is None:
            return None
        inner = self._neg_arg(a)
        if inner is not None:
            return inner
        nd = self.nodes[a]
        if nd.kind == MULCONST and not self.positive:
            return self.mulconst(-nd.const, nd.args[0])
        if nd.kind == SUB:
            return self.sub(nd.args[1], nd.args[0])
        return self._make(NEG, (a,))

    def add(self, a, b):
        if not self.simplify:
            return self._make(ADD, (a, b))
        if a is None:
            return b
        if b is None:
            return a
        na, nb = self._neg_arg(a), self._neg_arg(b)
        if na is not None and nb is not None:
            return self.neg(self.add(na, nb))
        if nb is not None:
            return self.sub(a, nb)
        if na is not None:
            return self.sub(b, na)
        if a > b:
            a, b = b, a
        return self._make(ADD, (a, b))

    def sub(self, a, b):
        if not self.simplify:
            return self._make(SUB, (a, b))
        if b is None:
            return a
        if a is None:
            return self.neg(b)
        if a == b:
            return None
        nb = self._neg_arg(b)
        if nb is not None:
            return self.add(a, nb)
        na = self._neg_arg(a)
        if na is not None:
            return self.neg(self.add(na, b))
        return self._make(SUB, (a, b))

    def mulconst(self, c: float, a):
        c = float(c)
        if not self.simplify:
            return self._make(MULCONST, (a,), c)
        if a is None or c == 0.0:
            return None
        if c == 1.0:
            return a
        if c == -1.0:
            return self.neg(a)
        nd = self.nodes[a]
        if nd.kind == MULCONST:
            return self.mulconst(c * nd.const, nd.args[0])
        if nd.kind == NEG:
            return self.mulconst(-c, nd.args[0])
        if c < 0 and self.positive:
            return self.neg(self._make(MULCONST, (a,), -c))
        return self._make(MULCONST, (a,), c)

    def mul(self, a, b):
        if not self.simplify:
            return self._make(MUL, (a, b))
        if a is None or b is None:
            return None
        na, nb = self._neg_arg(a), self._neg_arg(b)
        if na is not None:
            return self.neg(self.mul(na, b))
        if nb is not None:
            return self.neg(self.mul(a, nb))
        if a > b:
            a, b = b, a
        return self._make(MUL, (a, b))

    def dag(self, spec=None) -> Dag:
        return Dag(list(self.nodes), spec).check()


def prune(dag: Dag) -> Dag:
    """Dead-code elimination and renumbering (keeps stores and their cones)."""
    live = [False] * len(dag.nodes)
    for nd in reversed(dag.nodes):
        if nd.kind in STORES:
            live[nd.id] = True
        if live[nd.id]:
            for a in nd.args:
                live[a] = True
    remap = {}
    nodes = []
    for nd in dag.nodes:
        if live[nd.id]:
            remap[nd.id] = len(nodes)
            nodes.append(DagNode(len(nodes), nd.kind, tuple(remap[a] for a in nd.args), nd.const, nd.slot))
    return Dag(nodes, dag.spec).check()


def op_count(dag: Dag) -> tuple[int, int]:
    """(additions, multiplications); negations count as additions."""
    adds = sum(1 for nd in dag.nodes if nd.kind in (ADD, SUB, NEG))
    mults = sum(1 for nd in dag.nodes if nd.kind in (MULCONST, MUL))
    return adds, mults


class Cx:
    """Symbolic complex value: a pair of node ids (None means zero)."""

    __slots__ = ("re", "im")

    def __init__(self, re, im):
        self.re = re
        self.im = im

    def __repr__(self) -> str:
        return f"Cx({self.re}, {self.im})"


class ComplexOps:
    """Complex arithmetic on top of a ``Builder``."""

    def __init__(self, builder: Builder):
        self.b = builder

    def load(self, array: str, k: int) -> Cx:
        return Cx(self.b.load(LOAD_RE, (array, k)), self.b.load(LOAD_IM, (array, k)))

    def store(self, array: str, k: int, z: Cx) -> None:
        self.b.store(STORE_RE, (array, k), z.re)
        self.b.store(STORE_IM, (array, k), z.im)

    def add(self, x: Cx, y: Cx) -> Cx:
        return Cx(self.b.add(x.re, y.re), self.b.add(x.im, y.im))

    def sub(self, x: Cx, y: Cx) -> Cx:
        return Cx(self.b.sub(x.re, y.re), self.b.sub(x.im, y.im))

    def mulconst(self, c: complex, x: Cx) -> Cx:
        """4 real multiplications and 2 additions, no shortcuts."""
        b = self.b
        re = b.sub(b.mulconst(c.real, x.re), b.mulconst(c.imag, x.im))
        im = b.add(b.mulconst(c.real, x.im), b.mulconst(c.imag, x.re))
        return Cx(re, im)

    def scale(self, c: float, x: Cx) -> Cx:
        return Cx(self.b.mulconst(c, x.re), self.b.mulconst(c, x.im))

    def mul(self, x: Cx, w: Cx) -> Cx:
        b = self.b
        re = b.sub(b.mul(x.re, w.re), b.mul(x.im, w.im))
        im = b.add(b.mul(x.re, w.im), b.mul(x.im, w.re))
        return Cx(re, im)

    def sum(self, terms: Iterable[Cx]) -> Cx:
        terms = list(terms)
        acc = terms[0]
        for t in terms[1:]:
            acc = self.add(acc, t)
        return acc
