"""Plan s-expressions: parsing, and rebuilding a plan for a signature.

Grammar (integers are decimal)::

    plan := (copy) | (transposq n) | (direct n) | (directtw n)
          | (dit r plan plan) | (dif r plan plan) | (loop dim plan)
          | (indirect plan plan) | (buffer b plan) | (rader p plan)
          | (bluestein n m plan) | (generic n) | (rankreduce plan...)
          | (inplace p q m plan plan plan plan)

``(directtw r)`` only appears as the twiddle step of ``dit``/``dif``/
``inplace``; there it means "fused twiddle codelet" rather than a
separately planned sub-problem.
"""

from __future__ import annotations

import re

from ..problem import Signature
from .base import PlanError
from .nodes import (
    DIF,
    DIT,
    Bluestein,
    Buffer,
    Copy,
    Direct,
    Generic,
    Indirect,
    InplaceComposite,
    Loop,
    Plan,
    Rader,
    RankReduce,
    TransposeSquare,
)

_TOKEN = re.compile(r"\s*(\(|\)|[^\s()]+)")

# kind -> (number of integer params, number of children or None for any)
ARITY = {
    "copy": (0, 0),
    "transposq": (1, 0),
    "direct": (1, 0),
    "directtw": (1, 0),
    "dit": (1, 2),
    "dif": (1, 2),
    "loop": (1, 1),
    "indirect": (0, 2),
    "buffer": (1, 1),
    "rader": (1, 1),
    "bluestein": (2, 1),
    "generic": (1, 0),
    "rankreduce": (0, None),
    "inplace": (3, 4),
}


class SexprError(PlanError):
    pass


def tokenize(text: str) -> list[str]:
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise SexprError(f"unexpected character at offset {pos}")
        out.append(m.group(1))
        pos = m.end()
    return out


def parse(text: str) -> tuple:
    """Parse to nested tuples ``(kind, params, children)``."""
    toks = tokenize(text)
    if not toks:
        raise SexprError("empty plan")
    node, i = _parse_at(toks, 0)
    if i != len(toks):
        raise SexprError(f"trailing tokens after plan: {' '.join(toks[i:])!r}")
    return node


def _parse_at(toks: list[str], i: int):
    if toks[i] != "(":
        raise SexprError(f"expected '(' but found {toks[i]!r}")
    i += 1
    if i >= len(toks) or toks[i] in "()":
        raise SexprError("missing plan kind")
    kind = toks[i]
    if kind not in ARITY:
        raise SexprError(f"unknown plan kind {kind!r}")
    i += 1
    params, children = [], []
    while True:
        if i >= len(toks):
            raise SexprError(f"unterminated ({kind} ...)")
        t = toks[i]
        if t == ")":
            i += 1
            break
        if t == "(":
            child, i = _parse_at(toks, i)
            children.append(child)
            continue
        if children:
            raise SexprError(f"parameter {t!r} after a child in ({kind} ...)")
        try:
            params.append(int(t))
        except ValueError:
            raise SexprError(f"bad integer {t!r} in ({kind} ...)") from None
        i += 1
    np_, nc = ARITY[kind]
    if len(params) != np_:
        raise SexprError(f"({kind} ...) takes {np_} integer(s), got {len(params)}")
    if nc is not None and len(children) != nc:
        raise SexprError(f"({kind} ...) takes {nc} child plan(s), got {len(children)}")
    if nc is None and not children:
        raise SexprError(f"({kind} ...) needs at least one child")
    return (kind, tuple(params), tuple(children)), i


def format_tree(node: tuple) -> str:
    kind, params, children = node
    return "(" + " ".join([kind, *map(str, params), *map(format_tree, children)]) + ")"


def _is_fused(node: tuple, size: int) -> bool:
    return node[0] == "directtw" and node[1] == (size,)


def _expect(cond: bool, msg: str) -> None:
    if not cond:
        raise PlanError(msg)


def instantiate(node, sig: Signature, twiddle: str = "full") -> Plan:
    """Build the plan described by ``node`` (text or parsed) for ``sig``."""
    if isinstance(node, str):
        node = parse(node)
    kind, params, kids = node

    def sub(k, s):
        return instantiate(k, s, twiddle)

    if kind == "copy":
        return Copy(sig)
    if kind == "transposq":
        p = TransposeSquare(sig)
        _expect(p.n == params[0], f"transposq size {params[0]} does not match {p.n}")
        return p
    if kind == "direct":
        _expect(len(sig.N) == 1 and sig.N[0].n == params[0], f"direct {params[0]} does not match {sig}")
        return Direct(sig)
    if kind == "generic":
        _expect(len(sig.N) == 1 and sig.N[0].n == params[0], f"generic {params[0]} does not match {sig}")
        return Generic(sig)
    if kind == "directtw":
        raise PlanError("(directtw r) is only valid as a twiddle step")
    if kind == "dit":
        r = params[0]
        _expect(len(sig.N) == 1 and r >= 2 and sig.N[0].n % r == 0, f"radix {r} does not split {sig}")
        s1, s2 = DIT.child_signatures(sig, r)
        c2 = None if _is_fused(kids[1], r) else sub(kids[1], s2)
        return DIT(sig, r, sub(kids[0], s1), c2, twiddle)
    if kind == "dif":
        r = params[0]
        _expect(len(sig.N) == 1 and r >= 2 and sig.N[0].n % r == 0, f"radix {r} does not split {sig}")
        _, sA, sB = DIF.child_signatures(sig, r)
        cA = None if _is_fused(kids[0], r) else sub(kids[0], sA)
        return DIF(sig, r, cA, sub(kids[1], sB), twiddle)
    if kind == "loop":
        d = params[0]
        _expect(0 <= d < len(sig.V), f"loop dim {d} out of range")
        return Loop(sig, d, sub(kids[0], Loop.child_signature(sig, d)))
    if kind == "indirect":
        _expect(bool(sig.N), "indirect needs rank >= 1")
        s1, s2 = Indirect.child_signatures(sig)
        return Indirect(sig, sub(kids[0], s1), sub(kids[1], s2))
    if kind == "buffer":
        _expect(len(sig.N) == 1, "buffer needs a rank-1 problem")
        p = Buffer(sig, sub(kids[0], Buffer.child_signature(sig)))
        _expect(p.block == params[0], f"buffer size {params[0]} does not match {p.block}")
        return p
    if kind == "rader":
        _expect(len(sig.N) == 1 and sig.N[0].n == params[0], f"rader {params[0]} does not match {sig}")
        return Rader(sig, sub(kids[0], Rader.child_signature(sig)))
    if kind == "bluestein":
        n, m = params
        _expect(len(sig.N) == 1 and sig.N[0].n == n, f"bluestein {n} does not match {sig}")
        return Bluestein(sig, m, sub(kids[0], Bluestein.child_signature(sig, m)))
    if kind == "rankreduce":
        sigs = RankReduce.child_signatures(sig) if len(sig.N) >= 2 else []
        _expect(len(sigs) == len(kids), f"rankreduce needs {len(sig.N)} children")
        return RankReduce(sig, [sub(k, s) for k, s in zip(kids, sigs)])
    if kind == "inplace":
        p, q, m = params
        _expect(len(sig.N) == 1 and sig.N[0].n == p * q * m, f"inplace {p}*{q}*{m} does not match {sig}")
        _expect(_is_fused(kids[0], q) and _is_fused(kids[3], p), "inplace needs (directtw q) and (directtw p) steps")
        _, sR, sC, _ = InplaceComposite.child_signatures(sig, p, q, m)
        return InplaceComposite(sig, p, q, m, sub(kids[1], sR), sub(kids[2], sC), twiddle)
    raise SexprError(f"unknown plan kind {kind!r}")  # pragma: no cover - ARITY guards this
