"""Simplification phase: algebraic rewrites, CSE and network transposition."""

from __future__ import annotations

from .dag import (
    ADD,
    LOAD_IM,
    LOAD_RE,
    LOADS,
    MUL,
    MULCONST,
    NEG,
    STORE_IM,
    STORE_RE,
    STORES,
    SUB,
    Builder,
    Dag,
    DagError,
    op_count,
    prune,
)


def rebuild(dag: Dag, positive_constants: bool = False) -> Dag:
    """Replay ``dag`` through a simplifying builder (one bottom-up pass)."""
    b = Builder(simplify=True, positive_constants=positive_constants)
    val: list = [None] * len(dag.nodes)
    for nd in dag.nodes:
        a = [val[i] for i in nd.args]
        k = nd.kind
        if k in LOADS:
            v = b.load(k, nd.slot)
        elif k in STORES:
            v = b.store(k, nd.slot, a[0])
        elif k == ADD:
            v = b.add(a[0], a[1])
        elif k == SUB:
            v = b.sub(a[0], a[1])
        elif k == NEG:
            v = b.neg(a[0])
        elif k == MULCONST:
            v = b.mulconst(nd.const, a[0])
        elif k == MUL:
            v = b.mul(a[0], a[1])
        else:  # pragma: no cover - guarded by Dag.check
            raise DagError(f"unknown kind {k}")
        val[nd.id] = v
    return prune(b.dag(dag.spec))


def _factor_common_constants(dag: Dag) -> Dag:
    """``c*a +- c*b -> c*(a +- b)`` when both products have no other users."""
    users = dag.users()
    nodes = dag.nodes
    b = Builder(simplify=True)
    val: list = [None] * len(nodes)
    for nd in nodes:
        a = [val[i] for i in nd.args]
        k = nd.kind
        if k in (ADD, SUB):
            x, y = (nodes[i] for i in nd.args)
            if (
                x.kind == MULCONST
                and y.kind == MULCONST
                and abs(x.const) == abs(y.const)
                and len(users[x.id]) == 1
                and len(users[y.id]) == 1
            ):
                c = x.const
                same = x.const == y.const
                xa, ya = val[x.args[0]], val[y.args[0]]
                # c*a + c*b, c*a - c*b, c*a + (-c)*b, c*a - (-c)*b
                inner = b.add(xa, ya) if (k == ADD) == same else b.sub(xa, ya)
                val[nd.id] = b.mulconst(c, inner)
                continue
        if k in LOADS:
            v = b.load(k, nd.slot)
        elif k in STORES:
            v = b.store(k, nd.slot, a[0])
        elif k == ADD:
            v = b.add(*a)
        elif k == SUB:
            v = b.sub(*a)
        elif k == NEG:
            v = b.neg(a[0])
        elif k == MULCONST:
            v = b.mulconst(nd.const, a[0])
        else:
            v = b.mul(*a)
        val[nd.id] = v
    return prune(b.dag(dag.spec))


def _reverse(dag: Dag, conjugate: bool) -> Dag:
    """Edge reversal of a linear dag.

    Stores become loads of the same slot index and vice versa, with the
    array names kept (``x`` in, ``y`` out) so the result is again a kernel.
    With ``conjugate`` the imaginary inputs and outputs are negated, which
    turns the real-matrix transpose (the adjoint) into the plain transpose.
    """
    if not dag.is_linear:
        raise DagError("network transposition needs a linear dag (no Mul nodes)")
    b = Builder(simplify=True)
    n_nodes = len(dag.nodes)
    contrib: list[list] = [[] for _ in range(n_nodes)]
    adj: list = [None] * n_nodes
    out_array = {"x": "y", "y": "x"}
    pending_stores = []
    for nd in reversed(dag.nodes):
        k = nd.kind
        terms = contrib[nd.id]
        acc = None
        for t in terms:
            acc = b.add(acc, t)
        adj[nd.id] = acc
        if k in STORES:
            arr, idx = nd.slot
            v = b.load(LOAD_RE if k == STORE_RE else LOAD_IM, (out_array.get(arr, arr), idx))
            if conjugate and k == STORE_IM:
                v = b.neg(v)
            contrib[nd.args[0]].append(v)
        elif k in LOADS:
            pending_stores.append(nd)
        elif acc is None:
            continue
        elif k == ADD:
            contrib[nd.args[0]].append(acc)
            contrib[nd.args[1]].append(acc)
        elif k == SUB:
            contrib[nd.args[0]].append(acc)
            contrib[nd.args[1]].append(b.neg(acc))
        elif k == NEG:
            contrib[nd.args[0]].append(b.neg(acc))
        elif k == MULCONST:
            contrib[nd.args[0]].append(b.mulconst(nd.const, acc))
    for nd in sorted(pending_stores, key=lambda d: (d.slot, d.kind)):
        v = adj[nd.id]
        if conjugate and nd.kind == LOAD_IM:
            v = b.neg(v)
        arr, idx = nd.slot
        b.store(STORE_RE if nd.kind == LOAD_RE else STORE_IM, (out_array.get(arr, arr), idx), v)
    return prune(b.dag(dag.spec))


def transpose_network(dag: Dag) -> Dag:
    """Dag computing the transposed linear operator ``M^T`` of ``dag``."""
    return _reverse(dag, conjugate=True)


def _total(dag: Dag) -> int:
    return sum(op_count(dag))


def simplify(dag: Dag, transpose: bool = True, max_rounds: int = 4) -> Dag:
    """Rewrite to a fixpoint, optionally through the transposed network,
    then make every stored constant positive."""
    cur = rebuild(dag)
    for _ in range(max_rounds):
        before = _total(cur)
        cand = _factor_common_constants(cur)
        cand = rebuild(cand)
        if transpose and cand.is_linear:
            try:
                t = rebuild(_reverse(cand, conjugate=False))
                t = rebuild(_reverse(t, conjugate=False))
            except DagError:
                t = cand
            if _total(t) <= _total(cand):
                cand = t
        if _total(cand) <= before:
            cur = cand
        if _total(cur) >= before:
            break
    return canonicalize_constants(cur)


def canonicalize_constants(dag: Dag) -> Dag:
    """Propagate signs so that every MulConst constant is positive."""
    out = rebuild(dag, positive_constants=True)
    bad = [nd for nd in out.nodes if nd.kind == MULCONST and not nd.const > 0]
    if bad:  # pragma: no cover - the builder never emits these
        raise DagError(f"negative constants survived canonicalization: {bad[:3]}")
    return out
