"""Register-friendly topological orders for codelet dags.

The scheduler cuts the dag at the median depth, schedules the upper half
before the lower half, and within each half finishes one weakly connected
component (one independent sub-transform) before starting the next.  The
recursion mirrors the divide-and-conquer structure of the FFT itself, so a
small register file behaves like a cache that is used obliviously.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dag import LOADS, STORES, Dag, DagError


@dataclass(frozen=True)
class Schedule:
    dag: Dag
    order: tuple

    def __iter__(self):
        return iter(self.order)

    def __len__(self) -> int:
        return len(self.order)


def _depths(dag: Dag) -> list[int]:
    """ASAP depth for computation and stores, ALAP (just before first use) for loads."""
    depth = [0] * len(dag.nodes)
    for nd in dag.nodes:
        if nd.args:
            depth[nd.id] = 1 + max(depth[a] for a in nd.args)
    users = dag.users()
    for nd in dag.nodes:
        if nd.kind in LOADS and users[nd.id]:
            depth[nd.id] = min(depth[u] for u in users[nd.id]) - 1
    return depth


def _components(ids: list[int], dag: Dag, members: set) -> list[list[int]]:
    parent = {i: i for i in ids}

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in ids:
        for a in dag.nodes[i].args:
            if a in members:
                ra, rb = find(a), find(i)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for i in ids:
        groups.setdefault(find(i), []).append(i)
    return [groups[r] for r in sorted(groups, key=lambda r: min(groups[r]))]


def tighten(dag: Dag, order) -> tuple:
    """Move every load to just before its first use and every store to just
    after its operand; never increases liveness."""
    users = dag.users()
    stores_of: dict[int, list[int]] = {}
    for nd in dag.nodes:
        if nd.kind in STORES:
            stores_of.setdefault(nd.args[0], []).append(nd.id)
    done = [False] * len(dag.nodes)
    out: list[int] = []

    def emit(i):
        done[i] = True
        out.append(i)
        for s in stores_of.get(i, ()):
            done[s] = True
            out.append(s)

    for i in order:
        nd = dag.nodes[i]
        if done[i] or nd.kind in STORES:
            continue
        if nd.kind in LOADS:
            if not users[i] or all(dag.nodes[u].kind in STORES for u in users[i]):
                emit(i)
            continue
        for a in nd.args:
            if not done[a]:
                emit(a)
        emit(i)
    for i in order:  # stray nodes (e.g. unused loads) keep their relative place at the end
        if not done[i]:
            done[i] = True
            out.append(i)
    return tuple(out)


def schedule(dag: Dag, leaf: int = 8) -> Schedule:
    """Deterministic topological order of every node in ``dag``.

    The recursive partition is tried with a few leaf sizes and the order with
    the smallest register pressure wins; the tightened breadth order is kept
    as a fallback candidate so the result is never worse than it.
    """
    dag.check()
    candidates = [tighten(dag, _partition(dag, lf)) for lf in (leaf, 2 * leaf, max(2, leaf // 2))]
    candidates.append(tighten(dag, breadth_order(dag)))
    order = min(candidates, key=lambda o: max_live(dag, o))  # min keeps the first on ties
    if not is_topological(dag, order):  # pragma: no cover - guards against builder bugs
        raise DagError("schedule is not topological (cycle or builder bug)")
    return Schedule(dag, order)


def _partition(dag: Dag, leaf: int) -> tuple:
    depth = _depths(dag)
    out: list[int] = []

    def rec(ids: list[int]) -> None:
        if len(ids) <= leaf:
            out.extend(sorted(ids, key=lambda i: (depth[i], i)))
            return
        members = set(ids)
        comps = _components(ids, dag, members)
        if len(comps) > 1:
            for c in comps:
                rec(c)
            return
        ds = sorted(depth[i] for i in ids)
        cut = ds[len(ds) // 2]
        if ds[0] == cut:
            cut += 1  # lower median equals the minimum: cut just above it
        top = [i for i in ids if depth[i] < cut]
        bottom = [i for i in ids if depth[i] >= cut]
        if not bottom:
            out.extend(sorted(ids, key=lambda i: (depth[i], i)))
            return
        rec(top)
        rec(bottom)

    rec(list(range(len(dag.nodes))))
    return tuple(out)


def breadth_order(dag: Dag) -> tuple:
    """Naive level-by-level order, loads first; the liveness baseline."""
    depth = [0] * len(dag.nodes)
    for nd in dag.nodes:
        if nd.args:
            depth[nd.id] = 1 + max(depth[a] for a in nd.args)
    return tuple(sorted(range(len(dag.nodes)), key=lambda i: (depth[i], i)))


def is_topological(dag: Dag, order) -> bool:
    pos = {}
    for p, i in enumerate(order):
        pos[i] = p
    if len(pos) != len(dag.nodes) or len(order) != len(dag.nodes):
        return False
    return all(pos[a] < pos[nd.id] for nd in dag.nodes for a in nd.args)


def max_live(dag: Dag, order) -> int:
    """Largest number of simultaneously live values (stores hold none)."""
    users = dag.users()
    pos = {i: p for p, i in enumerate(order)}
    last = {}
    for nd in dag.nodes:
        if nd.kind not in STORES and users[nd.id]:
            last[nd.id] = max(pos[u] for u in users[nd.id])
    live = 0
    best = 0
    ends: dict[int, int] = {}
    for p, i in enumerate(order):
        if i in last:
            live += 1
            ends[last[i]] = ends.get(last[i], 0) + 1
        best = max(best, live)
        live -= ends.pop(p, 0)
    return best
