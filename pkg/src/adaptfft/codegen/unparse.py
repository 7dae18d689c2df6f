"""Text forms of a scheduled dag.

``neutral-source`` is a C-like listing with one single-assignment temporary
per node::

    /* codelet kind=notw n=2 alg=ct sign=-1 */
    T0 = re(x[1]);
    T1 = re(x[0]);
    T2 = T0 + T1;
    re(y[0]) = T2;

``dag-json`` is ``{"format": "adaptfft-dag", "version": 1, "spec": {...},
"nodes": [{"id", "kind", "args", "const", "slot"}, ...]}`` with nodes listed
in schedule order.  Both are byte-stable and parse back to an equivalent
dag (same nodes, same constants, same schedule).  Temporaries are
numbered by schedule position.
"""

from __future__ import annotations

import json
import re

from .dag import (
    ADD,
    KINDS,
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
    CodeletSpec,
    Dag,
    DagError,
    DagNode,
)
from .schedule import Schedule

TARGETS = ("neutral-source", "dag-json")
DAG_JSON_VERSION = 1

_BINOPS = {ADD: "+", SUB: "-", MUL: "*"}


class UnparseError(ValueError):
    pass


def _ref(nd: DagNode) -> str:
    part = "re" if nd.kind in (LOAD_RE, STORE_RE) else "im"
    return f"{part}({nd.slot[0]}[{nd.slot[1]}])"


def _header(spec: CodeletSpec | None) -> str:
    if spec is None:
        return "/* codelet */"
    return f"/* codelet kind={spec.kind} n={spec.n} alg={spec.algorithm} sign={spec.sign} */"


def _positions(sched: Schedule) -> dict:
    # temporaries are numbered by schedule position so that text is stable
    # under parse -> unparse
    return {i: p for p, i in enumerate(sched.order)}


def to_neutral_source(sched: Schedule) -> str:
    dag = sched.dag
    pos = _positions(sched)
    lines = [_header(dag.spec)]
    for i in sched.order:
        nd = dag.nodes[i]
        k = nd.kind
        t = pos[i]
        a = [pos[j] for j in nd.args]
        if k in LOADS:
            lines.append(f"T{t} = {_ref(nd)};")
        elif k in STORES:
            lines.append(f"{_ref(nd)} = T{a[0]};")
        elif k in _BINOPS:
            lines.append(f"T{t} = T{a[0]} {_BINOPS[k]} T{a[1]};")
        elif k == NEG:
            lines.append(f"T{t} = -T{a[0]};")
        elif k == MULCONST:
            lines.append(f"T{t} = {nd.const!r} * T{a[0]};")
    return "\n".join(lines) + "\n"


def to_dag_json(sched: Schedule) -> str:
    dag = sched.dag
    spec = dag.spec
    pos = _positions(sched)
    doc = {
        "format": "adaptfft-dag",
        "version": DAG_JSON_VERSION,
        "spec": None
        if spec is None
        else {"kind": spec.kind, "n": spec.n, "algorithm": spec.algorithm, "sign": spec.sign},
        "nodes": [
            {
                "id": pos[nd.id],
                "kind": nd.kind,
                "args": [pos[j] for j in nd.args],
                "const": nd.const,
                "slot": None if nd.slot is None else [nd.slot[0], nd.slot[1]],
            }
            for nd in (dag.nodes[i] for i in sched.order)
        ],
    }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def unparse(sched: Schedule, target: str = "neutral-source") -> str:
    if target == "neutral-source":
        return to_neutral_source(sched)
    if target == "dag-json":
        return to_dag_json(sched)
    raise UnparseError(f"unknown target {target!r}; expected one of {TARGETS}")


def _assemble(raw: list[tuple], spec: CodeletSpec | None) -> Schedule:
    """Renumber parsed (old_id, kind, old_args, const, slot) records in the
    given order, which must be topological."""
    remap: dict[int, int] = {}
    nodes = []
    for old, kind, args, const, slot in raw:
        if kind not in KINDS:
            raise UnparseError(f"unknown node kind {kind!r}")
        try:
            new_args = tuple(remap[a] for a in args)
        except KeyError as exc:
            raise UnparseError(f"node {old} uses {exc.args[0]} before its definition") from None
        if old in remap:
            raise UnparseError(f"temporary {old} assigned twice")
        nid = len(nodes)
        remap[old] = nid
        nodes.append(DagNode(nid, kind, new_args, const, slot))
    try:
        dag = Dag(nodes, spec).check()
    except DagError as exc:
        raise UnparseError(str(exc)) from exc
    return Schedule(dag, tuple(range(len(nodes))))


_HEADER = re.compile(r"/\* codelet(?: kind=(\w+) n=(\d+) alg=(\w+) sign=(-?1))? \*/")
_REF = r"(re|im)\((\w+)\[(\d+)\]\)"
_LOAD = re.compile(rf"T(\d+) = {_REF};")
_STORE = re.compile(rf"{_REF} = T(\d+);")
_BIN = re.compile(r"T(\d+) = T(\d+) ([-+*]) T(\d+);")
_NEG = re.compile(r"T(\d+) = -T(\d+);")
_MULC = re.compile(r"T(\d+) = (\S+) \* T(\d+);")


def parse_neutral_source(text: str) -> Schedule:
    spec = None
    raw = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        m = _HEADER.fullmatch(line)
        if m:
            if m.group(1):
                spec = CodeletSpec(m.group(1), int(m.group(2)), m.group(3), int(m.group(4)))
            continue
        if m := _LOAD.fullmatch(line):
            kind = LOAD_RE if m.group(2) == "re" else LOAD_IM
            raw.append((int(m.group(1)), kind, (), None, (m.group(3), int(m.group(4)))))
        elif m := _STORE.fullmatch(line):
            kind = STORE_RE if m.group(1) == "re" else STORE_IM
            raw.append((-1 - len(raw), kind, (int(m.group(4)),), None, (m.group(2), int(m.group(3)))))
        elif m := _BIN.fullmatch(line):
            kind = {"+": ADD, "-": SUB, "*": MUL}[m.group(3)]
            raw.append((int(m.group(1)), kind, (int(m.group(2)), int(m.group(4))), None, None))
        elif m := _NEG.fullmatch(line):
            raw.append((int(m.group(1)), NEG, (int(m.group(2)),), None, None))
        elif m := _MULC.fullmatch(line):
            try:
                c = float(m.group(2))
            except ValueError:
                raise UnparseError(f"line {lineno}: bad constant {m.group(2)!r}") from None
            raw.append((int(m.group(1)), MULCONST, (int(m.group(3)),), c, None))
        else:
            raise UnparseError(f"line {lineno}: cannot parse {line!r}")
    return _assemble(raw, spec)


def parse_dag_json(text: str) -> Schedule:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UnparseError(f"invalid JSON: {exc}") from exc
    if doc.get("format") != "adaptfft-dag" or doc.get("version") != DAG_JSON_VERSION:
        raise UnparseError("not an adaptfft-dag document of a supported version")
    s = doc.get("spec")
    spec = None if s is None else CodeletSpec(s["kind"], s["n"], s["algorithm"], s["sign"])
    raw = []
    for rec in doc["nodes"]:
        slot = None if rec.get("slot") is None else (rec["slot"][0], int(rec["slot"][1]))
        const = rec.get("const")
        raw.append((int(rec["id"]), rec["kind"], tuple(rec["args"]), None if const is None else float(const), slot))
    return _assemble(raw, spec)


def parse(text: str, target: str) -> Schedule:
    if target == "neutral-source":
        return parse_neutral_source(text)
    if target == "dag-json":
        return parse_dag_json(text)
    raise UnparseError(f"unknown target {target!r}")
