"""Codelet generator: creation, simplification, scheduling and unparsing."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adaptfft.codegen import (
    ALGORITHMS,
    CodeletSpec,
    CreateError,
    applicable,
    best_algorithm,
    breadth_order,
    build_codelet,
    create_dag,
    dft_matrix,
    execute_codelet,
    extract_matrix,
    is_topological,
    max_live,
    op_count,
    parse,
    primitive_root,
    schedule,
    simplify,
    transpose_network,
    unparse,
)
from adaptfft.codegen.dag import MULCONST
from adaptfft.codegen.unparse import UnparseError

SIZES = {
    "ct": (1, 2, 3, 4, 5, 6, 7, 8, 12, 16, 32),
    "splitradix": (2, 4, 8, 16, 32, 64),
    "pfa": (6, 10, 12, 15),
    "rader": (3, 5, 7, 11, 13),
}


def cases():
    return [(alg, n) for alg in ALGORITHMS for n in SIZES[alg]]


def raw(n, alg="ct", kind="notw"):
    return create_dag(CodeletSpec(kind, n, alg))


# ---- op counts ---------------------------------------------------------------


def test_small_simplified_counts():
    assert op_count(simplify(raw(2))) == (4, 0)
    assert op_count(simplify(raw(4))) == (16, 0)


@pytest.mark.parametrize("n", [8, 16, 32])
def test_raw_radix2_counts(n):
    assert sum(op_count(raw(n))) == 5 * n * int(math.log2(n))


def test_frozen_simplified_counts():
    assert op_count(simplify(raw(8))) == (52, 4)
    assert op_count(simplify(raw(16))) == (148, 28)
    assert op_count(simplify(raw(16, "splitradix"))) == (144, 24)
    assert op_count(simplify(raw(64, "splitradix"))) == (912, 248)
    assert op_count(simplify(raw(5, "rader"))) == (52, 12)
    assert 1000 <= sum(op_count(simplify(raw(64, "splitradix")))) <= 1160


def test_best_algorithm_choices():
    assert best_algorithm(4) == "ct"
    assert best_algorithm(5) == "rader"
    assert best_algorithm(64) == "splitradix"


def test_simplify_never_grows():
    for alg, n in cases():
        assert sum(op_count(simplify(raw(n, alg)))) <= sum(op_count(raw(n, alg)))


# ---- semantics -------------------------------------------------------------


@pytest.mark.parametrize("alg,n", cases())
def test_every_stage_is_the_dft(alg, n):
    d = raw(n, alg)
    s = simplify(d)
    sched = schedule(s)
    F = dft_matrix(n)
    for obj in (d, s, sched, parse(unparse(sched), "neutral-source"), parse(unparse(sched, "dag-json"), "dag-json")):
        assert np.max(np.abs(extract_matrix(obj) - F)) <= 1e-13
    assert all(nd.const > 0 for nd in s.nodes if nd.kind == MULCONST)


@pytest.mark.parametrize("n", [2, 4, 8, 16])
def test_backward_sign(n):
    c = build_codelet(CodeletSpec("notw", n, "ct", +1))
    assert np.max(np.abs(extract_matrix(c) - dft_matrix(n, +1))) <= 1e-13


@pytest.mark.parametrize("n", [2, 3, 4, 5, 8])
def test_twiddle_kinds(n):
    w = np.exp(1j * np.arange(1, n + 1))
    F = dft_matrix(n)
    D = np.diag(np.r_[1, w[1:]])  # slot 0 is never twiddled
    pre = build_codelet(CodeletSpec("twiddle", n, "ct"))
    post = build_codelet(CodeletSpec("twiddle_dif", n, "ct"))
    assert np.max(np.abs(extract_matrix(pre, w) - F @ D)) <= 1e-13
    assert np.max(np.abs(extract_matrix(post, w) - D @ F)) <= 1e-13
    assert not pre.dag.is_linear
    with pytest.raises(ValueError):
        execute_codelet(pre, np.ones(n))


def test_transposed_network_is_conjugate_transpose_map():
    d = simplify(raw(8))
    t = transpose_network(d)
    assert np.max(np.abs(extract_matrix(t) - dft_matrix(8).T)) <= 1e-13


def test_batched_execution():
    c = build_codelet(CodeletSpec("notw", 8, "ct"))
    x = np.random.default_rng(0).standard_normal((8, 5)) + 0j
    np.testing.assert_allclose(execute_codelet(c, x), dft_matrix(8) @ x, atol=1e-13)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(cases()), st.integers(0, 2**32 - 1))
def test_codelet_linearity(case, seed):
    alg, n = case
    c = build_codelet(CodeletSpec("notw", n, alg))
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    np.testing.assert_allclose(execute_codelet(c, x), dft_matrix(n) @ x, atol=1e-12 * max(1, n))


# ---- schedule -----------------------------------------------------------------


@pytest.mark.parametrize("alg,n", [("ct", 16), ("splitradix", 32), ("splitradix", 64), ("rader", 13)])
def test_schedule_is_topological_and_no_worse_than_breadth(alg, n):
    d = simplify(raw(n, alg))
    s = schedule(d)
    assert is_topological(d, s.order)
    assert max_live(d, s.order) <= max_live(d, breadth_order(d))
    assert schedule(d).order == s.order  # deterministic


def test_schedule_rejects_nothing_valid_and_detects_bad_order():
    d = simplify(raw(4))
    assert not is_topological(d, tuple(reversed(range(len(d.nodes)))))


# ---- unparse --------------------------------------------------------------------


def test_source_header_and_round_trip_text():
    sched = build_codelet(CodeletSpec("notw", 4, "ct")).sched
    src = unparse(sched)
    assert src.startswith("/* codelet kind=notw n=4 alg=ct sign=-1 */")
    assert unparse(parse(src, "neutral-source")) == src
    doc = json.loads(unparse(sched, "dag-json"))
    assert doc["spec"]["n"] == 4


def test_unparse_errors():
    sched = build_codelet(CodeletSpec("notw", 2, "ct")).sched
    with pytest.raises(UnparseError):
        unparse(sched, "fortran")
    with pytest.raises(UnparseError):
        parse("T1 = T0 + T0;", "neutral-source")


# ---- creation errors and helpers ----------------------------------------------


def test_applicability():
    assert applicable("splitradix", 16) and not applicable("splitradix", 6)
    assert applicable("rader", 7) and not applicable("rader", 9)
    assert applicable("pfa", 15) and not applicable("pfa", 8)
    with pytest.raises(CreateError):
        create_dag(CodeletSpec("notw", 6, "splitradix"))
    with pytest.raises(ValueError):
        CodeletSpec("bogus", 4)
    with pytest.raises(ValueError):
        CodeletSpec("notw", 0)


def test_primitive_roots():
    assert primitive_root(5) == 2
    assert primitive_root(7) == 3
    assert primitive_root(13) == 2
