"""Plan nodes: semantics on strided buffers, costs and the s-expression syntax."""

import numpy as np
import pytest
from conftest import run_and_compare

from adaptfft.planner import make_buffers
from adaptfft.plans import (
    DIT,
    Copy,
    Direct,
    Indirect,
    Loop,
    PlanError,
    estimate_cost,
    format_tree,
    instantiate,
    parse,
)
from adaptfft.plans.nodes import bluestein_length, twiddle_table, _rader_tables
from adaptfft.plans.sexpr import SexprError
from adaptfft.problem import IoDim, Signature

TOL = 1e-13


def sig(N, V=(), inplace=False, sign=-1):
    return Signature(N, V, inplace, sign)


def check(text, s, **kw):
    plan = instantiate(text, s)
    assert plan.sexpr() == " ".join(text.split())
    err, ctx, _ = run_and_compare(plan, **kw)
    assert err <= TOL, (text, err)
    return plan, ctx


# ---- data motion ------------------------------------------------------------


def test_copy_reverses_stride():
    s = sig((), ((4, 1, -1),))
    plan = instantiate("(copy)", s)
    I = np.arange(4, dtype=complex)
    O = np.zeros(4, complex)
    plan.execute(I, 0, O, 3)
    np.testing.assert_array_equal(O, [3, 2, 1, 0])


def test_copy_in_place_with_equal_strides_is_a_noop_and_rank_check():
    check("(copy)", sig((), ((5, 1, 1),), True))
    with pytest.raises(PlanError):
        Copy(sig(((4, 1, 1),)))


def test_copy_in_place_permutation_goes_through_temporary():
    check("(copy)", sig((), ((3, 1, 3), (3, 3, 1)), True))


def test_transpose_2x2_hand_example():
    s = sig((), ((2, 1, 2), (2, 2, 1)), True)
    plan = instantiate("(transposq 2)", s)
    A = np.array([1, 2, 3, 4], complex)
    plan.execute(A, 0, A, 0)
    np.testing.assert_array_equal(A, [1, 3, 2, 4])


@pytest.mark.parametrize("n", [3, 16, 19])
def test_transpose_square(n):
    check(f"(transposq {n})", sig((), ((n, 1, n), (n, n, 1)), True))


def test_transpose_with_batch_dim():
    check("(transposq 4)", sig((), ((3, 16, 16), (4, 1, 4), (4, 4, 1)), True))


def test_transpose_size_mismatch():
    with pytest.raises(PlanError):
        instantiate("(transposq 5)", sig((), ((4, 1, 4), (4, 4, 1)), True))


# ---- leaves ------------------------------------------------------------------


@pytest.mark.parametrize("n", [2, 3, 4, 5, 7, 8, 11, 13, 16, 32, 64])
def test_direct_strided_batched(n):
    check(f"(direct {n})", sig(((n, 3, 2),), ((4, 1, 2 * n),)))


def test_direct_backward_and_rank2_batch():
    check("(direct 8)", sig(((8, 1, 1),), ((2, 8, 8), (3, 16, 16)), sign=1))


@pytest.mark.parametrize("n", [6, 9, 17])
def test_generic(n):
    check(f"(generic {n})", sig(((n, 1, 1),), ((2, n, n),)))


def test_leaf_size_mismatch():
    with pytest.raises(PlanError):
        instantiate("(direct 4)", sig(((8, 1, 1),)))
    with pytest.raises(PlanError):
        instantiate("(directtw 4)", sig(((4, 1, 1),)))


# ---- loops and indirection -------------------------------------------------


def test_loop_runs_each_offset():
    s = sig(((8, 1, 1),), ((3, 8, 8),), True)
    plan, ctx = check("(loop 0 (direct 8))", s, log=True)
    starts = [int(a.min()) for op, _, a in ctx.events if op == "r"]
    assert starts == [0, 8, 16]


def test_loop_rejects_overwriting_order():
    s = sig(((2, 1, 2),), ((2, 2, 1),), True)  # iteration 0 writes iteration 1's input
    with pytest.raises(PlanError):
        Loop(s, 0, Direct(Loop.child_signature(s, 0)))


def test_depth_first_equals_breadth_first():
    n = 64
    s = sig(((n, 1, 1),))
    bf = instantiate("(dit 4 (direct 16) (directtw 4))", s)
    df = instantiate("(dit 4 (loop 0 (direct 16)) (directtw 4))", s)
    I, ib, O1, ob = make_buffers(s, 3)
    O2 = O1.copy()
    bf.execute(I, ib, O1, ob)
    df.execute(I, ib, O2, ob)
    assert np.max(np.abs(O1 - O2)) <= TOL * np.max(np.abs(O1))


def test_indirect_out_of_place():
    check("(indirect (copy) (direct 8))", sig(((8, 2, 1),), ((3, 1, 8),)))


def test_indirect_in_place_strided():
    s = sig(((4, 1, 4), (4, 4, 1)), (), True)
    check("(indirect (copy) (rankreduce (direct 4) (direct 4)))", s)


def test_indirect_child_signatures():
    s = sig(((8, 2, 1),), ((3, 1, 8),))
    s1, s2 = Indirect.child_signatures(s)
    assert s1.N == () and s2.inplace and s2.N == (IoDim(8, 1, 1),)


def test_buffer_block():
    s = sig(((32, 2, 2),), ((2, 1, 1),), True)
    plan, _ = check("(buffer 64 (dit 4 (direct 8) (directtw 4)))", s)
    assert plan.block == 64
    with pytest.raises(PlanError):
        instantiate("(buffer 32 (dit 4 (direct 8) (directtw 4)))", s)


def test_rankreduce_square_and_rectangular():
    check("(rankreduce (direct 4) (direct 4))", sig(((4, 4, 4), (4, 1, 1))))
    check("(rankreduce (direct 2) (direct 3))", sig(((2, 3, 3), (3, 1, 1))))
    check("(rankreduce (direct 2) (direct 3))", sig(((2, 3, 3), (3, 1, 1)), (), True))
    with pytest.raises(PlanError):
        instantiate("(rankreduce (direct 4))", sig(((4, 4, 4), (4, 1, 1))))


# ---- composites ----------------------------------------------------------------


@pytest.mark.parametrize(
    "n,text",
    [
        (30, "(dit 5 (dit 3 (direct 2) (directtw 3)) (directtw 5))"),
        (64, "(dit 8 (direct 8) (directtw 8))"),
        (64, "(dit 4 (direct 16) (loop 0 (direct 4)))"),
        (97, "(rader 97 (dit 3 (dit 4 (direct 8) (directtw 4)) (directtw 3)))"),
        (101, "(bluestein 101 256 (dit 4 (dit 8 (direct 8) (directtw 8)) (directtw 4)))"),
    ],
)
def test_out_of_place_composites(n, text):
    check(text, sig(((n, 1, 1),)))


@pytest.mark.parametrize("sign", [-1, 1])
def test_bluestein_small_both_signs(sign):
    check("(bluestein 7 16 (direct 16))", sig(((7, 1, 1),), sign=sign))


def test_dif_in_and_out_of_place():
    check("(dif 2 (directtw 2) (direct 3))", sig(((6, 1, 1),), (), True))
    check("(dif 2 (directtw 2) (direct 3))", sig(((6, 1, 1),)))


@pytest.mark.parametrize(
    "n,text",
    [
        (4, "(inplace 2 2 1 (directtw 2) (transposq 2) (copy) (directtw 2))"),
        (16, "(inplace 2 2 4 (directtw 2) (transposq 2) (direct 4) (directtw 2))"),
        (16, "(inplace 4 4 1 (directtw 4) (transposq 4) (copy) (directtw 4))"),
        (64, "(inplace 4 4 4 (directtw 4) (transposq 4) (direct 4) (directtw 4))"),
        (64, "(inplace 8 8 1 (directtw 8) (transposq 8) (copy) (directtw 8))"),
    ],
)
def test_inplace_composite(n, text):
    s = sig(((n, 1, 1),), (), True)
    try:
        plan = instantiate(text, s)
    except PlanError as exc:  # some degenerate child shapes normalize away
        pytest.skip(str(exc))
    err, ctx, O = run_and_compare(plan, log=True)
    assert err <= TOL
    assert ctx.first_access_violations(O).size == 0


def test_inplace_rejects_rectangular():
    s = sig(((32, 1, 1),), (), True)
    with pytest.raises(PlanError):
        instantiate("(inplace 2 4 4 (directtw 4) (transposq 2) (direct 4) (directtw 2))", s)


def test_explicit_twiddle_kinds():
    for kind in ("twotable", "rec-improved"):
        plan = instantiate("(dit 8 (direct 8) (directtw 8))", sig(((64, 1, 1),)), twiddle=kind)
        err, _, _ = run_and_compare(plan)
        assert err <= 1e-12


# ---- tables and costs ------------------------------------------------------------


def test_frozen_tables():
    np.testing.assert_allclose(twiddle_table("full", 4, 2, 2, -1), [[1, 1], [1, -1j]], atol=1e-16)
    assert bluestein_length(7) == 16
    assert bluestein_length(101) == 256
    g, perm = _rader_tables(7, -1)[:2]
    assert g == 3
    assert list(perm) == [1, 3, 2, 6, 4, 5]


def test_costs():
    s4 = sig(((4, 1, 1),))
    assert estimate_cost(instantiate("(direct 4)", s4)) == 32.0
    s30 = sig(((30, 1, 1),))
    assert estimate_cost(instantiate("(dit 2 (dit 3 (direct 5) (directtw 3)) (directtw 2))", s30)) == 1089.0
    loop = instantiate("(loop 0 (direct 8))", sig(((8, 1, 1),), ((3, 8, 8),), True))
    assert loop.cost() == 3 * loop.children[0].cost() + 16
    # fused twiddles are cheaper than a separate multiply pass
    fused = instantiate("(dit 8 (direct 8) (directtw 8))", sig(((64, 1, 1),)))
    split = instantiate("(dit 8 (direct 8) (loop 0 (direct 8)))", sig(((64, 1, 1),)))
    assert fused.cost() < split.cost()


def test_dit_child_signatures():
    s1, s2 = DIT.child_signatures(sig(((12, 1, 1),)), 3)
    assert s1.N == (IoDim(4, 3, 1),) and s1.V == (IoDim(3, 1, 4),)
    assert s2.inplace and s2.N == (IoDim(3, 4, 4),)


def test_plans_are_immutable():
    p = instantiate("(direct 4)", sig(((4, 1, 1),)))
    with pytest.raises(AttributeError):
        p.sig = None


# ---- s-expressions -------------------------------------------------------------------


@pytest.mark.parametrize(
    "text",
    [
        "(copy)",
        "(direct 8)",
        "(dit 4 (direct 16) (directtw 4))",
        "(inplace 4 4 4 (directtw 4) (transposq 4) (direct 4) (directtw 4))",
        "(rankreduce (direct 2) (direct 3))",
    ],
)
def test_sexpr_round_trip(text):
    assert format_tree(parse(text)) == text
    assert format_tree(parse("  " + text.replace(" ", "\n ") + " ")) == text


@pytest.mark.parametrize(
    "bad",
    ["", "(dit", "(dit 4 (direct 16))", "(warp 3)", "(direct x)", "(direct 4) extra", "direct 4", "(copy 1)"],
)
def test_sexpr_errors(bad):
    with pytest.raises(SexprError):
        parse(bad)
