"""Planner search, memoization, measurement and wisdom."""

import numpy as np
import pytest
from conftest import run_and_compare
from hypothesis import given, settings
from hypothesis import strategies as st

from adaptfft.oracle import naive_dft, rel_l2_error
from adaptfft.planner import (
    WISDOM_HEADER,
    Planner,
    PlannerConfig,
    WisdomError,
    fft,
    ifft,
    parse_wisdom,
    radix_candidates,
)
from adaptfft.plans import PlanError
from adaptfft.problem import DftProblem, Signature


def test_radix_candidates():
    assert radix_candidates(3600, 4) == [16, 8, 5, 4]
    assert radix_candidates(1 << 16, 4) == [64, 32, 16, 8, 256]
    assert radix_candidates(97, 4) == []


def test_trivial_and_leaf_plans():
    p = Planner()
    assert p.plan_1d(1).sexpr() == "(copy)"
    assert p.plan_1d(16).sexpr() == "(direct 16)"
    assert p.plan_1d(97).kind == "rader"
    assert p.plan_1d(30).cost() == 1089.0


def test_estimate_never_times_and_memo_hits():
    p = Planner(PlannerConfig(mode="estimate"))
    a = p.plan_1d(4096)
    assert p.stats.timings == 0
    hits = p.stats.memo_hits
    assert p.plan_1d(4096) is a
    assert p.stats.memo_hits == hits + 1


def test_planning_is_deterministic():
    assert Planner().plan_1d(3600).sexpr() == Planner().plan_1d(3600).sexpr()


def test_measure_mode_times_candidates():
    p = Planner(PlannerConfig(mode="measure", repetitions=1, min_time=1e-5))
    plan = p.plan_1d(256)
    assert p.stats.timings > 0
    err, _, _ = run_and_compare(plan)
    assert err <= 1e-13


def test_config_validation():
    with pytest.raises(ValueError):
        PlannerConfig(mode="exhaustive")
    with pytest.raises(ValueError):
        PlannerConfig(twiddle="cordic")


# ---- wisdom -------------------------------------------------------------------


def test_empty_export():
    assert Planner().export_wisdom() == ""


def test_wisdom_small_example():
    p = Planner()
    p.plan_1d(4)
    assert p.export_wisdom() == f"{WISDOM_HEADER}\ndft n={{4:1:1}} v={{}} inplace=0 sign=-1 := (direct 4)\n"


def test_wisdom_round_trip_is_byte_identical_and_suppresses_timing():
    src = Planner(PlannerConfig(mode="measure", repetitions=1, min_time=1e-5))
    src.plan_1d(1024)
    text = src.export_wisdom()
    dst = Planner(PlannerConfig(mode="measure"))
    assert dst.import_wisdom(text) == len(text.splitlines()) - 1
    assert dst.export_wisdom() == text
    plan = dst.plan_1d(1024)
    assert dst.stats.timings == 0
    assert plan.sexpr() == src.plan_1d(1024).sexpr()


def test_wisdom_only_mode():
    src = Planner()
    src.plan_1d(64)
    dst = Planner(PlannerConfig(mode="wisdom-only"))
    dst.import_wisdom(src.export_wisdom())
    assert dst.plan_1d(64).sexpr() == src.plan_1d(64).sexpr()
    with pytest.raises(PlanError):
        dst.plan_1d(128)


@pytest.mark.parametrize(
    "text",
    [
        "dft n={8:1:1} v={} inplace=0 sign=-1 := (dit",
        "dft n={8:1:1} v={} inplace=0 sign=-1 := (direct 4)",
        "dft n={8:1:1} v={} inplace=2 sign=-1 := (direct 8)",
        "dft n={8:1} v={} inplace=0 sign=-1 := (direct 8)",
        "dft n={8:1:1} v={1:8:8} inplace=0 sign=-1 := (direct 8)",
        "garbage",
    ],
)
def test_wisdom_errors_name_the_line(text):
    with pytest.raises(WisdomError, match=r"line 2"):
        Planner().import_wisdom(f"{WISDOM_HEADER}\n{text}\n")


def test_parse_wisdom_skips_comments_and_blanks():
    text = "# note\n\ndft n={2:1:1} v={} inplace=0 sign=1 := (direct 2)\n"
    ((lineno, s, sexpr),) = parse_wisdom(text)
    assert lineno == 3 and s.sign == 1 and sexpr == "(direct 2)"


# ---- convenience and correctness ---------------------------------------------------


def test_fft_and_ifft():
    x = np.random.default_rng(0).standard_normal(60) + 0j
    assert rel_l2_error(fft(x), naive_dft(x)) <= 1e-14
    assert rel_l2_error(ifft(fft(x)), x) <= 1e-14


def test_execute_checks_problem():
    x = np.zeros(8, complex)
    p = Planner()
    with pytest.raises(Exception):
        p.execute(DftProblem(((8, 2, 1),), (), x, x.copy()))


@pytest.mark.parametrize("n", [1, 2, 6, 12, 15, 17, 49, 97, 101, 120, 210, 243, 1000])
@pytest.mark.parametrize("inplace", [False, True])
def test_planned_sizes(n, inplace):
    plan = Planner().plan_1d(n, inplace=inplace)
    err, ctx, O = run_and_compare(plan, log=inplace)
    assert err <= 1e-13
    if inplace:
        assert ctx.first_access_violations(O).size == 0


@st.composite
def problems(draw):
    n = draw(st.integers(1, 40))
    batch = draw(st.integers(1, 4))
    inplace = draw(st.booleans())
    sign = draw(st.sampled_from([-1, 1]))
    if inplace:
        stride = draw(st.integers(1, 3))
        N = ((n, stride, stride),)
        V = ((batch, n * stride, n * stride),)
    else:
        is_, os_ = draw(st.integers(1, 3)), draw(st.integers(1, 3))
        N = ((n, is_, os_),)
        V = ((batch, n * is_, n * os_),)
        if draw(st.booleans()):  # transforms interleaved instead of contiguous
            N = ((n, batch * is_, batch * os_),)
            V = ((batch, is_, os_),)
    return Signature(N, V, inplace, sign)


@settings(max_examples=40, deadline=None)
@given(problems())
def test_random_strided_problems(s):
    plan = Planner().plan(s)
    err, _, _ = run_and_compare(plan)
    assert err <= 1e-13
