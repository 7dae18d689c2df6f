"""Ideal-cache simulator, traversal traces and the analytic recurrences."""

import csv

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adaptfft.cachemodel import (
    CSV_FIELDS,
    STRATEGIES,
    IdealCache,
    ceil_log,
    closed_Qb,
    make_trace,
    recurrence_Q2,
    recurrence_Qo,
    run,
    scaling_report,
    simulate,
    spread,
    write_csv,
)
from adaptfft.cachemodel.traces import split_sqrt


def test_recurrence_hand_values():
    assert recurrence_Q2(8, 2) == 24
    assert recurrence_Qo(16, 4) == 48
    for n in (1, 2, 8, 64):
        assert recurrence_Q2(n, 64) == n == recurrence_Qo(n, 64)


def test_recurrence_frozen_values():
    assert recurrence_Q2(128, 64) == 256
    assert recurrence_Q2(4096, 64) == 28672
    assert recurrence_Qo(256, 64) == 768
    assert recurrence_Qo(4096, 64) == 12288
    assert recurrence_Qo(65536, 64) == 458752


def test_closed_bound():
    assert closed_Qb(4096, 64) == 8192
    assert closed_Qb(4097, 64) == 12291
    assert closed_Qb(10, 64) == 10
    assert ceil_log(1, 2) == 0 and ceil_log(9, 3) == 2 and ceil_log(10, 3) == 3


def test_analytic_argument_errors():
    with pytest.raises(ValueError):
        recurrence_Q2(12, 4)
    with pytest.raises(ValueError):
        recurrence_Qo(16, 3)
    with pytest.raises(ValueError):
        ceil_log(4, 1)


def test_cache_validation():
    with pytest.raises(ValueError):
        IdealCache(2, 4)
    with pytest.raises(ValueError):
        IdealCache(8, 4)  # not tall
    with pytest.raises(ValueError):
        IdealCache(16, 1, "fifo")
    assert IdealCache(16, 4).lines == 4


def test_opt_textbook_sequence():
    # capacity 2: a b c a b -> loading c evicts b (used last), then b misses again
    assert simulate(np.array([0, 1, 2, 0, 1]), IdealCache(2)) == 4
    # LRU on the same sequence thrashes
    assert simulate(np.array([0, 1, 2, 0, 1]), IdealCache(2, policy="lru")) == 5


def test_lines_group_addresses():
    assert simulate(np.arange(16), IdealCache(4, 2)) == 8


def test_trace_shapes():
    assert len(make_trace("bf", 16)) == 128
    assert len(make_trace("df", 16)) == 128
    assert len(make_trace("fourstep", 16)) == 224
    for s in STRATEGIES:
        assert make_trace(s, 64).distinct == 64
    assert split_sqrt(32) == (8, 4)
    with pytest.raises(ValueError):
        make_trace("bf", 12)
    with pytest.raises(ValueError):
        make_trace("zigzag", 16)


def test_small_cache_matches_recurrence():
    assert run("bf", 8, 2).misses == 24
    assert run("bf", 8, 2).accesses == 48


def test_everything_fits():
    for s in STRATEGIES:
        assert run(s, 64, 64).misses == 64


def test_frozen_miss_counts():
    assert [run(s, 256, 64).misses for s in STRATEGIES] == [1600, 579, 712]
    assert [run(s, 1024, 64).misses for s in STRATEGIES] == [9664, 4175, 3567]


def test_ordering_at_4096():
    bf, df, fs = (run(s, 4096, 64).misses for s in STRATEGIES)
    assert bf >= 1.5 * df
    assert df >= 1.5 * fs


def test_scaling_ratios():
    recs = scaling_report("bf", [1024, 2048, 4096], 64)
    assert spread(r.q_per_nlg_n_over_z for r in recs) < 2
    assert spread([1.0, 1.5]) == 1.5


def test_csv(tmp_path):
    path = tmp_path / "c.csv"
    write_csv(path, [run("df", 64, 8)])
    rows = list(csv.DictReader(open(path)))
    assert tuple(rows[0]) == CSV_FIELDS
    assert rows[0]["strategy"] == "df"
    write_csv(tmp_path / "s.csv", [run("df", 64, 8)], scaling=True)
    assert "q_per_nlogz_n" in open(tmp_path / "s.csv").readline()


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 20), min_size=1, max_size=200), st.integers(1, 8))
def test_opt_never_worse_than_lru(seq, z):
    a = np.array(seq)
    opt = simulate(a, IdealCache(z))
    lru = simulate(a, IdealCache(z, policy="lru"))
    assert np.unique(a).size <= opt <= lru <= a.size


@settings(max_examples=20, deadline=None)
@given(st.lists(st.integers(0, 12), min_size=1, max_size=60), st.integers(1, 5))
def test_opt_matches_brute_force(seq, z):
    assert simulate(np.array(seq), IdealCache(z)) == _belady(seq, z)


def _belady(seq, z):
    cache, misses = set(), 0
    for i, a in enumerate(seq):
        if a in cache:
            continue
        misses += 1
        if len(cache) >= z:
            rest = seq[i + 1 :]
            victim = max(cache, key=lambda c: rest.index(c) if c in rest else len(rest) + 1)
            cache.discard(victim)
        cache.add(a)
    return misses
