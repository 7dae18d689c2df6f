"""Ideal-cache model of FFT traversal orders: traces, simulator, recurrences."""

from .analytic import ceil_log, closed_Qb, recurrence_Q2, recurrence_Qo
from .report import CSV_FIELDS, CacheRecord, run, scaling_report, spread, write_csv
from .simulator import POLICIES, AccessTrace, IdealCache, next_use, simulate
from .traces import (
    STRATEGIES,
    make_trace,
    trace_breadth_first,
    trace_depth_first,
    trace_four_step,
)

__all__ = [
    "CSV_FIELDS",
    "POLICIES",
    "STRATEGIES",
    "AccessTrace",
    "CacheRecord",
    "IdealCache",
    "ceil_log",
    "closed_Qb",
    "make_trace",
    "next_use",
    "recurrence_Q2",
    "recurrence_Qo",
    "run",
    "scaling_report",
    "simulate",
    "spread",
    "trace_breadth_first",
    "trace_depth_first",
    "trace_four_step",
    "write_csv",
]
