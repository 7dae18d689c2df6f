"""Shared helpers: run a plan on noise-filled buffers and compare with the oracle."""

import numpy as np

from adaptfft.oracle import reference_dft
from adaptfft.plans import ExecContext
from adaptfft.plans.base import strided
from adaptfft.planner import make_buffers


def expected_output(sig, I, ib):
    """Reference result of ``sig`` on input buffer ``I``, shaped as N + V."""
    dims = sig.N + sig.V
    a = np.array(strided(I, ib, dims, "in"), dtype=np.complex128)
    for axis in range(len(sig.N)):
        a = np.apply_along_axis(lambda v: reference_dft(v, sig.sign), axis, a)
    return a


def run_and_compare(plan, seed=0, log=False):
    """Execute ``plan`` on fresh buffers; returns (max relative error, context)."""
    sig = plan.sig
    I, ib, O, ob = make_buffers(sig, seed)
    want = expected_output(sig, I, ib)
    ctx = ExecContext(log=log)
    plan.execute(I, ib, O, ob, ctx)
    got = strided(O, ob, sig.N + sig.V, "out")
    scale = max(np.max(np.abs(want)), 1.0) if want.size else 1.0
    err = float(np.max(np.abs(got - want)) / scale) if want.size else 0.0
    return err, ctx, O


# ---- acceptance report --------------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


def report(criterion: str, ok: bool, detail: str) -> None:
    """Record (and print) one acceptance line; pytest repeats them in its summary."""
    line = f"{'PASS' if ok else 'FAIL'}  {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
