"""Randomized O(n log n) self-test for a claimed DFT implementation.

Three checks, each repeated ``trials`` times on fresh random data:

* linearity: ``F(a x + b y) == a F(x) + b F(y)``
* impulse: ``F(delta_j)[k] == w^(j k)`` for a random position ``j``
* time shift: ``F(roll(x, 1))[k] == w^k F(x)[k]``

None of them needs a reference transform; together they pin down the DFT
up to rounding.  A check passes when its relative L2 residual stays within
``tolerance(n)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .oracle import FORWARD, rel_l2_error, roots_of_unity, tolerance


@dataclass
class SelfTestReport:
    n: int
    trials: int
    threshold: float
    worst: dict = field(default_factory=dict)  # check name -> worst residual
    failures: list = field(default_factory=list)  # (check, trial, residual)

    @property
    def passed(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        parts = [f"{k}={v:.3g}" for k, v in sorted(self.worst.items())]
        status = "PASS" if self.passed else f"FAIL ({len(self.failures)} failed checks)"
        return f"selftest n={self.n} trials={self.trials} threshold={self.threshold:.3g}: {status} " + " ".join(parts)


def _random_complex(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def self_test(
    transform: Callable[[np.ndarray], np.ndarray],
    n: int,
    trials: int = 20,
    rng: np.random.Generator | int | None = 0,
    sign: int = FORWARD,
) -> SelfTestReport:
    """Run the three randomized checks against ``transform`` (a length-n map)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(rng)
    thr = tolerance(n)
    report = SelfTestReport(n, trials, thr, {"linearity": 0.0, "impulse": 0.0, "shift": 0.0})
    ramp = roots_of_unity(n, sign)
    k = np.arange(n)

    def record(name, trial, res):
        report.worst[name] = max(report.worst[name], res)
        if not res <= thr:  # also catches NaN
            report.failures.append((name, trial, res))

    def F(v):
        return np.asarray(transform(v.copy()), dtype=np.complex128)

    for t in range(trials):
        x = _random_complex(rng, n)
        y = _random_complex(rng, n)
        a, b = _random_complex(rng, 2)
        fx, fy = F(x), F(y)
        lhs = F(a * x + b * y)
        rhs = a * fx + b * fy
        # normalise by the size of the combined output so that cancellation does not inflate
        scale = max(np.linalg.norm(a * fx), np.linalg.norm(b * fy), np.linalg.norm(rhs))
        record("linearity", t, float(np.linalg.norm(lhs - rhs) / scale) if scale else 0.0)

        j = int(rng.integers(n))
        delta = np.zeros(n, dtype=np.complex128)
        delta[j] = 1.0
        record("impulse", t, rel_l2_error(F(delta), ramp[(j * k) % n]))

        record("shift", t, rel_l2_error(F(np.roll(x, 1)), ramp * fx))
    return report
