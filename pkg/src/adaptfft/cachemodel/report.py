"""Miss-count tables and their CSV form."""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass
from typing import Iterable

from .simulator import IdealCache, simulate
from .traces import make_trace

CSV_FIELDS = ("n", "strategy", "Z", "L", "policy", "misses", "accesses")
SCALING_FIELDS = CSV_FIELDS + ("q_per_nlgn", "q_per_nlg_n_over_z", "q_per_nlogz_n")


@dataclass(frozen=True)
class CacheRecord:
    n: int
    strategy: str
    Z: int
    L: int
    policy: str
    misses: int
    accesses: int

    @property
    def q_per_nlgn(self) -> float:
        return self.misses / (self.n * math.log2(self.n))

    @property
    def q_per_nlg_n_over_z(self) -> float:
        r = self.n / self.Z
        return self.misses / (self.n * math.log2(r)) if r > 1 else math.nan

    @property
    def q_per_nlogz_n(self) -> float:
        return self.misses / (self.n * math.log(self.n, self.Z))

    def row(self, scaling: bool = False) -> dict:
        d = asdict(self)
        if scaling:
            d.update(
                q_per_nlgn=self.q_per_nlgn,
                q_per_nlg_n_over_z=self.q_per_nlg_n_over_z,
                q_per_nlogz_n=self.q_per_nlogz_n,
            )
        return d


def run(strategy: str, n: int, Z: int, L: int = 1, policy: str = "opt") -> CacheRecord:
    cache = IdealCache(Z, L, policy)
    trace = make_trace(strategy, n)
    return CacheRecord(n, strategy, Z, L, policy, simulate(trace, cache), len(trace))


def scaling_report(strategy: str, ns: Iterable[int], Z: int, L: int = 1, policy: str = "opt") -> list[CacheRecord]:
    return [run(strategy, n, Z, L, policy) for n in ns]


def spread(values: Iterable[float]) -> float:
    """max/min of a set of positive ratios."""
    v = [x for x in values if x == x]
    return max(v) / min(v)


def write_csv(path, records: Iterable[CacheRecord], scaling: bool = False) -> None:
    fields = SCALING_FIELDS if scaling else CSV_FIELDS
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for r in records:
            w.writerow(r.row(scaling))
