"""Dynamic-programming planner with a signature-keyed memo and wisdom files.

For each normalized signature the planner enumerates the applicable plan
kinds, plans every child sub-problem recursively (memoized), and keeps the
cheapest candidate.  "Cheapest" is the smallest heuristic cost in estimate
mode and the smallest measured time in measure mode; ties go to the lower
heuristic cost, then the lexicographically smaller s-expression.
"""

from __future__ import annotations

import math
import re
import time
from dataclasses import dataclass, replace

import numpy as np

from .codegen.create import is_prime, prime_factors
from .plans import nodes as pn
from .plans.base import PlanError, loop_legal
from .plans.sexpr import SexprError, instantiate
from .problem import (
    DftProblem,
    FORWARD,
    ProblemError,
    Signature,
    extent,
    normalize_signature,
    parse_tensor,
    problem_normalize,
)

MODES = ("estimate", "measure", "wisdom-only")
WISDOM_HEADER = "# adaptfft wisdom v1"
SMALL_PRIMES = (2, 3, 5, 7, 11, 13)


class WisdomError(ValueError):
    """Malformed wisdom text; the message names the offending line."""


@dataclass(frozen=True)
class PlannerConfig:
    mode: str = "estimate"
    repetitions: int = 5
    min_time: float = 1e-3  # seconds per timing window
    seed: int = 0
    twiddle: str = "full"
    max_radices: int = 4  # radix beam; the hard cap is 8
    max_depth: int = 64
    generic_limit: int = 64  # largest size offered to the O(n^2) plan
    buffer_limit: int = 1 << 18  # largest scratch block, in elements
    loop_limit: int = 16  # longest vector offered as an explicit loop
    measure_top: int = 3  # candidates timed per signature in measure mode

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.twiddle not in pn.TWIDDLE_KINDS:
            raise ValueError(f"twiddle must be one of {pn.TWIDDLE_KINDS}")


@dataclass
class PlannerStats:
    timings: int = 0  # candidate plans actually timed
    memo_hits: int = 0
    memo_misses: int = 0
    candidates: int = 0

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def radix_candidates(n: int, limit: int = 8) -> list[int]:
    """Codelet-sized proper divisors, largest first, plus one near sqrt(n) for big n."""
    rs = sorted((r for r in pn.CODELET_SIZES if r < n and n % r == 0), reverse=True)[:limit]
    if n >= 1 << 14:
        s = math.isqrt(n - 1) + 1
        d = next((d for d in range(s, n) if n % d == 0), None)
        if d is not None and d < n and d not in rs:
            rs.append(d)
    return rs


def make_buffers(sig: Signature, seed: int = 0):
    """Scratch buffers (I, ib, O, ob) large enough for ``sig``, filled with noise."""
    dims = sig.N + sig.V
    ilo, ihi = extent(dims, "in")
    olo, ohi = extent(dims, "out")
    rng = np.random.default_rng(seed)
    if sig.inplace:
        lo, hi = min(ilo, olo), max(ihi, ohi)
        size = max(hi - lo + 1, 1)
        buf = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        return buf, -lo, buf, -lo
    isz, osz = max(ihi - ilo + 1, 1), max(ohi - olo + 1, 1)
    I = rng.standard_normal(isz) + 1j * rng.standard_normal(isz)
    O = np.zeros(osz, dtype=np.complex128)
    return I, -ilo, O, -olo


def time_plan(plan: pn.Plan, repetitions: int = 5, min_time: float = 1e-3, seed: int = 0) -> float:
    """Median seconds per execution; each sample repeats the plan until the window fills."""
    I, ib, O, ob = make_buffers(plan.sig, seed)
    reset = I.copy() if plan.sig.inplace else None
    plan.execute(I, ib, O, ob)  # warm caches and lazily built tables
    samples = []
    for _ in range(repetitions):
        calls, t0 = 0, time.perf_counter()
        while True:
            if reset is not None:
                np.copyto(I, reset)
            plan.execute(I, ib, O, ob)
            calls += 1
            el = time.perf_counter() - t0
            if el >= min_time:
                break
        samples.append(el / calls)
    return float(np.median(samples))


class Planner:
    def __init__(self, config: PlannerConfig | None = None, **kw):
        self.config = replace(config or PlannerConfig(), **kw)
        self.memo: dict[Signature, pn.Plan] = {}
        self.stats = PlannerStats()
        self._active: set[Signature] = set()
        self._estimator: Planner | None = None

    # -- public ----------------------------------------------------------
    def plan(self, target) -> pn.Plan:
        """Plan for a ``DftProblem`` or a ``Signature`` (normalized here)."""
        if isinstance(target, DftProblem):
            sig = problem_normalize(target).signature
        else:
            sig = normalize_signature(target)
        fresh = sig not in self.memo
        plan = self._plan(sig, 0)
        if plan is None:
            raise PlanError(f"no applicable plan for {sig}")
        if fresh and self.config.mode == "measure":
            plan = self._against_estimate(sig, plan)
        return plan

    def _against_estimate(self, sig: Signature, plan: pn.Plan) -> pn.Plan:
        # sub-plans timed in isolation can compose badly; the heuristic
        # winner for the whole problem is timed as one more candidate
        if self._estimator is None:
            self._estimator = Planner(replace(self.config, mode="estimate"))
        est = self._estimator.plan(sig)
        if est.sexpr() != plan.sexpr() and self.measure(est) < self.measure(plan):
            self._remember(est)
            return est
        return plan

    def plan_1d(self, n: int, sign: int = FORWARD, inplace: bool = False) -> pn.Plan:
        return self.plan(Signature(((n, 1, 1),), (), inplace, sign))

    def execute(self, problem: DftProblem, ctx=None) -> pn.Plan:
        plan = self.plan(problem)
        pn.apply(plan, problem, ctx)
        return plan

    def forget(self) -> None:
        self.memo.clear()

    # -- search ----------------------------------------------------------
    def _plan(self, sig: Signature, depth: int) -> pn.Plan | None:
        if sig in self.memo:
            self.stats.memo_hits += 1
            return self.memo[sig]
        self.stats.memo_misses += 1
        if self.config.mode == "wisdom-only":
            raise PlanError(f"no wisdom for {sig}")
        if depth > self.config.max_depth or sig in self._active:
            return None
        self._active.add(sig)
        try:
            best = self._choose(list(self._candidates(sig, depth)))
        finally:
            self._active.discard(sig)
        if best is not None:
            self.memo[sig] = best
        return best

    def _choose(self, cands: list[pn.Plan]) -> pn.Plan | None:
        if not cands:
            return None
        self.stats.candidates += len(cands)
        keyed = sorted(((p.cost(), p.sexpr(), p) for p in cands), key=lambda t: t[:2])
        if self.config.mode == "measure" and len(keyed) > 1:
            # only the heuristically most promising candidates are timed
            timed = [(self.measure(p), c, s, p) for c, s, p in keyed[: self.config.measure_top]]
            return min(timed, key=lambda t: t[:3])[3]
        return keyed[0][2]

    def measure(self, plan: pn.Plan) -> float:
        """Median over repetitions of the per-call time within a filled timing window."""
        self.stats.timings += 1
        return time_plan(plan, self.config.repetitions, self.config.min_time, self.config.seed)

    def _sub(self, sig: Signature, depth: int) -> pn.Plan:
        p = self._plan(normalize_signature(sig), depth + 1)
        if p is None:
            raise PlanError(f"no plan for sub-problem {sig}")
        return p

    def _candidates(self, sig: Signature, depth: int):
        """Yield every applicable plan for ``sig`` (children planned recursively)."""
        def attempt(build):
            try:
                return build()
            except PlanError:
                return None

        out = []
        N, V = sig.N, sig.V
        if not N:
            if pn.square_pair(sig) is not None:
                out.append(attempt(lambda: pn.TransposeSquare(sig)))
            out.append(attempt(lambda: pn.Copy(sig)))
            return [p for p in out if p is not None]

        # explicit loops over the outermost / innermost vector dim; leaves
        # already vectorize over V, so loops only pay off for short in-place
        # vectors of large transforms
        if sig.inplace and V and pn.vec_size(V) <= self.config.loop_limit and N[0].n > 64:
            for d in sorted({0, len(V) - 1}):
                if loop_legal(sig, d):
                    out.append(attempt(lambda d=d: pn.Loop(sig, d, self._sub(pn.Loop.child_signature(sig, d), depth))))

        if len(N) >= 2:
            out.append(attempt(lambda: pn.RankReduce(sig, [self._sub(s, depth) for s in pn.RankReduce.child_signatures(sig)])))
            return [p for p in out if p is not None]

        d0 = N[0]
        n = d0.n
        if n in pn.CODELET_SIZES:
            out.append(attempt(lambda: pn.Direct(sig)))
        in_equal = sig.inplace and sig.all_strides_equal
        if sig.inplace and not sig.all_strides_equal:
            out.append(attempt(lambda: pn.Indirect(sig, *(self._sub(s, depth) for s in pn.Indirect.child_signatures(sig)))))
        if n not in pn.CODELET_SIZES:
            for r in radix_candidates(n, self.config.max_radices):
                if not sig.inplace:
                    out.append(attempt(lambda r=r: self._dit(sig, r, depth)))
                else:
                    out.append(attempt(lambda r=r: self._dif(sig, r, depth)))
            if in_equal:
                out.extend(self._inplace_composites(sig, depth))
            if is_prime(n) and n > 2:
                out.append(attempt(lambda: pn.Rader(sig, self._sub(pn.Rader.child_signature(sig), depth))))
            if any(f not in SMALL_PRIMES for f in prime_factors(n)):
                m = pn.bluestein_length(n)
                out.append(attempt(lambda: pn.Bluestein(sig, m, self._sub(pn.Bluestein.child_signature(sig, m), depth))))
            if n <= self.config.generic_limit:
                out.append(attempt(lambda: pn.Generic(sig)))
        # contiguous scratch buffer when the data is strided or laid out awkwardly
        block = n * pn.vec_size(V)
        strided_n = abs(d0.istride) != 1 or abs(d0.ostride) != 1
        if not V and n not in pn.CODELET_SIZES and block <= self.config.buffer_limit and (strided_n or (sig.inplace and not sig.all_strides_equal)):
            bsig = normalize_signature(pn.Buffer.child_signature(sig))
            if bsig != sig:
                out.append(attempt(lambda: pn.Buffer(sig, self._sub(bsig, depth))))
        return [p for p in out if p is not None]

    def _dit(self, sig, r, depth):
        s1, s2 = pn.DIT.child_signatures(sig, r)
        c1 = self._sub(s1, depth)
        c2 = None if r in pn.CODELET_SIZES else self._sub(s2, depth)
        return pn.DIT(sig, r, c1, c2, self.config.twiddle)

    def _dif(self, sig, r, depth):
        _, sA, sB = pn.DIF.child_signatures(sig, r)
        cA = None if r in pn.CODELET_SIZES else self._sub(sA, depth)
        return pn.DIF(sig, r, cA, self._sub(sB, depth), self.config.twiddle)

    def _inplace_composites(self, sig, depth):
        n = sig.N[0].n
        out = []
        for p in pn.CODELET_SIZES:
            if n % (p * p) == 0 and n > p * p:
                m = n // (p * p)
                try:
                    _, sR, sC, _ = pn.InplaceComposite.child_signatures(sig, p, p, m)
                    out.append(pn.InplaceComposite(sig, p, p, m, self._sub(sR, depth), self._sub(sC, depth), self.config.twiddle))
                except PlanError:
                    pass
        return out

    # -- wisdom ----------------------------------------------------------
    def export_wisdom(self) -> str:
        """One line per memo entry, sorted; an empty memo exports as empty text."""
        if not self.memo:
            return ""
        lines = [WISDOM_HEADER]
        lines += sorted(f"{sig} := {plan.sexpr()}" for sig, plan in self.memo.items())
        return "\n".join(lines) + "\n"

    def import_wisdom(self, text: str) -> int:
        """Load plans from wisdom text; returns the number of entries read."""
        entries = parse_wisdom(text)
        for lineno, sig, sexpr in entries:
            try:
                plan = instantiate(sexpr, sig, self.config.twiddle)
            except PlanError as exc:
                raise WisdomError(f"line {lineno}: {exc}") from None
            self._remember(plan)
        return len(entries)

    def _remember(self, plan: pn.Plan) -> None:
        for node in plan.walk():
            if isinstance(node, pn.TwiddleCodelet):
                continue
            self.memo.setdefault(node.sig, node)
        self.memo[plan.sig] = plan


_WISDOM_LINE = re.compile(
    r"dft n=(\{[^}]*\}) v=(\{[^}]*\}) inplace=([01]) sign=(-1|1) := (.+)"
)


def parse_wisdom(text: str) -> list[tuple[int, Signature, str]]:
    """Parse wisdom text to (line number, signature, s-expression) triples."""
    from .plans.sexpr import parse as parse_sexpr

    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _WISDOM_LINE.fullmatch(line)
        if not m:
            raise WisdomError(f"line {lineno}: expected 'dft n=<dims> v=<dims> inplace=<0|1> sign=<-1|1> := <plan>', got {line!r}")
        try:
            sig = Signature(parse_tensor(m.group(1)), parse_tensor(m.group(2)), m.group(3) == "1", int(m.group(4)))
            parse_sexpr(m.group(5))
        except (ProblemError, SexprError) as exc:
            raise WisdomError(f"line {lineno}: {exc}") from None
        if normalize_signature(sig) != sig:
            raise WisdomError(f"line {lineno}: signature is not in normal form")
        out.append((lineno, sig, m.group(5)))
    return out


_DEFAULT: dict[str, Planner] = {}


def default_planner(mode: str = "estimate") -> Planner:
    """Shared per-mode planner used by the convenience functions."""
    if mode not in _DEFAULT:
        _DEFAULT[mode] = Planner(PlannerConfig(mode=mode))
    return _DEFAULT[mode]


def fft(x, sign: int = FORWARD, planner: Planner | None = None) -> np.ndarray:
    """Out-of-place 1-D DFT of ``x`` (unnormalized; ``sign=+1`` is the inverse)."""
    x = np.ascontiguousarray(x, dtype=np.complex128).reshape(-1)
    y = np.empty_like(x)
    p = DftProblem(((x.size, 1, 1),), (), x, y, 0, 0, sign)
    (planner or default_planner()).execute(p)
    return y


def ifft(x, planner: Planner | None = None) -> np.ndarray:
    """Normalized inverse, so ``ifft(fft(x)) == x``."""
    x = np.asarray(x)
    return fft(x, sign=1, planner=planner) / max(x.size, 1)


__all__ = [
    "MODES",
    "Planner",
    "PlannerConfig",
    "PlannerStats",
    "WisdomError",
    "default_planner",
    "fft",
    "ifft",
    "make_buffers",
    "parse_wisdom",
    "radix_candidates",
    "time_plan",
]
