"""Exhaustive reference optimiser for small scenarios.

Deliberately independent of :mod:`sosarch.constraints` and
:mod:`sosarch.objectives`: it reads the raw scenario fields, rebuilds the
pair ordering itself and evaluates every bitstring with plain loops.  Tests
use it to cross-check the vectorised evaluation and to bound the GA.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import TooLarge
from .genome import Genome, GenomeLayout
from .scenario import Scenario

MAX_BITS = 24
_TOL = 1e-9
_EPS = 1e-3


@dataclass
class OracleResult:
    optimum_fitness: float | None
    optimum_genomes: list[Genome] = field(default_factory=list)
    feasible_count: int = 0
    total_count: int = 0

    @property
    def status(self) -> str:
        return "ok" if self.feasible_count else "no_feasible"


class _Model:
    def __init__(self, s: Scenario):
        n = len(s.systems)
        self.n = n
        pairs = []
        for j in range(n):
            for jp in range(j + 1, n):
                pairs.append((j, jp))
        self.pairs = pairs
        self.T = n + len(pairs)
        pos_of = {p: n + k for k, p in enumerate(pairs)}
        iface_pos = {iface.id: pos_of[(iface.endpoints[0] - 1, iface.endpoints[1] - 1)]
                     for iface in s.interfaces}
        self.caps = []
        used_sys, used_pos = set(), set()
        for c in s.capabilities:
            sys = [(j - 1, a.cost, a.duration, a.performance) for j, a in c.system_candidates.items()]
            ifs = []
            for k, a in c.interface_candidates.items():
                pos = iface_pos[k]
                j, jp = pairs[pos - n]
                ifs.append((pos, j, jp, a.cost, a.duration, a.performance))
                used_pos.add(pos)
            used_sys.update(x[0] for x in sys)
            self.caps.append((c.budget, c.deadline, c.performance_floor, sys, ifs))
        self.used_sys = used_sys
        self.used_pos = used_pos
        self.total_constraints = 6 * len(self.caps) + n + 2 * len(pairs)
        perfs = [x[3] for c in self.caps for x in c[3]] + [x[5] for c in self.caps for x in c[4]]
        self.p_ref = max(perfs)
        self.f_lb = sum(min(x[1] for x in c[3]) for c in self.caps)
        self.t_exp = s.expected_duration

    def measure(self, bits, stop_early=False):
        """Returns (violations, per-capability [(perf, cost, dur)])."""
        n = self.n
        v = 0
        metrics = []
        for budget, deadline, floor, sys, ifs in self.caps:
            cost = 0.0
            d_sys = d_if = p_sys = p_if = 0.0
            any_sys = False
            for j, f, d, p in sys:
                if bits[j]:
                    any_sys = True
                    cost += f
                    if d > d_sys:
                        d_sys = d
                    if p > p_sys:
                        p_sys = p
            for pos, j, jp, f, d, p in ifs:
                if bits[pos] and bits[j] and bits[jp]:
                    cost += f
                    if d > d_if:
                        d_if = d
                    if p > p_if:
                        p_if = p
            if cost > budget + _TOL:
                v += 1
            if d_sys > deadline + _TOL:
                v += 1
            if d_if > deadline + _TOL:
                v += 1
            if p_sys < floor - _TOL:
                v += 1
            if ifs and p_if < floor - _TOL:
                v += 1
            if not any_sys:
                v += 1
            if stop_early and v:
                return v, None
            metrics.append((max(p_sys, p_if), cost, max(d_sys, d_if)))
        for j in range(n):
            if bits[j] and j not in self.used_sys:
                v += 1
        for k, (j, jp) in enumerate(self.pairs):
            pos = n + k
            if bits[pos]:
                if pos not in self.used_pos:
                    v += 1
                if not (bits[j] and bits[jp]):
                    v += 1
            if stop_early and v:
                return v, None
        return v, metrics

    def score(self, metrics, w, perf_aggregate):
        perfs = [m[0] for m in metrics]
        p = max(perfs) if perf_aggregate == "max" else min(perfs)
        f = sum(m[1] for m in metrics)
        d = max(m[2] for m in metrics)
        p_hat = min(max(p / self.p_ref, 0.0), 1.0)
        f_hat = 1.0 if f <= 0 else min(self.f_lb / f, 1.0)
        d_hat = min(max((self.t_exp - d) / self.t_exp, 0.0), 1.0)
        return max(w.w_p * p_hat + w.w_f * f_hat + w.w_d * d_hat, _EPS)


def _bits_of(index: int, T: int) -> list[int]:
    return [(index >> (T - 1 - t)) & 1 for t in range(T)]


def evaluate(s: Scenario, bits, w, perf_aggregate: str = "max") -> tuple[bool, float]:
    """Independent (feasible, fitness) for one bit sequence."""
    m = _Model(s)
    bits = [int(b) for b in bits]
    v, metrics = m.measure(bits)
    if v:
        return False, _EPS * (1.0 - v / m.total_constraints)
    return True, m.score(metrics, w, perf_aggregate)


def evaluate_all(s: Scenario, w, perf_aggregate: str = "max"):
    """Yield ``(bits, feasible, fitness)`` for every bitstring in index order."""
    m = _Model(s)
    if m.T > MAX_BITS:
        raise TooLarge(f"{m.T} bits exceeds the oracle cap of {MAX_BITS}")
    for idx in range(1 << m.T):
        bits = _bits_of(idx, m.T)
        v, metrics = m.measure(bits)
        if v:
            yield bits, False, _EPS * (1.0 - v / m.total_constraints)
        else:
            yield bits, True, m.score(metrics, w, perf_aggregate)


def enumerate_optimum(s: Scenario, w, perf_aggregate: str = "max") -> OracleResult:
    """Best fitness over all feasible genomes, with every genome attaining it."""
    m = _Model(s)
    if m.T > MAX_BITS:
        raise TooLarge(f"{m.T} bits exceeds the oracle cap of {MAX_BITS}")
    best = None
    arg = []
    feasible = 0
    for idx in range(1 << m.T):
        bits = _bits_of(idx, m.T)
        v, metrics = m.measure(bits, stop_early=True)
        if v:
            continue
        feasible += 1
        f = m.score(metrics, w, perf_aggregate)
        if best is None or f > best:
            best, arg = f, [bits]
        elif f == best:
            arg.append(bits)
    layout = GenomeLayout(m.n)
    return OracleResult(best, [Genome(layout, b) for b in arg], feasible, 1 << m.T)
