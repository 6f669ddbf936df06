"""Performance / cost / duration objectives and the scalar fitness.

Each objective is mapped to ``[0, 1]`` with larger meaning better:

* performance ``p / P_ref`` with ``P_ref`` the best performance attribute
  anywhere in the scenario;
* cost ``F_lb / f`` with ``F_lb`` the sum over capabilities of the cheapest
  candidate system (a lower bound on any feasible total cost);
* duration ``(T_exp - d) / T_exp`` clamped at 0 for builds that overrun the
  expected construction time.

Feasible genomes score the weighted sum (floored at ``EPSILON``); infeasible
ones score ``EPSILON * (1 - violations / total_constraints)``, so every
feasible genome outranks every infeasible one and all fitness values stay
strictly positive for roulette selection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constraints import evaluate_batch, total_constraints
from .errors import DegenerateScenario, InfeasibleGenome, NoFeasibleWeights, ValidationError, WeightError
from .genome import Genome
from .scenario import Scenario

EPSILON = 1e-3
PERF_AGGREGATES = ("max", "min")


@dataclass(frozen=True)
class ObjectiveVector:
    p_sos: float
    f_sos: float
    d_sos: float


@dataclass(frozen=True)
class CapabilityMetrics:
    performance: float
    cost: float
    duration: float


@dataclass(frozen=True)
class WeightIntervals:
    perf: tuple[float, float]
    cost: tuple[float, float]
    dur: tuple[float, float]

    def __post_init__(self):
        problems = []
        for name, (lo, hi) in self.items():
            if not 0.0 <= lo <= hi <= 1.0:
                problems.append(f"{name} interval [{lo}, {hi}] must satisfy 0 <= lower <= upper <= 1")
        if sum(self.lower) >= 1.0:
            problems.append("sum of lower weight bounds must be < 1")
        if sum(self.upper) <= 1.0:
            problems.append("sum of upper weight bounds must be > 1")
        if problems:
            raise ValidationError(problems)

    def items(self):
        return (("perf", self.perf), ("cost", self.cost), ("dur", self.dur))

    @property
    def lower(self) -> np.ndarray:
        return np.array([self.perf[0], self.cost[0], self.dur[0]], dtype=float)

    @property
    def upper(self) -> np.ndarray:
        return np.array([self.perf[1], self.cost[1], self.dur[1]], dtype=float)

    @classmethod
    def parse(cls, text: str) -> "WeightIntervals":
        """Parse ``"lo:hi,lo:hi,lo:hi"`` (performance, cost, duration)."""
        try:
            parts = [tuple(float(x) for x in chunk.split(":")) for chunk in text.split(",")]
            if len(parts) != 3 or any(len(p) != 2 for p in parts):
                raise ValueError
        except ValueError:
            raise ValidationError(f"weight intervals must look like 0.2:0.5,0.2:0.5,0.2:0.5, got {text!r}")
        return cls(*parts)


@dataclass(frozen=True)
class FitnessWeights:
    w_p: float
    w_f: float
    w_d: float

    def __post_init__(self):
        w = self.as_array()
        if not np.all(np.isfinite(w)) or np.any(w < 0) or np.any(w > 1):
            raise WeightError(f"weights must lie in [0, 1], got {tuple(w)}")
        if abs(w.sum() - 1.0) > 1e-9:
            raise WeightError(f"weights must sum to 1, got {w.sum():.12g}")

    def as_array(self) -> np.ndarray:
        return np.array([self.w_p, self.w_f, self.w_d], dtype=float)

    def check_within(self, iv: WeightIntervals) -> None:
        w = self.as_array()
        if np.any(w < iv.lower - 1e-12) or np.any(w > iv.upper + 1e-12):
            raise WeightError(f"weights {tuple(w)} fall outside intervals {iv}")

    @classmethod
    def parse(cls, text: str) -> "FitnessWeights":
        try:
            vals = [float(x) for x in text.split(",")]
            if len(vals) != 3:
                raise ValueError
        except ValueError:
            raise WeightError(f"weights must look like 0.4,0.3,0.3, got {text!r}")
        return cls(*vals)


def draw_weights(iv: WeightIntervals, rng: np.random.Generator) -> FitnessWeights:
    """Sample a weight triple inside ``iv`` that sums to one.

    Each weight is drawn uniformly in its interval; the triple is then scaled
    by a common factor, clipping into the intervals, with the factor found by
    bisection so the clipped sum hits one.
    """
    lo, hi = iv.lower, iv.upper
    u = rng.uniform(lo, hi)
    # a zero draw would pin its weight at the lower bound under scaling
    u = np.where(u > 0, u, (lo + hi) / 2)
    if np.clip(u * 1e12, lo, hi).sum() < 1.0:
        raise NoFeasibleWeights(f"intervals {iv} admit no weights summing to 1")
    a, b = 0.0, 1.0
    while np.clip(u * b, lo, hi).sum() < 1.0:
        b *= 2.0
    for _ in range(200):
        m = 0.5 * (a + b)
        if np.clip(u * m, lo, hi).sum() < 1.0:
            a = m
        else:
            b = m
    w = np.clip(u * b, lo, hi)
    resid = 1.0 - w.sum()
    for k in np.argsort(-(hi - lo)):
        step = float(np.clip(w[k] + resid, lo[k], hi[k]) - w[k])
        w[k] += step
        resid -= step
    return FitnessWeights(*(float(x) for x in w))


def reference_scales(s: Scenario) -> tuple[float, float, float]:
    """``(P_ref, F_lb, T_exp)`` used by :func:`normalize`."""
    perfs = [a.performance for c in s.capabilities
             for a in (*c.system_candidates.values(), *c.interface_candidates.values())]
    p_ref = max(perfs, default=0.0)
    f_lb = sum(min(a.cost for a in c.system_candidates.values()) for c in s.capabilities)
    return p_ref, f_lb, float(s.expected_duration)


def _check_scales(s: Scenario):
    p_ref, f_lb, t_exp = reference_scales(s)
    if p_ref <= 0:
        raise DegenerateScenario("every performance attribute is 0; performance cannot be normalized")
    if t_exp <= 0:
        raise DegenerateScenario("expected_duration must be > 0")
    return p_ref, f_lb, t_exp


def capability_metrics(s: Scenario, g: Genome, check: bool = True) -> list[CapabilityMetrics]:
    """Achieved performance, spent cost and elapsed duration per capability.

    With ``check=False`` the metrics of an infeasible genome's decoded
    selection are returned instead of raising.
    """
    r = evaluate_batch(s, g.bits)
    if check and not r["feasible"][0]:
        raise InfeasibleGenome(f"genome {g} violates {int(r['violations'][0])} constraint(s)")
    return [CapabilityMetrics(float(p), float(c), float(d))
            for p, c, d in zip(r["performance"][0], r["cost"][0], r["duration"][0])]


def _aggregate(perf: np.ndarray, cost: np.ndarray, dur: np.ndarray, perf_aggregate: str):
    if perf_aggregate not in PERF_AGGREGATES:
        raise ValueError(f"perf_aggregate must be one of {PERF_AGGREGATES}")
    p = perf.max(-1) if perf_aggregate == "max" else perf.min(-1)
    return p, cost.sum(-1), dur.max(-1)


def objective_vector(s: Scenario, g: Genome, perf_aggregate: str = "max",
                     check: bool = True) -> ObjectiveVector:
    r = evaluate_batch(s, g.bits)
    if check and not r["feasible"][0]:
        raise InfeasibleGenome(f"genome {g} violates {int(r['violations'][0])} constraint(s)")
    p, f, d = _aggregate(r["performance"], r["cost"], r["duration"], perf_aggregate)
    return ObjectiveVector(float(p[0]), float(f[0]), float(d[0]))


def _normalize_arrays(s: Scenario, p, f, d):
    p_ref, f_lb, t_exp = _check_scales(s)
    p_hat = np.clip(np.asarray(p, dtype=float) / p_ref, 0.0, 1.0)
    f = np.asarray(f, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        f_hat = np.where(f > 0, np.minimum(f_lb / np.where(f > 0, f, 1.0), 1.0), 1.0)
    d_hat = np.clip((t_exp - np.asarray(d, dtype=float)) / t_exp, 0.0, 1.0)
    return p_hat, f_hat, d_hat


def normalize(s: Scenario, v: ObjectiveVector) -> tuple[float, float, float]:
    """Map an objective vector to ``(P_hat, F_hat, D_hat)``, each in ``[0, 1]``."""
    p, f, d = _normalize_arrays(s, v.p_sos, v.f_sos, v.d_sos)
    return float(p), float(f), float(d)


def fitness_batch(s: Scenario, bits, w: FitnessWeights, perf_aggregate: str = "max") -> np.ndarray:
    """Fitness of every row of a ``(M, total_bits)`` 0/1 matrix."""
    r = evaluate_batch(s, bits)
    p, f, d = _aggregate(r["performance"], r["cost"], r["duration"], perf_aggregate)
    p_hat, f_hat, d_hat = _normalize_arrays(s, p, f, d)
    score = w.w_p * p_hat + w.w_f * f_hat + w.w_d * d_hat
    feasible_fit = np.maximum(score, EPSILON)
    penalty = EPSILON * (1.0 - r["violations"] / total_constraints(s))
    return np.where(r["feasible"], feasible_fit, penalty)


def fitness(s: Scenario, g: Genome, w: FitnessWeights, perf_aggregate: str = "max") -> float:
    return float(fitness_batch(s, g.bits, w, perf_aggregate)[0])


class FitnessEvaluator:
    """Memoised fitness for one (scenario, weights) pair."""

    def __init__(self, s: Scenario, w: FitnessWeights, perf_aggregate: str = "max"):
        _check_scales(s)
        self.scenario = s
        self.weights = w
        self.perf_aggregate = perf_aggregate
        self._cache: dict[bytes, float] = {}
        self.evaluations = 0

    def __call__(self, g: Genome) -> float:
        val = self._cache.get(g.key)
        if val is None:
            val = fitness(self.scenario, g, self.weights, self.perf_aggregate)
            self._cache[g.key] = val
            self.evaluations += 1
        return val

    def many(self, genomes) -> np.ndarray:
        genomes = list(genomes)
        missing = [g for g in {g.key: g for g in genomes if g.key not in self._cache}.values()]
        if missing:
            vals = fitness_batch(self.scenario, np.stack([g.bits for g in missing]),
                                 self.weights, self.perf_aggregate)
            for g, v in zip(missing, vals):
                self._cache[g.key] = float(v)
            self.evaluations += len(missing)
        return np.array([self._cache[g.key] for g in genomes])
