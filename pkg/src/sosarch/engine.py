"""Constrained adaptive genetic algorithm over architecture genomes.

One generation is: elitist roulette selection, pairwise difference-set
crossover with adaptive probability, then ``popsize`` rounds of adaptive
constrained mutation.  Every operator returns feasible genomes only
(offspring and mutants are repaired), and neither crossover nor mutation can
lower the best fitness in the population, so the best-so-far curve is
monotone.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .constraints import _solver, feasible_completion, repair
from .errors import EmptyPopulation, InitFailure, ValidationError
from .genome import Genome
from .objectives import FitnessEvaluator, FitnessWeights
from .scenario import Scenario, validate_scenario


@dataclass(frozen=True)
class GaParams:
    popsize: int = 100
    max_generations: int = 150
    stagnation_window: int = 30
    p_c1: float = 0.9
    p_c2: float = 0.4
    p_m1: float = 0.2
    p_m2: float = 0.1
    seed: int = 0

    def __post_init__(self):
        problems = []
        if self.popsize < 1:
            problems.append("popsize must be >= 1")
        if self.max_generations < 0:
            problems.append("max_generations must be >= 0")
        if not 20 <= self.stagnation_window <= 50:
            problems.append("stagnation_window must lie in [20, 50]")
        for name in ("p_c1", "p_c2", "p_m1", "p_m2"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                problems.append(f"{name} must lie in [0, 1]")
        if self.p_c1 < self.p_c2:
            problems.append("p_c1 must be >= p_c2")
        if self.p_m1 < self.p_m2:
            problems.append("p_m1 must be >= p_m2")
        if not 0 <= self.seed < 2**64:
            problems.append("seed must be an unsigned 64-bit integer")
        if problems:
            raise ValidationError(problems)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class Population:
    members: list[Genome]
    fitness: np.ndarray
    generation: int = 0
    best_ever: tuple[Genome, float] | None = None

    def __post_init__(self):
        self.fitness = np.asarray(self.fitness, dtype=float)
        if len(self.members) != self.fitness.size:
            raise ValueError("members and fitness differ in length")
        if self.members:
            i = int(np.argmax(self.fitness))
            if self.best_ever is None or self.fitness[i] > self.best_ever[1]:
                self.best_ever = (self.members[i], float(self.fitness[i]))

    def __len__(self):
        return len(self.members)

    @property
    def sum_fitness(self) -> float:
        return float(self.fitness.sum())

    @property
    def mean_fitness(self) -> float:
        return float(self.fitness.mean())

    @property
    def max_fitness(self) -> float:
        return float(self.fitness.max())

    def best(self) -> tuple[Genome, float]:
        i = int(np.argmax(self.fitness))
        return self.members[i], float(self.fitness[i])


@dataclass
class RunReport:
    params: GaParams
    weights: FitnessWeights
    curve: list[tuple[int, float, float]]
    population: Population
    best: tuple[Genome, float]
    termination_reason: str
    log: list[dict] = field(default_factory=list)
    evaluations: int = 0

    @property
    def generations(self) -> int:
        return len(self.curve) - 1


# -- initialisation -----------------------------------------------------------

def sample_genome(s: Scenario, rng: np.random.Generator) -> Genome:
    """Build one feasible genome bit by bit under the conflict rules.

    Each undecided bit is drawn uniformly from the values that still admit a
    feasible completion; forced bits take their only admissible value.
    """
    solver = _solver(s)
    T = solver.T
    fixed = [-1] * T
    witness = None
    forbidden = solver.forbidden
    for t in range(T):
        if t in forbidden:
            fixed[t] = 0
            continue
        v = int(rng.integers(2))
        fixed[t] = v
        if witness is not None and witness[t] == v:
            continue
        w = solver.complete(fixed)
        if w is not None:
            witness = w
            continue
        fixed[t] = 1 - v
        if witness is None:
            witness = solver.complete(fixed)
            if witness is None:
                raise InitFailure("scenario admits no feasible architecture")
    return Genome(s.layout, fixed)


def init_population(s: Scenario, params: GaParams, evaluate: FitnessEvaluator,
                    rng: np.random.Generator, seeds=None) -> Population:
    """Initial population of ``params.popsize`` feasible genomes.

    Seed genomes are repaired and placed first (in the given order); the
    remainder is sampled with :func:`sample_genome`.
    """
    problems = validate_scenario(s)
    if problems:
        raise InitFailure("; ".join(problems))
    members = []
    for g in list(seeds or ())[: params.popsize]:
        if g.layout != s.layout:
            raise InitFailure(f"seed genome has {len(g)} bits, scenario needs {s.layout.total_bits}")
        members.append(repair(s, g))
    while len(members) < params.popsize:
        members.append(sample_genome(s, rng))
    return Population(members, [evaluate(g) for g in members])


# -- selection ----------------------------------------------------------------

def survival_probabilities(fitness) -> np.ndarray:
    fitness = np.asarray(fitness, dtype=float)
    total = fitness.sum()
    if fitness.size == 0:
        raise EmptyPopulation("no fitness values")
    if not total > 0:
        raise ValueError("selection needs a positive fitness sum")
    return fitness / total


def cumulative_intervals(probs) -> np.ndarray:
    """Right ends ``b_i`` of the survival intervals ``[a_i, b_i)`` partitioning [0, 1)."""
    b = np.cumsum(probs)
    b[-1] = 1.0
    return b


def roulette(probs, rng: np.random.Generator, size: int) -> np.ndarray:
    """Indices drawn with replacement in proportion to ``probs``."""
    b = cumulative_intervals(np.asarray(probs, dtype=float))
    return np.searchsorted(b, rng.random(size), side="right")


def select(pop: Population, rng: np.random.Generator) -> Population:
    """Elitist roulette: keep the best member, draw the rest by fitness share.

    The remaining ``N - 1`` places are drawn from the other members with
    probabilities renormalised over them.
    """
    n = len(pop)
    if n == 0:
        raise EmptyPopulation("cannot select from an empty population")
    survival_probabilities(pop.fitness)
    elite = int(np.argmax(pop.fitness))
    chosen = [elite]
    rest = np.delete(np.arange(n), elite)
    if n > 1:
        picks = roulette(survival_probabilities(pop.fitness[rest]), rng, n - 1)
        chosen.extend(int(rest[k]) for k in picks)
    return Population([pop.members[i] for i in chosen], pop.fitness[chosen],
                      pop.generation, pop.best_ever)


# -- adaptive operator probabilities ------------------------------------------

def _adaptive(f: float, f_mean: float, f_max: float, high: float, low: float) -> float:
    if f <= f_mean or f_max <= f_mean:
        return high
    frac = min((f - f_mean) / (f_max - f_mean), 1.0)
    return high - (high - low) * frac


def adaptive_crossover_prob(f: float, f_mean: float, f_max: float, params: GaParams) -> float:
    """``p_c1`` at or below the mean, falling linearly to ``p_c2`` at the maximum."""
    return _adaptive(f, f_mean, f_max, params.p_c1, params.p_c2)


def adaptive_mutation_prob(f: float, f_mean: float, f_max: float, params: GaParams) -> float:
    """``p_m1`` at or below the mean, falling linearly to ``p_m2`` at the maximum."""
    return _adaptive(f, f_mean, f_max, params.p_m1, params.p_m2)


# -- crossover ----------------------------------------------------------------

def difference_set(a: Genome, b: Genome) -> np.ndarray:
    return np.flatnonzero(a.bits != b.bits)


def exchange_suffix(a: Genome, b: Genome, cut: int) -> tuple[Genome, Genome]:
    """Single-point crossover: swap everything from position ``cut`` on."""
    x, y = a.bits.copy(), b.bits.copy()
    x[cut:], y[cut:] = b.bits[cut:], a.bits[cut:]
    return Genome(a.layout, x), Genome(b.layout, y)


def crossover_pair(s: Scenario, a: Genome, b: Genome, f_mean: float, f_max: float,
                   params: GaParams, evaluate: FitnessEvaluator, rng: np.random.Generator):
    """Cross two parents; returns ``(child_a, child_b, crossed)``.

    The cut is one of the positions where the parents differ, chosen by
    splitting ``[0, 1)`` into ``m`` equal segments.  Offspring are repaired
    and the two fittest of parents and offspring are kept.
    """
    fa, fb = evaluate(a), evaluate(b)
    pc = adaptive_crossover_prob(max(fa, fb), f_mean, f_max, params)
    if rng.random() > pc:
        return a, b, False
    diff = difference_set(a, b)
    m = diff.size
    if m == 0:
        return a, b, False
    k = min(int(rng.random() * m), m - 1)
    o1, o2 = exchange_suffix(a, b, int(diff[k]))
    o1 = repair(s, o1, hint=a)
    o2 = repair(s, o2, hint=b)
    pool = [(a, fa), (b, fb), (o1, evaluate(o1)), (o2, evaluate(o2))]
    pool.sort(key=lambda gf: -gf[1])
    return pool[0][0], pool[1][0], True


def crossover(s: Scenario, pop: Population, params: GaParams, evaluate: FitnessEvaluator,
              rng: np.random.Generator) -> tuple[Population, int]:
    """Shuffle, pair members ``(0,1), (2,3), ...`` and cross each pair."""
    order = rng.permutation(len(pop))
    f_mean, f_max = pop.mean_fitness, pop.max_fitness
    members = [pop.members[i] for i in order]
    crossed = 0
    for k in range(0, len(members) - 1, 2):
        members[k], members[k + 1], did = crossover_pair(
            s, members[k], members[k + 1], f_mean, f_max, params, evaluate, rng)
        crossed += did
    return Population(members, [evaluate(g) for g in members], pop.generation, pop.best_ever), crossed


# -- mutation -----------------------------------------------------------------

def mutate_genome(s: Scenario, g: Genome, pos: int) -> Genome:
    """Flip bit ``pos`` if the conflict rules admit it, then repair the rest.

    When the prefix forces the current value the genome comes back unchanged.
    """
    solver = _solver(s)
    new = 1 - int(g.bits[pos])
    if new == 1 and pos in solver.forbidden:
        return g
    fixed = g.bits[:pos].tolist() + [new] + [-1] * (solver.T - pos - 1)
    witness = feasible_completion(s, fixed, preferred=g.bits)
    if witness is None:
        return g
    return repair(s, g.with_bit(pos, new), hint=Genome(s.layout, witness))


def mutate(s: Scenario, pop: Population, params: GaParams, evaluate: FitnessEvaluator,
           rng: np.random.Generator, rounds: int | None = None) -> tuple[Population, int]:
    """``rounds`` (default ``popsize``) rounds of roulette-picked mutation.

    A mutant replaces its original only when its fitness is not lower.
    """
    members = list(pop.members)
    fit = pop.fitness.copy()
    T = s.layout.total_bits
    accepted = 0
    for _ in range(len(members) if rounds is None else rounds):
        f_mean, f_max = float(fit.mean()), float(fit.max())
        pm = np.array([adaptive_mutation_prob(f, f_mean, f_max, params) for f in fit])
        if pm.sum() > 0:
            i = int(roulette(pm / pm.sum(), rng, 1)[0])
        else:
            i = int(rng.integers(len(members)))
        pos = int(rng.integers(T))
        mutant = mutate_genome(s, members[i], pos)
        if mutant is members[i]:
            continue
        f_new = evaluate(mutant)
        if f_new >= fit[i]:
            members[i] = mutant
            fit[i] = f_new
            accepted += 1
    return Population(members, fit, pop.generation, pop.best_ever), accepted


# -- driver -------------------------------------------------------------------

def run(s: Scenario, params: GaParams, weights: FitnessWeights, seeds=None,
        perf_aggregate: str = "max", rng: np.random.Generator | None = None,
        observer=None) -> RunReport:
    """Evolve until the generation budget or the stagnation window runs out.

    ``observer(stage, generation, population)``, if given, sees the population
    after ``"init"`` and after every ``"select"``, ``"crossover"`` and
    ``"mutate"`` step.
    """
    rng = np.random.default_rng(params.seed) if rng is None else rng
    notify = observer or (lambda *_: None)
    evaluate = FitnessEvaluator(s, weights, perf_aggregate)
    pop = init_population(s, params, evaluate, rng, seeds)
    notify("init", 0, pop)
    curve = [(0, pop.max_fitness, pop.mean_fitness)]
    log = [{"generation": 0, "best": pop.best_ever[1], "mean": pop.mean_fitness,
            "accepted_mutations": 0, "crossovers": 0}]
    stall = 0
    reason = "generation budget"
    for gen in range(1, params.max_generations + 1):
        previous = pop.best_ever[1]
        pop = select(pop, rng)
        notify("select", gen, pop)
        pop, crossed = crossover(s, pop, params, evaluate, rng)
        notify("crossover", gen, pop)
        pop, accepted = mutate(s, pop, params, evaluate, rng)
        notify("mutate", gen, pop)
        pop.generation = gen
        best = pop.best_ever[1]
        curve.append((gen, best, pop.mean_fitness))
        log.append({"generation": gen, "best": best, "mean": pop.mean_fitness,
                    "accepted_mutations": accepted, "crossovers": crossed})
        stall = 0 if best > previous else stall + 1
        if stall >= params.stagnation_window:
            reason = "stagnation"
            break
    return RunReport(params, weights, curve, pop, pop.best_ever, reason, log, evaluate.evaluations)
