"""Evolve the 22-system scenario from its ten seed schemes.

The genome has 253 bits.  Most pairs are not real interfaces, so feasible
architectures switch on far more systems than links.
"""

import time

import numpy as np

from sosarch.engine import GaParams, run
from sosarch.genome import contributions, read_genomes
from sosarch.objectives import FitnessWeights
from sosarch.scenario import bundled_path, resolve_scenario

s = resolve_scenario("ew22")
seeds = read_genomes(bundled_path("ew22_seeds.txt"), s.layout)
print(f"{s.name}: {s.layout.total_bits} bits, {len(seeds)} seed schemes")

start = time.perf_counter()
report = run(s, GaParams(popsize=100, seed=0), FitnessWeights(1 / 3, 1 / 3, 1 / 3), seeds=seeds)
print(f"{report.generations} generations in {time.perf_counter() - start:.1f} s, "
      f"stopped by {report.termination_reason}")

# best-so-far is flat or rising, never falling
for gen, best, mean in report.curve[:: max(1, len(report.curve) // 10)]:
    print(f"  gen {gen:>3}  best {best:.4f}  mean {mean:.4f}")

sc, ic = np.array([contributions(g) for g in report.population.members]).mean(axis=0)
print(f"mean contribution: systems {sc:.3f}, interfaces {ic:.3f}")
print("best genome:", report.best[0])
