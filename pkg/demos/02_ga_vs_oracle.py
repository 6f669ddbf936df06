"""How often does the GA find the true optimum on small random scenarios?"""

import numpy as np

from sosarch import oracle
from sosarch.engine import GaParams, run
from sosarch.objectives import WeightIntervals, draw_weights
from sosarch.scenario import random_scenario

rng = np.random.default_rng(1)
intervals = WeightIntervals((0.2, 0.5), (0.2, 0.5), (0.2, 0.5))

print(f"{'scenario':>10} {'bits':>4} {'feasible':>8} {'optimum':>9} hits")
for k in range(10):
    s = random_scenario(rng, int(rng.integers(3, 6)), int(rng.integers(1, 5)), name=f"rand{k}")
    w = draw_weights(intervals, rng)
    best = oracle.enumerate_optimum(s, w)
    bests = [run(s, GaParams(popsize=20, seed=seed), w).best[1] for seed in range(10)]
    hits = sum(abs(b - best.optimum_fitness) <= 1e-12 for b in bests)
    print(f"{s.name:>10} {s.layout.total_bits:>4} {best.feasible_count:>8} {best.optimum_fitness:>9.4f} {hits}/10")
