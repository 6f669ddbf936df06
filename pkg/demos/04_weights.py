"""Shifting the weights moves the optimum between cheap and capable designs."""

import numpy as np

from sosarch import oracle
from sosarch.objectives import FitnessWeights, WeightIntervals, draw_weights, objective_vector
from sosarch.scenario import random_scenario

s = random_scenario(np.random.default_rng(5), 4, 2, name="demo")
print(f"{s.name}: {s.layout.total_bits} bits")

for w in (FitnessWeights(0.8, 0.1, 0.1), FitnessWeights(0.1, 0.8, 0.1), FitnessWeights(0.1, 0.1, 0.8)):
    best = oracle.enumerate_optimum(s, w)
    g = best.optimum_genomes[0]
    print(f"weights {w.as_array()}: best {g}  {objective_vector(s, g)}")

# Weights can also be drawn from intervals whose bounds straddle 1.
iv = WeightIntervals((0.2, 0.5), (0.2, 0.5), (0.2, 0.5))
rng = np.random.default_rng(0)
for _ in range(3):
    print("drawn:", np.round(draw_weights(iv, rng).as_array(), 4))
