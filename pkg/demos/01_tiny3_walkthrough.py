"""A three-system scenario, worked through by hand.

Two capabilities: A can use S1 or S2, B needs S3 and the S1-S3 link.
The genome is three system bits followed by the pairs (1,2), (1,3), (2,3).
"""

from sosarch import oracle
from sosarch.constraints import check_feasible, repair
from sosarch.genome import genome_from_string
from sosarch.objectives import FitnessWeights, fitness, normalize, objective_vector
from sosarch.scenario import resolve_scenario

s = resolve_scenario("tiny3")
w = FitnessWeights(1 / 3, 1 / 3, 1 / 3)
print(f"{s.name}: {s.n_sys} systems, {s.layout.total_bits} genome bits")

# The empty architecture breaks coverage for both capabilities.
empty = genome_from_string(s.layout, "000000")
for v in check_feasible(s, empty):
    print("  ", v)
print("fitness of 000000:", fitness(s, empty, w))

# Repair walks the bits left to right and flips only what it must.
fixed = repair(s, empty)
print("repaired:", fixed)
v = objective_vector(s, fixed)
print("objectives:", v, "normalised:", normalize(s, v))
print("fitness:", fitness(s, fixed, w))

# The exhaustive search agrees: 101010 is the only feasible genome.
result = oracle.enumerate_optimum(s, w)
print(f"oracle: {result.feasible_count} feasible of {result.total_count},",
      "optimum", result.optimum_fitness, [str(g) for g in result.optimum_genomes])
