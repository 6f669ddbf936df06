"""Evolutionary selection of system-of-systems architectures.

Candidate architectures are bit strings over member systems and pairwise
interfaces; a constrained adaptive genetic algorithm searches them against a
weighted performance / cost / duration fitness.
"""

from .constraints import check_feasible, conflict_rules_for_slot, decode_assignment, repair
from .engine import GaParams, Population, run
from .errors import *  # noqa: F401,F403
from .genome import Genome, GenomeLayout, contributions, genome_from_string, genome_to_string, interface_bit_index
from .objectives import (FitnessWeights, WeightIntervals, draw_weights, fitness, normalize,
                         objective_vector)
from .oracle import enumerate_optimum
from .report import run_restarts, union_architecture
from .scenario import Scenario, load_scenario, resolve_scenario, save_scenario, validate_scenario

__version__ = "0.1.0"
