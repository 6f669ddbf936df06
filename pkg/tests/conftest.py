import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from sosarch.genome import read_genomes
from sosarch.objectives import FitnessWeights
from sosarch.scenario import (Attributes, Capability, InterfaceDef, Scenario, SystemDef, bundled_path,
                              random_scenario, resolve_scenario)

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

EQUAL = FitnessWeights(1 / 3, 1 / 3, 1 / 3)


def make_scenario(n_sys, caps, interfaces=(), t_exp=5.0, name="handmade"):
    """Build a scenario from compact tuples.

    ``caps`` holds ``(id, budget, deadline, floor, {j: (f, d, p)}, {k: (f, d, p)})``.
    """
    return Scenario(
        name,
        tuple(SystemDef(j, f"S{j}") for j in range(1, n_sys + 1)),
        tuple(InterfaceDef(k, tuple(e)) for k, e in enumerate(interfaces, start=1)),
        tuple(Capability(cid, float(b), float(d), float(p),
                         {j: Attributes(*map(float, a)) for j, a in sc.items()},
                         {k: Attributes(*map(float, a)) for k, a in ic.items()})
              for cid, b, d, p, sc, ic in caps),
        float(t_exp),
    )


@pytest.fixture(scope="session")
def tiny3():
    return resolve_scenario("tiny3")


@pytest.fixture(scope="session")
def ew22():
    return resolve_scenario("ew22")


@pytest.fixture(scope="session")
def ew22_seeds(ew22):
    return read_genomes(bundled_path("ew22_seeds.txt"), ew22.layout)


@pytest.fixture(scope="session")
def small_scenarios():
    """Twelve random scenarios of 6 to 15 bits, fixed by seed."""
    rng = np.random.default_rng(12345)
    shapes = [(3, 2), (4, 2), (4, 3), (5, 2), (5, 3), (5, 4)] * 2
    return [random_scenario(rng, n, c, name=f"small{k}") for k, (n, c) in enumerate(shapes)]


@pytest.fixture(scope="session")
def medium_scenario():
    return random_scenario(np.random.default_rng(777), 8, 4, name="medium")


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
