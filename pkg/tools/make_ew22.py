"""Regenerate the bundled ew22 sample scenario and its ten seed schemes.

The attribute values are synthetic: only the shape (22 systems, 5
capabilities, 253-bit genomes, 10 designer seed schemes) follows the
strategic early-warning case study.

    python tools/make_ew22.py
"""

from pathlib import Path

import numpy as np

from sosarch.constraints import check_feasible, repair
from sosarch.genome import Genome, genome_to_string
from sosarch.scenario import (Attributes, Capability, InterfaceDef, Scenario, SystemDef,
                              save_scenario, validate_scenario)

DATA = Path(__file__).resolve().parents[1] / "src" / "sosarch" / "data"

LABELS = [
    "space-based infrared satellite A", "space-based infrared satellite B", "HEO infrared payload",
    "upgraded early-warning radar North", "upgraded early-warning radar South", "sea-based X-band radar",
    "forward-based TPY radar", "airborne early-warning aircraft", "SIGINT ground station",
    "fusion and correlation centre", "track processing cluster", "threat assessment node",
    "national command centre", "regional command post", "battle management node",
    "mobile command vehicle", "ISR tasking cell", "surveillance data hub",
    "satellite relay link", "fibre backbone", "HF/VHF radio network", "tactical data link",
]

# capability -> candidate systems (1-based)
MEMBERS = {
    "ACQ": [1, 2, 3, 4, 5, 6, 7, 9],
    "PROC": [10, 11, 12, 17, 18, 6],
    "C2": [13, 14, 15, 16, 12],
    "ISR": [4, 5, 7, 8, 9, 17, 18],
    "COMMS": [19, 20, 21, 22, 15],
}
FLOORS = {"ACQ": 0.7, "PROC": 0.65, "C2": 0.6, "ISR": 0.7, "COMMS": 0.6}
DEADLINES = {"ACQ": 10, "PROC": 8, "C2": 8, "ISR": 9, "COMMS": 7}


def build(seed: int = 2022) -> Scenario:
    rng = np.random.default_rng(seed)
    n = len(LABELS)
    systems = tuple(SystemDef(j, LABELS[j - 1]) for j in range(1, n + 1))
    pairs = set()
    for members in MEMBERS.values():
        for j in members:
            for jp in members:
                if j < jp and rng.random() < 0.7:
                    pairs.add((j, jp))
    # cross-capability links: sensors to processing, processing to command, command to comms
    for src, dst in (("ACQ", "PROC"), ("ISR", "PROC"), ("PROC", "C2"), ("C2", "COMMS")):
        for j in MEMBERS[src]:
            for jp in MEMBERS[dst]:
                if j != jp and rng.random() < 0.3:
                    pairs.add((min(j, jp), max(j, jp)))
    interfaces = tuple(InterfaceDef(k, p) for k, p in enumerate(sorted(pairs), start=1))
    caps = []
    for name, members in MEMBERS.items():
        sc = {}
        for j in sorted(members):
            sc[j] = Attributes(float(rng.integers(2, 10)), float(rng.integers(2, 9)),
                               round(float(rng.uniform(0.5, 0.95)), 2))
        ic = {}
        for iface in interfaces:
            j, jp = iface.endpoints
            if (j in members or jp in members) and rng.random() < 0.8:
                ic[iface.id] = Attributes(float(rng.integers(1, 4)), float(rng.integers(1, 7)),
                                          round(float(rng.uniform(0.5, 0.95)), 2))
        budget = float(round(0.8 * sum(a.cost for a in sc.values()) + 0.7 * sum(a.cost for a in ic.values())))
        caps.append(Capability(name, budget, float(DEADLINES[name]), FLOORS[name], sc, ic))
    return Scenario(
        "ew22", systems, interfaces, tuple(caps), 12.0,
        {"description": "SYNTHETIC strategic early-warning system of systems: 22 candidate member "
                        "systems, 5 capabilities. Attribute values are invented for demonstration.",
         "capability_names": {"ACQ": "intelligence acquisition", "PROC": "intelligence processing",
                              "C2": "intelligence command coordination",
                              "ISR": "integrated reconnaissance, surveillance and early warning",
                              "COMMS": "intelligence transmission"},
         "upgrade_targets": {"detection_range_km": [1000, 7000], "warning_time_h": [1.0, 1.5],
                             "positioning_accuracy_gain": 0.04}},
    )


def seed_schemes(s: Scenario, count: int = 10, seed: int = 7) -> list[Genome]:
    """Designer schemes: a random subset of each capability's systems, fully interconnected."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        chosen = set()
        for cap in s.capabilities:
            cands = sorted(cap.system_candidates)
            k = int(rng.integers(2, len(cands) + 1))
            chosen.update(int(j) for j in rng.choice(cands, size=k, replace=False))
        bits = np.zeros(s.layout.total_bits, dtype=np.uint8)
        for j in chosen:
            bits[j - 1] = 1
        for iface in s.interfaces:
            j, jp = iface.endpoints
            if j in chosen and jp in chosen:
                bits[s.layout.interface_bit_index(j, jp)] = 1
        out.append(repair(s, Genome(s.layout, bits)))
    return out


def main():
    s = build()
    problems = validate_scenario(s)
    assert not problems, problems
    save_scenario(s, DATA / "ew22.json")
    seeds = seed_schemes(s)
    assert all(not check_feasible(s, g) for g in seeds)
    (DATA / "ew22_seeds.txt").write_text("".join(genome_to_string(g) + "\n" for g in seeds))
    print(f"ew22: {s.n_sys} systems, {s.n_if} interfaces, {s.layout.total_bits} bits")


if __name__ == "__main__":
    main()
