"""Multi-restart runs and the files they leave behind.

A run directory holds:

``best.json``
    global best genome and fitness, the union architecture, per-restart
    bests, weights and parameters.
``curve.csv``
    ``generation,best_fitness,mean_fitness`` of the winning restart.
``population.csv``
    final population of the winning restart with contribution columns and a
    trailing ``mean`` row.
``run.log.jsonl``
    one record per generation and restart.

Floats are written with ``repr`` so identical runs give identical bytes.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .constraints import Assignment, decode_assignment
from .engine import GaParams, Population, RunReport, run
from .genome import Genome, contributions, genome_from_string, genome_to_string
from .objectives import FitnessWeights, WeightIntervals, draw_weights, normalize, objective_vector
from .scenario import Scenario

POPULATION_HEADER = ("index", "chromosome", "fitness", "system_contribution", "interface_contribution")


@dataclass
class EvolutionReport:
    scenario: Scenario
    params: GaParams
    weights: FitnessWeights
    restarts: list[RunReport]
    winner: int
    union_architecture: Genome
    perf_aggregate: str = "max"

    @property
    def best_per_restart(self) -> list[tuple[Genome, float]]:
        return [r.best for r in self.restarts]

    @property
    def global_best(self) -> tuple[Genome, float]:
        return self.restarts[self.winner].best

    @property
    def curve(self) -> list[tuple[int, float, float]]:
        return self.restarts[self.winner].curve

    @property
    def population(self) -> Population:
        return self.restarts[self.winner].population

    @property
    def termination_reason(self) -> str:
        return self.restarts[self.winner].termination_reason


def union_architecture(s: Scenario, assignment: Assignment) -> Genome:
    """Genome with every system and interface that some capability selects."""
    bits = np.zeros(s.layout.total_bits, dtype=np.uint8)
    bits[: s.n_sys] = np.asarray(assignment.systems).any(axis=0)
    used = np.flatnonzero(np.asarray(assignment.interfaces).any(axis=0))
    for k in used:
        j, jp = s.interfaces[k].endpoints
        bits[s.layout.interface_bit_index(j, jp)] = 1
    return Genome(s.layout, bits)


def run_restarts(s: Scenario, params: GaParams, weights: FitnessWeights | None = None,
                 intervals: WeightIntervals | None = None, restarts: int = 1, seeds=None,
                 perf_aggregate: str = "max") -> EvolutionReport:
    """Independent seeded restarts; the best of their bests wins.

    Child streams come from ``SeedSequence(params.seed)``: the first draws
    the weights when only ``intervals`` are given, the others drive one
    restart each.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    children = np.random.SeedSequence(params.seed).spawn(restarts + 1)
    if weights is None:
        if intervals is None:
            weights = FitnessWeights(1 / 3, 1 / 3, 1 / 3)
        else:
            weights = draw_weights(intervals, np.random.default_rng(children[0]))
    elif intervals is not None:
        weights.check_within(intervals)
    reports = [run(s, params, weights, seeds, perf_aggregate, rng=np.random.default_rng(child))
               for child in children[1:]]
    winner = max(range(restarts), key=lambda k: (reports[k].best[1], -k))
    best = reports[winner].best[0]
    union = union_architecture(s, decode_assignment(s, best))
    return EvolutionReport(s, params, weights, reports, winner, union, perf_aggregate)


# -- emission -----------------------------------------------------------------

def write_population_table(pop: Population, path) -> None:
    rows = []
    for k, (g, f) in enumerate(zip(pop.members, pop.fitness)):
        sc, ic = contributions(g)
        rows.append((k, genome_to_string(g), repr(float(f)), repr(round(sc, 4)), repr(round(ic, 4))))
    contrib = np.array([contributions(g) for g in pop.members]) if pop.members else np.zeros((1, 2))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(POPULATION_HEADER)
        w.writerows(rows)
        w.writerow(("mean", "", repr(float(pop.fitness.mean())) if len(pop) else "",
                    repr(round(float(contrib[:, 0].mean()), 4)), repr(round(float(contrib[:, 1].mean()), 4))))


def read_population_table(path, layout) -> tuple[list[tuple[Genome, float, float, float]], dict]:
    """Member rows as ``(genome, fitness, sys_contrib, if_contrib)`` plus the mean row."""
    members, summary = [], {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            if row["index"] == "mean":
                summary = {k: float(row[k]) for k in POPULATION_HEADER[2:] if row[k]}
                continue
            members.append((genome_from_string(layout, row["chromosome"]), float(row["fitness"]),
                            float(row["system_contribution"]), float(row["interface_contribution"])))
    return members, summary


def write_curve(report: EvolutionReport | RunReport, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("generation", "best_fitness", "mean_fitness"))
        for gen, best, mean in report.curve:
            w.writerow((gen, repr(float(best)), repr(float(mean))))


def best_document(report: EvolutionReport) -> dict:
    s = report.scenario
    g, f = report.global_best
    v = objective_vector(s, g, report.perf_aggregate)
    sc, ic = contributions(g)
    return {
        "scenario": s.name,
        "total_bits": s.layout.total_bits,
        "params": report.params.to_dict(),
        "weights": {"w_p": report.weights.w_p, "w_f": report.weights.w_f, "w_d": report.weights.w_d},
        "perf_aggregate": report.perf_aggregate,
        "global_best": {
            "chromosome": genome_to_string(g),
            "fitness": f,
            "restart": report.winner,
            "objectives": {"p_sos": v.p_sos, "f_sos": v.f_sos, "d_sos": v.d_sos},
            "normalized": dict(zip(("performance", "cost", "duration"), normalize(s, v))),
            "system_contribution": sc,
            "interface_contribution": ic,
            "active_systems": [int(j) + 1 for j in np.flatnonzero(g.systems)],
        },
        "union_architecture": genome_to_string(report.union_architecture),
        "restarts": [
            {"restart": k, "best_fitness": r.best[1], "chromosome": genome_to_string(r.best[0]),
             "generations": r.generations, "termination_reason": r.termination_reason}
            for k, r in enumerate(report.restarts)
        ],
        "termination_reason": report.termination_reason,
    }


def write_best(report: EvolutionReport, path) -> None:
    Path(path).write_text(json.dumps(best_document(report), indent=2) + "\n")


def write_log(report: EvolutionReport, path) -> None:
    with open(path, "w") as fh:
        for k, r in enumerate(report.restarts):
            for rec in r.log:
                fh.write(json.dumps({"restart": k, **rec}) + "\n")


def emit(report: EvolutionReport, out_dir) -> dict[str, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {name: out_dir / name for name in ("best.json", "curve.csv", "population.csv", "run.log.jsonl")}
    write_best(report, paths["best.json"])
    write_curve(report, paths["curve.csv"])
    write_population_table(report.population, paths["population.csv"])
    write_log(report, paths["run.log.jsonl"])
    return paths


def summarize(out_dir) -> str:
    """Human-readable digest of a run directory (used by ``sosarch report``)."""
    out_dir = Path(out_dir)
    best = json.loads((out_dir / "best.json").read_text())
    with open(out_dir / "population.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    members = [r for r in rows if r["index"] != "mean"]
    mean = next((r for r in rows if r["index"] == "mean"), None)
    gb = best["global_best"]
    lines = [
        f"scenario {best['scenario']} ({best['total_bits']} bits), weights "
        f"p={best['weights']['w_p']:.4g} f={best['weights']['w_f']:.4g} d={best['weights']['w_d']:.4g}",
        f"best fitness {gb['fitness']:.6f} (restart {gb['restart']}, {best['termination_reason']})",
        f"objectives P={gb['objectives']['p_sos']:g} F={gb['objectives']['f_sos']:g} D={gb['objectives']['d_sos']:g}",
        f"active systems {gb['active_systems']}",
        "per-restart best: " + ", ".join(f"{r['best_fitness']:.6f}" for r in best["restarts"]),
        "",
        f"{'#':>4}  {'fitness':>9}  {'system':>7}  {'interface':>9}",
    ]
    for r in members[:10]:
        lines.append(f"{r['index']:>4}  {float(r['fitness']):9.6f}  {float(r['system_contribution']):7.4f}"
                     f"  {float(r['interface_contribution']):9.4f}")
    if mean:
        lines.append(f"{'mean':>4}  {float(mean['fitness']):9.6f}  {float(mean['system_contribution']):7.4f}"
                     f"  {float(mean['interface_contribution']):9.4f}")
    return "\n".join(lines)
