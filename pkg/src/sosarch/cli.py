"""Command line: ``sosarch {validate,run,oracle,report}``.

Exit codes: 0 success, 2 invalid input, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import oracle
from .engine import GaParams
from .errors import FormatError, ParseError, SosArchError, ValidationError, WeightError
from .genome import genome_to_string, read_genomes
from .objectives import PERF_AGGREGATES, FitnessWeights, WeightIntervals, draw_weights
from .report import emit, run_restarts, summarize
from .scenario import bundled_path, load_scenario, resolve_scenario, scenario_from_dict, validate_scenario

EXIT_OK, EXIT_VALIDATION, EXIT_RUNTIME = 0, 2, 3


def _add_weight_flags(p):
    p.add_argument("--weights", help="fixed weights w_p,w_f,w_d, e.g. 0.4,0.3,0.3")
    p.add_argument("--weight-intervals", help="intervals lo:hi,lo:hi,lo:hi to draw weights from")
    p.add_argument("--perf-aggregate", choices=PERF_AGGREGATES, default="max")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sosarch", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, scenario=True):
        if scenario:
            p.add_argument("--scenario", required=True, help="scenario JSON path or bundled name (tiny3, ew22)")
            p.add_argument("--table", help="candidate CSV to merge into the scenario")
        p.add_argument("--out-dir", default="out")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--restarts", type=int, default=1)

    p = sub.add_parser("validate", help="check a scenario document")
    common(p)

    p = sub.add_parser("run", help="evolve architectures and write run files")
    common(p)
    defaults = GaParams()
    p.add_argument("--pop", type=int, default=defaults.popsize)
    p.add_argument("--gens", type=int, default=defaults.max_generations)
    p.add_argument("--stagnation", type=int, default=defaults.stagnation_window)
    p.add_argument("--pc1", type=float, default=defaults.p_c1)
    p.add_argument("--pc2", type=float, default=defaults.p_c2)
    p.add_argument("--pm1", type=float, default=defaults.p_m1)
    p.add_argument("--pm2", type=float, default=defaults.p_m2)
    p.add_argument("--seeds", help="file of seed chromosomes, one bit string per line")
    _add_weight_flags(p)

    p = sub.add_parser("oracle", help="exhaustive optimum of a small scenario")
    common(p)
    _add_weight_flags(p)

    p = sub.add_parser("report", help="summarise a run directory")
    common(p, scenario=False)
    return parser


def _scenario(args):
    if args.table:
        path = Path(args.scenario)
        if not path.exists():
            path = bundled_path(args.scenario)
        return load_scenario(path, table=args.table)
    return resolve_scenario(args.scenario)


def _weights(args, seed: int):
    intervals = WeightIntervals.parse(args.weight_intervals) if args.weight_intervals else None
    if args.weights:
        w = FitnessWeights.parse(args.weights)
        if intervals is not None:
            w.check_within(intervals)
        return w, intervals
    if intervals is not None:
        return draw_weights(intervals, np.random.default_rng(seed)), intervals
    return None, None


def _cmd_validate(args) -> int:
    path = Path(args.scenario)
    if not path.exists():
        path = bundled_path(args.scenario)
    try:
        doc = json.loads(path.read_text())
    except (OSError, ValueError) as exc:
        raise ParseError(f"{path}: {exc}") from exc
    s = scenario_from_dict(doc) if not args.table else _scenario(args)
    problems = validate_scenario(s)
    if problems:
        for line in problems:
            print(line, file=sys.stderr)
        return EXIT_VALIDATION
    print(f"ok: {s.name} with {s.n_sys} systems, {s.n_if} interfaces, {s.n_cap} capabilities, "
          f"{s.layout.total_bits}-bit genomes")
    return EXIT_OK


def _cmd_run(args) -> int:
    s = _scenario(args)
    params = GaParams(args.pop, args.gens, args.stagnation, args.pc1, args.pc2, args.pm1, args.pm2, args.seed)
    weights = FitnessWeights.parse(args.weights) if args.weights else None
    intervals = WeightIntervals.parse(args.weight_intervals) if args.weight_intervals else None
    seeds = None
    if args.seeds:
        path = Path(args.seeds)
        seeds = read_genomes(path if path.exists() else bundled_path(args.seeds), s.layout)
    report = run_restarts(s, params, weights, intervals, args.restarts, seeds, args.perf_aggregate)
    paths = emit(report, args.out_dir)
    g, f = report.global_best
    print(f"best fitness {f!r} after {report.restarts[report.winner].generations} generations "
          f"({report.termination_reason})")
    print(f"chromosome {genome_to_string(g)}")
    print("wrote " + ", ".join(str(p) for p in paths.values()))
    return EXIT_OK


def _cmd_oracle(args) -> int:
    s = _scenario(args)
    weights, _ = _weights(args, args.seed)
    weights = weights or FitnessWeights(1 / 3, 1 / 3, 1 / 3)
    res = oracle.enumerate_optimum(s, weights, args.perf_aggregate)
    print(f"status: {res.status}")
    print(f"total_count: {res.total_count}")
    print(f"feasible_count: {res.feasible_count}")
    print(f"optimum_fitness: {res.optimum_fitness!r}")
    print("optimum_genomes:")
    for g in res.optimum_genomes:
        print(f"  - {genome_to_string(g)}")
    return EXIT_OK


def _cmd_report(args) -> int:
    print(summarize(args.out_dir))
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler = {"validate": _cmd_validate, "run": _cmd_run, "oracle": _cmd_oracle, "report": _cmd_report}
    try:
        return handler[args.command](args)
    except (ValidationError, ParseError, WeightError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (SosArchError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
