"""Problem instances: capabilities, candidate member systems and interfaces.

A scenario document is JSON::

    {
      "name": "tiny3",
      "expected_duration": 5,
      "systems": [{"id": 1, "label": "S1"}, ...],
      "interfaces": [{"id": 1, "endpoints": [1, 3]}, ...],
      "capabilities": [
        {"id": "A", "budget": 6, "deadline": 3, "performance_floor": 0.5,
         "system_candidates": {"1": {"cost": 5, "duration": 2, "performance": 0.8}},
         "interface_candidates": {}}
      ]
    }

Candidate maps may instead (or additionally) come from a CSV table with
columns ``capability_id,kind,target_id,cost,duration,performance`` where
``kind`` is ``system`` or ``interface``.  The JSON document points at it with
a ``"candidates_table"`` entry holding a path relative to the document.
Extra top-level keys (``description``, ``notes``, ...) are kept verbatim in
``Scenario.meta``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import ParseError, ValidationError
from .genome import GenomeLayout

TABLE_COLUMNS = ("capability_id", "kind", "target_id", "cost", "duration", "performance")


class Attributes(NamedTuple):
    cost: float
    duration: float
    performance: float


@dataclass(frozen=True)
class SystemDef:
    id: int
    label: str = ""


@dataclass(frozen=True)
class InterfaceDef:
    id: int
    endpoints: tuple[int, int]


@dataclass(frozen=True)
class Capability:
    id: str
    budget: float
    deadline: float
    performance_floor: float
    system_candidates: dict[int, Attributes] = field(default_factory=dict)
    interface_candidates: dict[int, Attributes] = field(default_factory=dict)


@dataclass(frozen=True)
class Scenario:
    name: str
    systems: tuple[SystemDef, ...]
    interfaces: tuple[InterfaceDef, ...]
    capabilities: tuple[Capability, ...]
    expected_duration: float
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def n_sys(self) -> int:
        return len(self.systems)

    @property
    def n_if(self) -> int:
        return len(self.interfaces)

    @property
    def n_cap(self) -> int:
        return len(self.capabilities)

    @cached_property
    def layout(self) -> GenomeLayout:
        return GenomeLayout(self.n_sys)

    @cached_property
    def tables(self) -> "ScenarioTables":
        return ScenarioTables.build(self)


@dataclass(frozen=True, eq=False)
class ScenarioTables:
    """Dense per-capability attribute matrices indexed by genome bit position.

    System matrices are ``(n_cap, n_sys)``; interface matrices are
    ``(n_cap, n_pairs)`` with columns in genome interface-bit order, so a pair
    that no scenario interface covers is an all-False column.
    """

    sys_mask: np.ndarray
    sys_cost: np.ndarray
    sys_dur: np.ndarray
    sys_perf: np.ndarray
    if_mask: np.ndarray
    if_cost: np.ndarray
    if_dur: np.ndarray
    if_perf: np.ndarray
    budget: np.ndarray
    deadline: np.ndarray
    floor: np.ndarray
    has_if: np.ndarray
    pair_a: np.ndarray
    pair_b: np.ndarray
    pair_interface: np.ndarray  # scenario interface index per pair, -1 if none
    interface_pair: np.ndarray  # pair position per scenario interface

    @classmethod
    def build(cls, s: Scenario) -> "ScenarioTables":
        layout = s.layout
        n, n_pairs, n_cap = s.n_sys, layout.n_pairs, s.n_cap
        pair_a, pair_b = layout.pair_endpoints()
        pair_interface = np.full(n_pairs, -1, dtype=np.int64)
        interface_pair = np.zeros(s.n_if, dtype=np.int64)
        for k, iface in enumerate(s.interfaces):
            j, jp = iface.endpoints
            pos = layout.interface_bit_index(j, jp) - n
            pair_interface[pos] = k
            interface_pair[k] = pos
        sys = np.zeros((4, n_cap, n))
        ifs = np.zeros((4, n_cap, n_pairs))
        for i, cap in enumerate(s.capabilities):
            for j, a in cap.system_candidates.items():
                sys[:, i, j - 1] = (1.0, a.cost, a.duration, a.performance)
            for k, a in cap.interface_candidates.items():
                ifs[:, i, interface_pair[k - 1]] = (1.0, a.cost, a.duration, a.performance)
        caps = s.capabilities
        tables = cls(
            sys_mask=sys[0] > 0, sys_cost=sys[1], sys_dur=sys[2], sys_perf=sys[3],
            if_mask=ifs[0] > 0, if_cost=ifs[1], if_dur=ifs[2], if_perf=ifs[3],
            budget=np.array([c.budget for c in caps], dtype=float),
            deadline=np.array([c.deadline for c in caps], dtype=float),
            floor=np.array([c.performance_floor for c in caps], dtype=float),
            has_if=np.array([bool(c.interface_candidates) for c in caps]),
            pair_a=pair_a, pair_b=pair_b,
            pair_interface=pair_interface, interface_pair=interface_pair,
        )
        for arr in vars(tables).values():
            arr.setflags(write=False)
        return tables


# -- validation ---------------------------------------------------------------

def _bad_number(x, positive=False) -> bool:
    try:
        x = float(x)
    except (TypeError, ValueError):
        return True
    if not math.isfinite(x):
        return True
    return x <= 0 if positive else x < 0


def validate_scenario(s: Scenario) -> list[str]:
    """Return every invariant violation of ``s`` as ``"<entity>: <rule>"``.

    An empty list means the scenario is well formed and admits at least one
    feasible architecture.
    """
    out: list[str] = []
    n = len(s.systems)
    if n < 1:
        out.append("scenario: at least one system required")
    if not s.capabilities:
        out.append("scenario: at least one capability required")
    if _bad_number(s.expected_duration, positive=True):
        out.append("scenario: expected_duration must be finite and > 0")
    for pos, sd in enumerate(s.systems, start=1):
        if sd.id != pos:
            out.append(f"system {sd.id}: ids must be contiguous from 1")
    seen_pairs: dict[tuple[int, int], int] = {}
    for pos, iface in enumerate(s.interfaces, start=1):
        if iface.id != pos:
            out.append(f"interface {iface.id}: ids must be contiguous from 1")
        j, jp = iface.endpoints
        if not j < jp:
            out.append(f"interface {iface.id}: endpoints must differ, j < j'")
        elif j < 1 or jp > n:
            out.append(f"interface {iface.id}: endpoint out of range 1..{n}")
        elif (j, jp) in seen_pairs:
            out.append(f"interface {iface.id}: duplicate endpoint pair of interface {seen_pairs[(j, jp)]}")
        else:
            seen_pairs[(j, jp)] = iface.id
    cap_ids = set()
    for cap in s.capabilities:
        name = f"capability {cap.id}"
        if cap.id in cap_ids:
            out.append(f"{name}: duplicate id")
        cap_ids.add(cap.id)
        for label, value in (("budget", cap.budget), ("deadline", cap.deadline),
                             ("performance_floor", cap.performance_floor)):
            if _bad_number(value):
                out.append(f"{name}: {label} must be finite and >= 0")
        if not cap.system_candidates:
            out.append(f"{name}: no candidate systems")
        local_ok = True
        for kind, cands, limit in (("system", cap.system_candidates, n),
                                   ("interface", cap.interface_candidates, len(s.interfaces))):
            for ref, attrs in cands.items():
                if not 1 <= ref <= limit:
                    out.append(f"{name}: unknown {kind} {ref}")
                    local_ok = False
                for label, value in zip(Attributes._fields, attrs):
                    if _bad_number(value):
                        out.append(f"{name}: {kind} {ref} {label} must be finite and >= 0")
                        local_ok = False
        if not local_ok or not cap.system_candidates:
            continue
        for kind, cands in (("system", cap.system_candidates), ("interface", cap.interface_candidates)):
            if not cands:
                continue
            if max(a.performance for a in cands.values()) < cap.performance_floor:
                out.append(f"{name}: performance floor unreachable" if kind == "system"
                           else f"{name}: interface performance floor unreachable")
            elif not any(a.performance >= cap.performance_floor and a.duration <= cap.deadline
                         and a.cost <= cap.budget for a in cands.values()):
                out.append(f"{name}: no candidate {kind} meets budget, deadline and floor together")
    if not out:
        from .constraints import feasible_completion

        if feasible_completion(s, [-1] * s.layout.total_bits) is None:
            out.append("scenario: no architecture satisfies all capabilities jointly")
    return out


# -- document I/O -------------------------------------------------------------

def _attrs(obj, where: str) -> Attributes:
    try:
        return Attributes(float(obj["cost"]), float(obj["duration"]), float(obj["performance"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{where}: expected cost/duration/performance numbers") from exc


def read_candidate_table(path) -> list[dict]:
    """Rows of a candidate CSV as dicts with typed values."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or set(TABLE_COLUMNS) - set(reader.fieldnames):
            raise ParseError(f"{path}: candidate table needs columns {','.join(TABLE_COLUMNS)}")
        for lineno, row in enumerate(reader, start=2):
            kind = row["kind"].strip()
            if kind not in ("system", "interface"):
                raise ParseError(f"{path}:{lineno}: kind must be 'system' or 'interface'")
            try:
                rows.append({
                    "capability_id": row["capability_id"].strip(),
                    "kind": kind,
                    "target_id": int(row["target_id"]),
                    "attrs": Attributes(float(row["cost"]), float(row["duration"]),
                                        float(row["performance"])),
                })
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from exc
    return rows


def scenario_from_dict(doc: dict, table_rows: list[dict] | None = None) -> Scenario:
    """Build (without validating) a scenario from its parsed document tree."""
    try:
        systems = tuple(SystemDef(int(x["id"]), str(x.get("label", ""))) for x in doc["systems"])
        interfaces = tuple(
            InterfaceDef(int(x["id"]), (int(x["endpoints"][0]), int(x["endpoints"][1])))
            for x in doc.get("interfaces", [])
        )
        raw_caps = doc["capabilities"]
        expected = float(doc["expected_duration"])
        name = str(doc.get("name", ""))
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ParseError(f"malformed scenario document: {exc!r}") from exc

    caps = []
    by_id: dict[str, tuple[dict, dict]] = {}
    for c in raw_caps:
        try:
            cid = str(c["id"])
            sc = {int(k): _attrs(v, f"capability {cid} system {k}")
                  for k, v in c.get("system_candidates", {}).items()}
            ic = {int(k): _attrs(v, f"capability {cid} interface {k}")
                  for k, v in c.get("interface_candidates", {}).items()}
            caps.append((cid, float(c["budget"]), float(c["deadline"]), float(c["performance_floor"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed capability entry: {exc!r}") from exc
        by_id[cid] = (sc, ic)
    for row in table_rows or ():
        if row["capability_id"] not in by_id:
            raise ValidationError(f"candidate table: unknown capability {row['capability_id']}")
        sc, ic = by_id[row["capability_id"]]
        target = sc if row["kind"] == "system" else ic
        if row["target_id"] in target and target[row["target_id"]] != row["attrs"]:
            raise ValidationError(
                f"capability {row['capability_id']}: conflicting {row['kind']} {row['target_id']} "
                "entries in document and table")
        target[row["target_id"]] = row["attrs"]
    capabilities = tuple(
        Capability(cid, budget, deadline, floor, *by_id[cid]) for cid, budget, deadline, floor in caps
    )
    reserved = {"name", "systems", "interfaces", "capabilities", "expected_duration", "candidates_table"}
    meta = {k: v for k, v in doc.items() if k not in reserved}
    return Scenario(name, systems, interfaces, capabilities, expected, meta)


def load_scenario(path, table=None) -> Scenario:
    """Read and validate a scenario document.

    ``table`` optionally names a candidate CSV to merge; a
    ``"candidates_table"`` entry inside the document is honoured as well.
    Raises :class:`ParseError` or :class:`ValidationError`.
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: top level must be an object")
    rows = []
    if doc.get("candidates_table"):
        rows += read_candidate_table(path.parent / doc["candidates_table"])
    if table is not None:
        rows += read_candidate_table(table)
    s = scenario_from_dict(doc, rows)
    problems = validate_scenario(s)
    if problems:
        raise ValidationError(problems)
    return s


def _num(x: float):
    return int(x) if float(x).is_integer() else x


def scenario_to_dict(s: Scenario, with_candidates: bool = True) -> dict:
    def attrs(a: Attributes) -> dict:
        return {"cost": _num(a.cost), "duration": _num(a.duration), "performance": _num(a.performance)}

    caps = []
    for c in s.capabilities:
        entry = {"id": c.id, "budget": _num(c.budget), "deadline": _num(c.deadline),
                 "performance_floor": _num(c.performance_floor)}
        if with_candidates:
            entry["system_candidates"] = {str(k): attrs(v) for k, v in c.system_candidates.items()}
            entry["interface_candidates"] = {str(k): attrs(v) for k, v in c.interface_candidates.items()}
        caps.append(entry)
    doc = {"name": s.name, **s.meta, "expected_duration": _num(s.expected_duration),
           "systems": [{"id": x.id, "label": x.label} for x in s.systems],
           "interfaces": [{"id": x.id, "endpoints": list(x.endpoints)} for x in s.interfaces],
           "capabilities": caps}
    return doc


def save_scenario(s: Scenario, path, table=None) -> None:
    """Write ``s`` as JSON; with ``table`` the candidates go to that CSV instead."""
    path = Path(path)
    doc = scenario_to_dict(s, with_candidates=table is None)
    if table is not None:
        table = Path(table)
        with open(table, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(TABLE_COLUMNS)
            for c in s.capabilities:
                for kind, cands in (("system", c.system_candidates), ("interface", c.interface_candidates)):
                    for k, a in cands.items():
                        w.writerow([c.id, kind, k, repr(a.cost), repr(a.duration), repr(a.performance)])
        doc["candidates_table"] = table.name if table.parent.resolve() == path.parent.resolve() else str(table)
    path.write_text(json.dumps(doc, indent=2) + "\n")


def bundled_path(name: str) -> Path:
    """Filesystem path of a file shipped with the package (``tiny3``, ``ew22``, ``ew22_seeds.txt``)."""
    fname = name if Path(name).suffix else f"{name}.json"
    return Path(str(resources.files("sosarch") / "data" / fname))


def resolve_scenario(ref) -> Scenario:
    """Load a scenario from a path, falling back to a bundled name."""
    p = Path(ref)
    if not p.exists():
        bp = bundled_path(str(ref))
        if bp.exists():
            p = bp
    return load_scenario(p)


# -- synthetic instances ------------------------------------------------------

def random_scenario(rng: np.random.Generator, n_sys: int, n_cap: int, *,
                    interface_density: float = 0.5, name: str = "random",
                    max_tries: int = 1000) -> Scenario:
    """Draw a random valid scenario with small integer costs and durations.

    Candidate sets overlap across capabilities so that selections interact
    through shared systems.  Resamples until :func:`validate_scenario` passes.
    """
    pairs = [(j, jp) for j in range(1, n_sys + 1) for jp in range(j + 1, n_sys + 1)]
    for _ in range(max_tries):
        chosen = [p for p in pairs if rng.random() < interface_density]
        interfaces = tuple(InterfaceDef(k, p) for k, p in enumerate(chosen, start=1))
        caps = []
        for i in range(n_cap):
            n_cand = int(rng.integers(1, n_sys + 1))
            members = sorted(int(j) + 1 for j in rng.choice(n_sys, size=n_cand, replace=False))
            sc = {j: Attributes(float(rng.integers(1, 6)), float(rng.integers(1, 4)),
                                round(float(rng.uniform(0.3, 1.0)), 2)) for j in members}
            local = [k for k, (j, jp) in enumerate(chosen, start=1)
                     if j in members or jp in members]
            ic = {}
            if local and rng.random() < 0.6:
                for k in rng.choice(local, size=min(len(local), int(rng.integers(1, 4))), replace=False):
                    ic[int(k)] = Attributes(float(rng.integers(0, 3)), float(rng.integers(1, 4)),
                                            round(float(rng.uniform(0.3, 1.0)), 2))
            best = max(a.performance for a in sc.values())
            if ic:
                best = min(best, max(a.performance for a in ic.values()))
            floor = round(float(rng.uniform(0.1, 0.8)) * best, 2)
            total = sum(a.cost for a in sc.values()) + sum(a.cost for a in ic.values())
            budget = float(max(round(total * rng.uniform(0.5, 1.1)), min(a.cost for a in sc.values())))
            deadline = float(rng.integers(2, 5))
            caps.append(Capability(chr(ord("A") + i), budget, deadline, floor, sc, dict(sorted(ic.items()))))
        s = Scenario(name, tuple(SystemDef(j, f"S{j}") for j in range(1, n_sys + 1)),
                     interfaces, tuple(caps), float(rng.integers(3, 8)))
        if not validate_scenario(s):
            return s
    raise RuntimeError("could not draw a valid scenario")
