"""Feasibility of architectures, conflict rules and repair.

Decoding reads the genome as the architecture: capability ``i`` selects
every active candidate system, and every active candidate interface whose
two endpoint systems are active.  Per capability the selection must stay
within budget, meet the deadline, reach the performance floor with a system
(and with an interface when the capability lists interface candidates) and
select at least one system.  Indicator bits are tight: an active system
must be a candidate of some capability, and an active interface bit must
join two active systems and be a candidate of some capability.

Conflict rules are exact: a value is admitted at a slot iff some feasible
genome extends the prefix with it.  They come from a small complete search
over the covering requirements (see :func:`feasible_completion`).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasiblePrefix, RepairFailure
from .genome import Genome
from .scenario import Scenario

# absolute slack on every budget/deadline/floor comparison
TOL = 1e-9

KINDS = ("budget", "deadline", "performance_floor", "coverage",
         "system_indicator", "interface_indicator", "interface_endpoints")


@dataclass(frozen=True)
class Violation:
    kind: str
    capability: str | None = None
    entity: str | None = None
    detail: str = ""

    def __str__(self):
        parts = [self.kind]
        if self.capability is not None:
            parts.append(f"capability={self.capability}")
        if self.entity is not None:
            parts.append(f"entity={self.entity}")
        return " ".join(parts) + f": {self.detail}"


@dataclass(frozen=True)
class Assignment:
    """Decoded selection indicators.

    ``systems[i, j]`` is 1 when capability ``i`` uses system ``j + 1`` and
    ``interfaces[i, k]`` when it uses scenario interface ``k + 1``.
    """

    systems: np.ndarray
    interfaces: np.ndarray


def _as_matrix(s: Scenario, bits) -> np.ndarray:
    X = np.asarray(bits, dtype=bool)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != s.layout.total_bits:
        raise ValueError(f"genome length {X.shape[1]} does not match layout ({s.layout.total_bits})")
    return X


def _selections(s: Scenario, X: np.ndarray):
    t = s.tables
    n = s.n_sys
    xs, xp = X[:, :n], X[:, n:]
    ends = xs[:, t.pair_a] & xs[:, t.pair_b]
    S = xs[:, None, :] & t.sys_mask
    I = (xp & ends)[:, None, :] & t.if_mask
    return xs, xp, ends, S, I


def evaluate_batch(s: Scenario, bits) -> dict[str, np.ndarray]:
    """Vectorised constraint evaluation over a ``(M, total_bits)`` 0/1 matrix.

    Returns per-genome arrays: ``cost``, ``duration``, ``performance``
    (``(M, n_cap)`` achieved values over systems and interfaces together),
    boolean violation arrays per constraint instance, ``violations``
    (count per genome) and ``feasible``.
    """
    t = s.tables
    X = _as_matrix(s, bits)
    xs, xp, ends, S, I = _selections(s, X)
    cost = (S * t.sys_cost).sum(-1) + (I * t.if_cost).sum(-1)
    d_sys = (S * t.sys_dur).max(-1, initial=0.0)
    d_if = (I * t.if_dur).max(-1, initial=0.0)
    p_sys = (S * t.sys_perf).max(-1, initial=0.0)
    p_if = (I * t.if_perf).max(-1, initial=0.0)
    out = {
        "budget": cost > t.budget + TOL,
        "deadline_sys": d_sys > t.deadline + TOL,
        "deadline_if": d_if > t.deadline + TOL,
        "floor_sys": p_sys < t.floor - TOL,
        "floor_if": t.has_if & (p_if < t.floor - TOL),
        "coverage": ~S.any(-1),
        "system_indicator": xs & ~t.sys_mask.any(0),
        "interface_indicator": xp & ~t.if_mask.any(0),
        "interface_endpoints": xp & ~ends,
    }
    count = sum(v.sum(-1) for v in out.values())
    out.update(
        cost=cost,
        duration=np.maximum(d_sys, d_if),
        performance=np.maximum(p_sys, p_if),
        violations=count,
        feasible=count == 0,
    )
    return out


def total_constraints(s: Scenario) -> int:
    """Number of constraint instances counted by :func:`check_feasible`."""
    return 6 * s.n_cap + s.n_sys + 2 * s.layout.n_pairs


def decode_assignment(s: Scenario, g: Genome) -> Assignment:
    _, _, _, S, I = _selections(s, _as_matrix(s, g.bits))
    ifs = I[0][:, s.tables.interface_pair] if s.n_if else np.zeros((s.n_cap, 0), dtype=bool)
    return Assignment(S[0].astype(np.uint8), ifs.astype(np.uint8))


def check_feasible(s: Scenario, g: Genome) -> list[Violation]:
    """All constraint violations of ``g``; empty iff the genome is feasible."""
    r = evaluate_batch(s, g.bits)
    t = s.tables
    caps = s.capabilities
    out: list[Violation] = []
    for i, cap in enumerate(caps):
        if r["budget"][0, i]:
            out.append(Violation("budget", cap.id, None,
                                 f"cost {r['cost'][0, i]:g} exceeds budget {cap.budget:g}"))
        for key, what in (("deadline_sys", "system"), ("deadline_if", "interface")):
            if r[key][0, i]:
                out.append(Violation("deadline", cap.id, None,
                                     f"selected {what} duration exceeds deadline {cap.deadline:g}"))
        for key, what in (("floor_sys", "system"), ("floor_if", "interface")):
            if r[key][0, i]:
                out.append(Violation("performance_floor", cap.id, None,
                                     f"best selected {what} below floor {cap.performance_floor:g}"))
        if r["coverage"][0, i]:
            out.append(Violation("coverage", cap.id, None, "no candidate system selected"))
    for j in np.flatnonzero(r["system_indicator"][0]):
        out.append(Violation("system_indicator", None, f"S{j + 1}",
                             "active system is not a candidate of any capability"))
    for kind, detail in (("interface_indicator", "active interface is not a candidate of any capability"),
                         ("interface_endpoints", "active interface has an inactive endpoint")):
        for k in np.flatnonzero(r[kind][0]):
            out.append(Violation(kind, None, f"I{t.pair_a[k] + 1},{t.pair_b[k] + 1}", detail))
    return out


def is_feasible(s: Scenario, g: Genome) -> bool:
    return _solver(s).feasible_bits(g.bits)


# -- exact completion search --------------------------------------------------

class _Solver:
    """Set-based feasibility model over the bits that can ever be 1."""

    def __init__(self, s: Scenario):
        t = s.tables
        n, T = s.n_sys, s.layout.total_bits
        self.T = T
        self.budget = t.budget.tolist()
        self.item_caps: dict[int, list[tuple[int, float]]] = {}
        forbidden = set()
        self.endpoints: dict[int, tuple[int, int]] = {}
        for j in range(n):
            caps = np.flatnonzero(t.sys_mask[:, j])
            if caps.size == 0 or np.any(t.sys_dur[caps, j] > t.deadline[caps] + TOL) \
                    or np.any(t.sys_cost[caps, j] > t.budget[caps] + TOL):
                forbidden.add(j)
            self.item_caps[j] = [(int(i), float(t.sys_cost[i, j])) for i in caps]
        for k in range(s.layout.n_pairs):
            pos = n + k
            a, b = int(t.pair_a[k]), int(t.pair_b[k])
            self.endpoints[pos] = (a, b)
            caps = np.flatnonzero(t.if_mask[:, k])
            if caps.size == 0 or a in forbidden or b in forbidden \
                    or np.any(t.if_dur[caps, k] > t.deadline[caps] + TOL) \
                    or np.any(t.if_cost[caps, k] > t.budget[caps] + TOL):
                forbidden.add(pos)
            self.item_caps[pos] = [(int(i), float(t.if_cost[i, k])) for i in caps]
        self.forbidden = frozenset(forbidden)
        self.free_positions = [p for p in range(T) if p not in forbidden]
        reqs, req_cost = [], []
        for i in range(s.n_cap):
            good = [int(j) for j in np.flatnonzero(t.sys_mask[i])
                    if t.sys_perf[i, j] >= t.floor[i] - TOL and j not in forbidden]
            reqs.append(frozenset(good))
            req_cost.append((i, sorted((float(t.sys_cost[i, j]), j) for j in good)))
            if t.has_if[i] and t.floor[i] - TOL > 0:
                good = [int(k) for k in np.flatnonzero(t.if_mask[i])
                        if t.if_perf[i, k] >= t.floor[i] - TOL and n + k not in forbidden]
                reqs.append(frozenset(n + k for k in good))
                req_cost.append((i, sorted((float(t.if_cost[i, k]), n + k) for k in good)))
        self.reqs = reqs
        # (capability, sorted (own cost, option)) for the budget lower bound
        self.req_cost = req_cost

        def total_cost(p):
            items = (p, *self.endpoints.get(p, ()))
            return sum(c for q in items for _, c in self.item_caps[q])
        # branching order: cheapest option (with its endpoints) first
        self.req_order = {r: sorted(r, key=lambda p: (total_cost(p), p)) for r in reqs}

    # on-set must already be closed under interface endpoints
    def _costs(self, on) -> list[float] | None:
        costs = [0.0] * len(self.budget)
        for p in on:
            for i, c in self.item_caps[p]:
                costs[i] += c
        for i, c in enumerate(costs):
            if c > self.budget[i] + TOL:
                return None
        return costs

    def _closure(self, on, off):
        on = set(on)
        for p in list(on):
            if p in self.endpoints:
                for e in self.endpoints[p]:
                    if e in off:
                        return None
                    on.add(e)
        return on

    def feasible_on(self, on) -> bool:
        if not self.forbidden.isdisjoint(on):
            return False
        for p in on:
            if p in self.endpoints:
                a, b = self.endpoints[p]
                if a not in on or b not in on:
                    return False
        if self._costs(on) is None:
            return False
        return all(not r.isdisjoint(on) for r in self.reqs)

    def feasible_bits(self, bits) -> bool:
        return self.feasible_on(set(np.flatnonzero(bits).tolist()))

    def complete(self, fixed, preferred=None) -> list[int] | None:
        """A feasible 0/1 list agreeing with ``fixed`` wherever it is 0/1, or None."""
        on0 = {p for p, v in enumerate(fixed) if v == 1}
        off = {p for p, v in enumerate(fixed) if v == 0}
        return self.complete_sets(on0, off, preferred)

    def complete_sets(self, on0, off, preferred=None) -> list[int] | None:
        """As :meth:`complete` with the decided positions given as two sets."""
        if not self.forbidden.isdisjoint(on0):
            return None
        on = self._closure(on0, off)
        if on is None:
            return None
        costs = self._costs(on)
        if costs is None:
            return None
        found = self._search(on, off | self.forbidden, costs, preferred)
        if found is None:
            return None
        if preferred is not None:
            found = self._fill(found, on0, off, preferred)
        return self._to_bits(found)

    def _fill(self, on, on0, off, pref):
        # adding items can only break budgets or endpoints, so grow greedily
        on = set(on)
        costs = self._costs(on)
        for p in self.free_positions:
            if p in on or p in off or pref[p] != 1:
                continue
            if p in self.endpoints:
                a, b = self.endpoints[p]
                if a not in on or b not in on:
                    continue
            new_costs = list(costs)
            for i, c in self.item_caps[p]:
                new_costs[i] += c
            if all(c <= b + TOL for c, b in zip(new_costs, self.budget)):
                on.add(p)
                costs = new_costs
        return on

    def _to_bits(self, on) -> list[int]:
        out = [0] * self.T
        for p in on:
            out[p] = 1
        return out

    def _search(self, on, off, costs, pref):
        open_reqs = [k for k, r in enumerate(self.reqs) if r.isdisjoint(on)]
        if not open_reqs:
            return on
        need = list(costs)
        req, fewest = None, None
        for k in open_reqs:
            i, opts = self.req_cost[k]
            cheapest = next((c for c, p in opts if p not in off), None)
            if cheapest is None:
                return None
            need[i] += cheapest
            if need[i] > self.budget[i] + TOL:
                return None
            live = len(self.reqs[k].difference(off))
            if fewest is None or live < fewest:
                req, fewest = self.reqs[k], live
        order = self.req_order[req]
        if pref is not None:
            order = [c for c in order if pref[c] == 1] + [c for c in order if pref[c] != 1]
        off = set(off)
        for c in order:
            if c in off:
                continue
            add = [c]
            if c in self.endpoints:
                a, b = self.endpoints[c]
                if a in off or b in off:
                    continue
                add.extend(e for e in (a, b) if e not in on)
            new_costs = list(costs)
            for p in add:
                for i, v in self.item_caps[p]:
                    new_costs[i] += v
            if any(v > lim + TOL for v, lim in zip(new_costs, self.budget)):
                continue
            found = self._search(on.union(add), off, new_costs, pref)
            if found is not None:
                return found
            off.add(c)
        return None


def _solver(s: Scenario) -> _Solver:
    cached = s.__dict__.get("_solver")
    if cached is None:
        cached = _Solver(s)
        s.__dict__["_solver"] = cached
    return cached


def forbidden_positions(s: Scenario) -> frozenset[int]:
    """Bit positions that are 0 in every feasible genome by a single-item rule."""
    return _solver(s).forbidden


def feasible_completion(s: Scenario, fixed, preferred=None) -> np.ndarray | None:
    """Some feasible genome's bits matching ``fixed`` where it is 0 or 1.

    ``fixed`` holds -1 for undecided positions.  With ``preferred`` the
    search first tries to keep undecided bits at their preferred values.
    Returns None when no feasible genome agrees with ``fixed``.
    """
    fixed = [int(v) for v in fixed]
    pref = None if preferred is None else [int(v) for v in preferred]
    out = _solver(s).complete(fixed, pref)
    return None if out is None else np.array(out, dtype=np.uint8)


# -- conflict rules -----------------------------------------------------------

@dataclass(frozen=True)
class ConflictRuleSet:
    forbidden_assignments: frozenset = field(default_factory=frozenset)
    forced_assignments: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        forbidden = {}
        for pos, val in self.forbidden_assignments:
            forbidden.setdefault(pos, set()).add(val)
        for pos, vals in forbidden.items():
            if vals == {0, 1}:
                raise ValueError(f"position {pos}: both values forbidden")
        forced = {}
        for pos, val in self.forced_assignments:
            if forced.setdefault(pos, val) != val or val in forbidden.get(pos, ()):
                raise ValueError(f"position {pos}: inconsistent forced value")

    def allows(self, pos: int, value: int) -> bool:
        return (pos, value) not in self.forbidden_assignments and (pos, 1 - value) not in self.forced_assignments

    def forced_value(self, pos: int) -> int | None:
        for p, v in self.forced_assignments:
            if p == pos:
                return v
        return None

    def merge(self, other: "ConflictRuleSet") -> "ConflictRuleSet":
        return ConflictRuleSet(self.forbidden_assignments | other.forbidden_assignments,
                               self.forced_assignments | other.forced_assignments)


def admissible_values(s: Scenario, partial, slot: int, preferred=None) -> list[int]:
    """Values at ``slot`` that some feasible genome extending ``partial`` takes."""
    fixed = [int(v) for v in partial] + [-1] * (s.layout.total_bits - len(partial))
    solver = _solver(s)
    out = []
    for v in (0, 1):
        fixed[slot] = v
        if solver.complete(fixed, preferred) is not None:
            out.append(v)
    return out


def conflict_rules_for_slot(s: Scenario, partial, slot: int) -> ConflictRuleSet:
    """Forced/forbidden value for the next undecided bit given a decided prefix.

    Raises :class:`InfeasiblePrefix` when no feasible genome extends
    ``partial`` at all.
    """
    if slot != len(partial):
        raise ValueError(f"slot must be the next undecided bit ({len(partial)}), got {slot}")
    if slot >= s.layout.total_bits:
        raise IndexError("prefix already covers the whole genome")
    values = admissible_values(s, partial, slot)
    if not values:
        raise InfeasiblePrefix(f"no feasible genome extends the {slot}-bit prefix")
    if len(values) == 2:
        return ConflictRuleSet()
    v = values[0]
    return ConflictRuleSet(frozenset({(slot, 1 - v)}), frozenset({(slot, v)}))


# -- repair -------------------------------------------------------------------

def repair(s: Scenario, g: Genome, hint: Genome | None = None) -> Genome:
    """Map ``g`` to a feasible genome, keeping its bits wherever possible.

    Bits are revisited in layout order; each keeps its value unless no
    feasible genome extends the bits decided so far with it, in which case it
    takes the other value.  The result is therefore the feasible genome that
    agrees with ``g`` on the longest prefix, recursively.  Feasible genomes
    are returned unchanged.  ``hint`` is an optional known-feasible genome
    that only speeds up the walk.
    """
    solver = _solver(s)
    if solver.feasible_bits(g.bits):
        return g
    bits = g.bits.tolist()
    witness = None
    if hint is not None and solver.feasible_bits(hint.bits):
        witness = hint.bits.tolist()
    on, off = set(), set()
    fixed = [0] * solver.T
    forbidden = solver.forbidden
    for t in range(solver.T):
        v = 0 if t in forbidden else bits[t]
        if witness is None or witness[t] != v:
            w = solver.complete_sets(on | {t}, off, bits) if v else solver.complete_sets(on, off | {t}, bits)
            if w is not None:
                witness = w
            else:
                v = 1 - v
                if witness is None:
                    witness = (solver.complete_sets(on | {t}, off, bits) if v
                               else solver.complete_sets(on, off | {t}, bits))
                    if witness is None:
                        raise RepairFailure("scenario admits no feasible architecture")
        fixed[t] = v
        (on if v else off).add(t)
    return Genome(g.layout, fixed)
