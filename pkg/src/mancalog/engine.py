"""Fixpoint evaluation of programs over a labeled graph.

``gamma_step`` is the plain synchronous operator: every candidate cell is
recomputed from the input interpretation. ``gamma_fixpoint`` produces the
same sequence of iterates, but after the first round it only recomputes
cells whose inputs changed in the previous round.
"""

from __future__ import annotations

import os
import time
from collections import defaultdict
from collections.abc import Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .errors import EngineError, ResourceLimitError
from .intervals import EMPTY, FULL, WeightInterval, interval_intersect, interval_subseteq
from .model import (
    Cell,
    CellView,
    Component,
    Formula,
    Graph,
    Interpretation,
    Node,
    World,
    cell_key,
    formula_labels,
)
from .program import Program, Rule, influence_eval, validate_program
from .errors import ValidationError

_EMPTY_WORLD = World({})


class NetworkView:
    """The network interpretation I(t) of an interpretation, as component -> world."""

    __slots__ = ("interp", "t")

    def __init__(self, interp: Interpretation, t: int):
        self.interp = interp
        self.t = t

    def world(self, c: Component) -> CellView:
        return CellView(self.interp.cells, self.t, c)


def _world_getter(ni):
    if isinstance(ni, NetworkView):
        return ni.world
    if isinstance(ni, Mapping):
        return lambda c: ni.get(c, _EMPTY_WORLD)
    raise TypeError("expected a NetworkView or a mapping from components to worlds")


# -- Elig / Qual / Bound ----------------------------------------------------


def eligible_set(v: Node, g_edge: Formula, g_node: Formula, ni, g: Graph) -> set[Node]:
    world = _world_getter(ni)
    return {
        u
        for u in g.predecessors(v)
        if g_node.satisfied_by(world(u)) and g_edge.satisfied_by(world((u, v)))
    }


def qualifying_set(v: Node, g_edge: Formula, g_node: Formula, h: Formula, ni, g: Graph) -> set[Node]:
    world = _world_getter(ni)
    return {u for u in eligible_set(v, g_edge, g_node, ni, g) if h.satisfied_by(world(u))}


def bound(r: Rule, v: Node, ni, g: Graph) -> WeightInterval:
    nc = r.neighbor
    elig = eligible_set(v, nc.g_edge, nc.g_node, ni, g)
    world = _world_getter(ni)
    q = sum(1 for u in elig if nc.h.satisfied_by(world(u)))
    return influence_eval(nc.ifl, q, len(elig))


# -- target time sets -------------------------------------------------------


def tts_rule(i: Interpretation, v: Node, r: Rule) -> set[int]:
    """Times t in [delta_t, t_max] whose delayed world I(t - delta_t)(v) meets the target."""
    return {
        t
        for t in range(r.delta_t, i.t_max + 1)
        if r.target.satisfied_by(i.world(t - r.delta_t, v))
    }


def tts_program(i: Interpretation, c: Component, label: str, p: Program) -> set[int]:
    times: set[int] = set()
    if not isinstance(c, tuple):
        for r in p.rules:
            if r.head.name == label:
                times |= tts_rule(i, c, r)
    for fact in p.facts:
        if fact.component == c and fact.atom.label.name == label:
            times.update(range(fact.t1, fact.t2 + 1))
    for ic in p.ics:
        if ic.head.label.name == label:
            times.update(t for t in range(i.t_max + 1) if ic.body_holds(i.world(t, c)))
    return times


# -- the operator -----------------------------------------------------------


class _Evaluator:
    """Static indexes over a program/graph pair, shared by every Γ round."""

    def __init__(self, p: Program, g: Graph):
        self.p = p
        self.g = g
        self.t_max = p.t_max
        self.rules_by_head: dict[str, list[Rule]] = defaultdict(list)
        self.ics_by_head = defaultdict(list)
        for r in p.rules:
            self.rules_by_head[r.head.name].append(r)
        for ic in p.ics:
            self.ics_by_head[ic.head.label.name].append(ic)

        self.fact_bounds: dict[Cell, WeightInterval] = {}
        for fact in p.facts:
            name = fact.atom.label.name
            for t in range(max(fact.t1, 0), min(fact.t2, self.t_max) + 1):
                key = (t, fact.component, name)
                self.fact_bounds[key] = interval_intersect(self.fact_bounds.get(key, FULL), fact.atom.bnd)

        # dependency indexes: label -> consumers
        self.ics_by_body = defaultdict(list)
        for ic in p.ics:
            for name in {a.label.name for a in ic.body}:
                self.ics_by_body[name].append(ic)
        self.rules_by_target = defaultdict(list)
        self.rules_by_neighbor = defaultdict(list)
        self.rules_by_edge = defaultdict(list)
        for r in p.rules:
            nc = r.neighbor
            for name in formula_labels(r.target):
                self.rules_by_target[name].append(r)
            for name in formula_labels(nc.g_node) | formula_labels(nc.h):
                self.rules_by_neighbor[name].append(r)
            for name in formula_labels(nc.g_edge):
                self.rules_by_edge[name].append(r)

    def candidate_cells(self) -> set[Cell]:
        cells = set(self.fact_bounds)
        times = range(self.t_max + 1)
        for label in self.ics_by_head:
            for c in self.g.components:
                cells.update((t, c, label) for t in times)
        for label in self.rules_by_head:
            for v in self.g.nodes:
                cells.update((t, v, label) for t in times)
        return cells

    def rule_bound(self, cells, r: Rule, v: Node, t: int) -> WeightInterval:
        nc = r.neighbor
        g_edge, g_node, h = nc.g_edge, nc.g_node, nc.h
        q = e = 0
        for u in self.g.predecessors(v):
            if g_node.satisfied_by(CellView(cells, t, u)) and g_edge.satisfied_by(CellView(cells, t, (u, v))):
                e += 1
                if h.satisfied_by(CellView(cells, t, u)):
                    q += 1
        return influence_eval(nc.ifl, q, e)

    def constraint(self, cells, cell: Cell) -> WeightInterval:
        """FBnd ∩ IBnd ∩ RBnd for one cell, reading ``cells``."""
        t, c, label = cell
        acc = self.fact_bounds.get(cell, FULL)
        ics = self.ics_by_head.get(label)
        if ics:
            here = CellView(cells, t, c)
            for ic in ics:
                if ic.body_holds(here):
                    acc = interval_intersect(acc, ic.head.bnd)
        if not isinstance(c, tuple):
            for r in self.rules_by_head.get(label, ()):
                past = t - r.delta_t
                if past < 0 or not r.target.satisfied_by(CellView(cells, past, c)):
                    continue
                acc = interval_intersect(acc, self.rule_bound(cells, r, c, past))
        return acc

    def update(self, cells, targets) -> dict[Cell, WeightInterval]:
        """New bounds for the targets whose value changes; reads only ``cells``."""
        changed = {}
        for cell in targets:
            prv = cells.get(cell, FULL)
            new = interval_intersect(prv, self.constraint(cells, cell))
            if new != prv:
                changed[cell] = new
        return changed

    def dependents(self, changed) -> set[Cell]:
        t_max = self.t_max
        g = self.g
        out: set[Cell] = set()
        for t, c, label in changed:
            for ic in self.ics_by_body.get(label, ()):
                out.add((t, c, ic.head.label.name))
            if isinstance(c, tuple):
                for r in self.rules_by_edge.get(label, ()):
                    tt = t + r.delta_t
                    if tt <= t_max:
                        out.add((tt, c[1], r.head.name))
                continue
            for r in self.rules_by_target.get(label, ()):
                tt = t + r.delta_t
                if tt <= t_max:
                    out.add((tt, c, r.head.name))
            rules = self.rules_by_neighbor.get(label)
            if rules:
                succ = g.successors(c)
                for r in rules:
                    tt = t + r.delta_t
                    if tt <= t_max:
                        name = r.head.name
                        out.update((tt, v, name) for v in succ)
        return out


def gamma_step(p: Program, g: Graph, i: Interpretation) -> Interpretation:
    """One synchronous application of Γ to ``i``."""
    ev = _Evaluator(p, g)
    changed = ev.update(i.cells, ev.candidate_cells())
    return i.replace(changed) if changed else i


# -- fixpoint driver --------------------------------------------------------


class _Top:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "TOP"

    def __reduce__(self):
        return (_Top, ())


TOP = _Top()


@dataclass
class FixpointResult:
    model: object  # Interpretation, or TOP when inconsistent
    iterations: int
    final: Interpretation
    witness: Optional[Cell] = None
    trace: list = field(default_factory=list)
    touched: int = 0

    @property
    def consistent(self) -> bool:
        return self.model is not TOP


def convergence_bound(p: Program, g: Graph) -> int:
    """|P| * d_in * t_max * |E|, each factor floored at one (t_max counted as |τ|)."""
    return max(1, p.size) * max(1, g.max_in_degree()) * (p.t_max + 1) * max(1, len(g.edges))


def seed_interpretation(p: Program) -> Interpretation:
    """All-[0,1] start with non-fluent fact bounds pre-applied.

    Every model strictly satisfies the non-fluent facts and leaves every other
    non-fluent cell at [0, 1], so this start still precedes all models.
    """
    cells = {}
    for fact in p.facts:
        if fact.fluent:
            continue
        for t in range(p.t_max + 1):
            key = (t, fact.component, fact.atom.label.name)
            cells[key] = interval_intersect(cells.get(key, FULL), fact.atom.bnd)
    return Interpretation(p.t_max, cells)


def _default_threads() -> int:
    return os.cpu_count() or 1


def _parallel_update(ev: _Evaluator, cells, targets, threads: int, pool) -> dict[Cell, WeightInterval]:
    ordered = sorted(targets, key=cell_key)
    if threads <= 1 or pool is None or len(ordered) < 256:
        return ev.update(cells, ordered)
    size = -(-len(ordered) // threads)
    chunks = [ordered[k:k + size] for k in range(0, len(ordered), size)]
    merged: dict[Cell, WeightInterval] = {}
    for part in pool.map(lambda chunk: ev.update(cells, chunk), chunks):
        merged.update(part)
    return merged


def _iterate(ev: _Evaluator, start: Interpretation, max_iters: int, threads: int,
             trace: bool) -> FixpointResult:
    cells = dict(start.cells)
    records = []
    touched: set[Cell] = set()
    k = 0
    targets: set[Cell] = ev.candidate_cells()
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        while True:
            began = time.perf_counter()
            changed = _parallel_update(ev, cells, targets, threads, pool)
            if trace:
                records.append({
                    "iteration": k + 1,
                    "changed_cells": len(changed),
                    "wall_time": time.perf_counter() - began,
                })
            if not changed:
                break
            k += 1
            if k > max_iters:
                raise ResourceLimitError(f"fixpoint did not converge within {max_iters} iterations")
            cells.update(changed)
            touched.update(changed)
            empties = sorted((c for c, b in changed.items() if b is EMPTY), key=cell_key)
            if empties:
                final = Interpretation(start.t_max, cells)
                return FixpointResult(TOP, k, final, empties[0], records, len(touched))
            targets = ev.dependents(changed)
    finally:
        if pool is not None:
            pool.shutdown()
    final = Interpretation(start.t_max, cells)
    return FixpointResult(final, max(k, 1), final, None, records, len(touched))


def gamma_fixpoint(
    p: Program,
    g: Graph,
    *,
    max_iters: Optional[int] = None,
    threads: Optional[int] = None,
    trace: bool = False,
    validate: bool = True,
) -> FixpointResult:
    """Iterate Γ to its fixpoint, stopping early on the first empty bound."""
    if validate:
        diags = validate_program(p, g)
        if diags:
            raise ValidationError(diags)
    ev = _Evaluator(p, g)
    cap = convergence_bound(p, g) if max_iters is None else max_iters
    return _iterate(ev, seed_interpretation(p), cap, threads or _default_threads(), trace)


# -- canonical models -------------------------------------------------------


def in_tts(ev: _Evaluator, cells, cell: Cell) -> bool:
    t, c, label = cell
    if cell in ev.fact_bounds:
        return True
    here = CellView(cells, t, c)
    if any(ic.body_holds(here) for ic in ev.ics_by_head.get(label, ())):
        return True
    if not isinstance(c, tuple):
        for r in ev.rules_by_head.get(label, ()):
            past = t - r.delta_t
            if past >= 0 and r.target.satisfied_by(CellView(cells, past, c)):
                return True
    return False


def canonicalize(p: Program, g: Graph, fix: FixpointResult, *, max_rounds: Optional[int] = None,
                 threads: Optional[int] = None) -> FixpointResult:
    """Carry bounds forward across non-target time points, re-running Γ until both settle.

    Returns a ``FixpointResult`` whose model is TOP if carried bounds make
    the program inconsistent.
    """
    if not fix.consistent:
        raise EngineError("cannot canonicalize an inconsistent fixpoint")
    ev = _Evaluator(p, g)
    current: Interpretation = fix.model
    cap = max_rounds if max_rounds is not None else convergence_bound(p, g) * max(1, len(p.labels))
    iterations = fix.iterations
    for _ in range(cap + 1):
        cells = dict(current.cells)
        carried = False
        for t in range(1, p.t_max + 1):
            pairs = {(c, label) for (tt, c, label) in cells if tt == t - 1 or tt == t}
            for c, label in sorted(pairs, key=lambda x: cell_key((0, x[0], x[1]))):
                prev = cells.get((t - 1, c, label), FULL)
                cur = cells.get((t, c, label), FULL)
                if prev == cur or in_tts(ev, cells, (t, c, label)):
                    continue
                if prev is FULL:
                    cells.pop((t, c, label), None)
                else:
                    cells[(t, c, label)] = prev
                carried = True
        if not carried:
            return FixpointResult(current, iterations, current, None, [], fix.touched)
        res = _iterate(ev, Interpretation(p.t_max, cells), convergence_bound(p, g),
                       threads or 1, False)
        iterations += res.iterations
        if not res.consistent:
            return FixpointResult(TOP, iterations, res.final, res.witness, [], res.touched)
        current = res.model
    raise ResourceLimitError("canonicalization did not settle")


# -- ordering ---------------------------------------------------------------


def interp_precedes(i1: Interpretation, i2: Interpretation) -> bool:
    """I1 ⊑ I2: every bound of I2 lies within the corresponding bound of I1."""
    if i1.t_max != i2.t_max:
        raise EngineError("interpretations have different time horizons")
    for key, b1 in i1.cells.items():
        if not interval_subseteq(i2.cells.get(key, FULL), b1):
            return False
    return True
