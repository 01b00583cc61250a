"""Direct model checking of an interpretation against a program.

Deliberately independent of ``engine``: it enumerates the satisfaction
conditions one by one so it can serve as an oracle for the fixpoint.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

from .intervals import EMPTY, FULL
from .model import Component, Graph, Interpretation, NetworkAtom, Or, Not, World, conjunction, world_satisfies
from .program import Program, influence_eval


@dataclass(frozen=True)
class Violation:
    kind: str
    t: int
    component: Component
    label: str
    message: str


def check_model(p: Program, g: Graph, i: Interpretation, canonical: bool = False) -> tuple[bool, list[Violation]]:
    """Return ``(is_model, violations)`` for ``i`` as a (canonical) model of ``p``."""
    t_max = p.t_max
    times = range(t_max + 1)
    entries: dict[tuple[int, Component], dict[str, object]] = defaultdict(dict)
    for (t, c, label), bnd in i.cells.items():
        entries[(t, c)][label] = bnd
    worlds: dict[tuple[int, Component], World] = {}

    def world(t: int, c: Component) -> World:
        key = (t, c)
        w = worlds.get(key)
        if w is None:
            w = worlds[key] = World(entries.get(key, {}))
        return w

    def value(t: int, c: Component, label: str):
        return entries.get((t, c), {}).get(label, FULL)

    in_edges: dict[str, list[str]] = defaultdict(list)
    for u, v in g.edges:
        in_edges[v].append(u)

    out: list[Violation] = []

    for (t, c, label), bnd in i.cells.items():
        if bnd is EMPTY:
            out.append(Violation("empty", t, c, label, "bound is empty"))

    def rule_times(r, v):
        return [t for t in times if t - r.delta_t >= 0 and world_satisfies(world(t - r.delta_t, v), r.target)]

    tts: dict[tuple[Component, str], set[int]] = defaultdict(set)
    for r in p.rules:
        for v in g.nodes:
            tts[(v, r.head.name)].update(rule_times(r, v))
    for fact in p.facts:
        tts[(fact.component, fact.atom.label.name)].update(range(fact.t1, fact.t2 + 1))
    for ic in p.ics:
        for c in g.components:
            for t in times:
                if all(world_satisfies(world(t, c), a) for a in ic.body):
                    tts[(c, ic.head.label.name)].add(t)

    for fact in p.facts:
        name = fact.atom.label.name
        for t in range(fact.t1, fact.t2 + 1):
            if fact.fluent:
                if not world_satisfies(world(t, fact.component), fact.atom):
                    out.append(Violation("fact", t, fact.component, name, f"fact {fact.atom} not satisfied"))
            elif value(t, fact.component, name) != fact.atom.bnd:
                out.append(Violation("fact", t, fact.component, name, f"non-fluent fact {fact.atom} not strictly satisfied"))

    for ic in p.ics:
        test = Or(Not(conjunction(ic.body)), ic.head)
        for c in g.components:
            for t in times:
                if not world_satisfies(world(t, c), test):
                    out.append(Violation("ic", t, c, ic.head.label.name, "integrity constraint violated"))

    for r in p.rules:
        nc = r.neighbor
        for v in g.nodes:
            for t in rule_times(r, v):
                past = t - r.delta_t
                elig = [
                    u for u in in_edges[v]
                    if world_satisfies(world(past, u), nc.g_node) and world_satisfies(world(past, (u, v)), nc.g_edge)
                ]
                qual = [u for u in elig if world_satisfies(world(past, u), nc.h)]
                required = NetworkAtom(r.head, influence_eval(nc.ifl, len(qual), len(elig)))
                if not world_satisfies(world(t, v), required):
                    out.append(Violation("rule", t, v, r.head.name, f"bound {value(t, v, r.head.name)} not within {required.bnd}"))

    pairs = {(c, label) for (_, c, label) in i.cells}
    for c, label in pairs:
        targets = tts.get((c, label), set())
        for t in times:
            if t in targets:
                continue
            here = value(t, c, label)
            if canonical and t > 0:
                if here != value(t - 1, c, label):
                    out.append(Violation("carry", t, c, label, "non-target bound differs from previous time point"))
            elif here != FULL:
                out.append(Violation("unconstrained", t, c, label, f"non-target bound {here} should be [0, 1]"))

    return (not out, out)
