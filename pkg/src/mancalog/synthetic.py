"""Seeded generators for random graphs, programs and membership problems.

Used by the test and acceptance suites and by benchmarks. Every generator
takes an explicit ``random.Random`` so runs are reproducible.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Optional

from .engine import gamma_fixpoint
from .intervals import FULL, WeightInterval, _make
from .membership import MembershipProblem
from .model import FALSE, TRUE, And, Formula, Graph, Label, NetworkAtom, Not, Or, conjunction
from .program import (
    Fact,
    FracThreshold,
    IntegrityConstraint,
    NeighborCriterion,
    Program,
    Rule,
    Suppress,
    Table,
    Tip,
)

DENOMINATORS = (2, 4, 5, 10)


def random_graph(rng: random.Random, n_nodes: int, n_edges: int, prefix: str = "n") -> Graph:
    """Simple directed graph; ``n_edges`` is capped at n(n-1)."""
    nodes = [f"{prefix}{i}" for i in range(n_nodes)]
    cap = n_nodes * (n_nodes - 1)
    n_edges = min(n_edges, cap)
    edges: set[tuple[str, str]] = set()
    if n_edges > cap // 2:
        pool = [(u, v) for u in nodes for v in nodes if u != v]
        edges = set(rng.sample(pool, n_edges))
    else:
        while len(edges) < n_edges:
            u, v = rng.sample(nodes, 2)
            edges.add((u, v))
    return Graph(nodes, sorted(edges))


def random_rational(rng: random.Random) -> Fraction:
    d = rng.choice(DENOMINATORS)
    return Fraction(rng.randint(0, d), d)


def random_interval(rng: random.Random, allow_open: bool = True, wide: bool = False) -> WeightInterval:
    """A non-empty sub-interval of [0,1] with lattice endpoints."""
    while True:
        a, b = sorted((random_rational(rng), random_rational(rng)))
        if wide:
            a, b = min(a, Fraction(1, 2)), max(b, Fraction(1, 2))
        lo_open = allow_open and a < b and rng.random() < 0.15
        hi_open = allow_open and a < b and rng.random() < 0.15
        if lo_open and hi_open and a == b:
            continue
        return _make(a, b, lo_open, hi_open)


def random_atom(rng: random.Random, labels: list[Label], wide: bool = False) -> NetworkAtom:
    return NetworkAtom(rng.choice(labels), random_interval(rng, wide=wide))


def random_formula(rng: random.Random, labels: list[Label], depth: int = 2) -> Formula:
    """Arbitrary formula over ``labels``; TRUE when there are none."""
    if not labels:
        return TRUE
    roll = rng.random()
    if depth <= 0 or roll < 0.4:
        if rng.random() < 0.1:
            return rng.choice((TRUE, FALSE))
        return random_atom(rng, labels, wide=True)
    if roll < 0.55:
        return Not(random_formula(rng, labels, depth - 1))
    op = And if roll < 0.8 else Or
    return op(random_formula(rng, labels, depth - 1), random_formula(rng, labels, depth - 1))


def random_literals(rng: random.Random, labels: list[Label], positive: bool, n_max: int = 2) -> Formula:
    parts: list[Formula] = []
    for _ in range(rng.randint(1, n_max)):
        atom = random_atom(rng, labels, wide=True)
        parts.append(atom if positive or rng.random() < 0.7 else Not(atom))
    return conjunction(parts)


def random_ifl(rng: random.Random):
    kind = rng.random()
    if kind < 0.4:
        return Tip(Fraction(rng.randint(1, 10), 10))
    if kind < 0.65:
        return Suppress(Fraction(rng.randint(1, 10), 10))
    if kind < 0.85:
        return FracThreshold(Fraction(rng.randint(0, 4), 4), random_interval(rng, wide=True))
    # a table whose rows narrow as q grows, so it satisfies the monotonicity axiom
    rows = []
    for e in range(1, 4):
        current = FULL
        for q in range(e + 1):
            if rng.random() < 0.5:
                lo = max(current.lo, random_rational(rng) / 2)
                hi = min(current.hi, Fraction(1) - random_rational(rng) / 4)
                if lo <= hi:
                    current = _make(lo, hi, False, False).intersect(current)
            if not current.is_empty:
                rows.append(((q, e), current))
    return Table(tuple(rows))


def random_program(
    rng: random.Random,
    g: Graph,
    *,
    n_labels: int = 4,
    t_max: int = 2,
    n_rules: int = 5,
    n_facts: int = 8,
    n_ics: int = 1,
    positive_h: bool = False,
) -> Program:
    """A well-formed program over ``g``; it may or may not be consistent."""
    n_labels = max(2, n_labels)
    n_nonfluent = max(1, n_labels // 3)
    labels = [Label(f"N{i}", False) for i in range(n_nonfluent)]
    labels += [Label(f"F{i}", True) for i in range(n_labels - n_nonfluent)]
    nonfluent = [lab for lab in labels if not lab.fluent]
    fluent = [lab for lab in labels if lab.fluent]
    components = list(g.nodes) + list(g.edges)
    facts = []
    pinned: set = set()
    for _ in range(n_facts):
        if rng.random() < 0.5:
            label = rng.choice(nonfluent)
            c = rng.choice(components)
            if (c, label.name) in pinned:
                continue
            pinned.add((c, label.name))
            facts.append(Fact(NetworkAtom(label, random_interval(rng)), c, 0, t_max))
        else:
            t1 = rng.randint(0, t_max)
            t2 = rng.randint(t1, t_max)
            facts.append(Fact(NetworkAtom(rng.choice(fluent), random_interval(rng, wide=True)),
                              rng.choice(list(g.nodes)), t1, t2))
    ics = []
    for _ in range(n_ics):
        body = tuple(random_atom(rng, labels, wide=True) for _ in range(rng.randint(1, 2)))
        ics.append(IntegrityConstraint(NetworkAtom(rng.choice(fluent), random_interval(rng, wide=True)), body))
    rules = []
    for _ in range(n_rules):
        crit = NeighborCriterion(
            random_formula(rng, nonfluent, 1) if rng.random() < 0.3 else TRUE,
            random_formula(rng, nonfluent, 1) if rng.random() < 0.3 else TRUE,
            random_literals(rng, labels, positive_h),
            random_ifl(rng),
        )
        target = random_formula(rng, nonfluent, 1) if rng.random() < 0.6 else TRUE
        rules.append(Rule(rng.choice(fluent), rng.randint(0, min(1, t_max)), target, crit))
    return Program(tuple(labels), tuple(facts), tuple(ics), tuple(rules), t_max)


def random_consistent_program(rng: random.Random, g: Graph, attempts: int = 200, **kwargs) -> Program:
    """Rejection-sample ``random_program`` until the fixpoint is consistent."""
    for _ in range(attempts):
        p = random_program(rng, g, **kwargs)
        if gamma_fixpoint(p, g, threads=1).consistent:
            return p
    raise RuntimeError("no consistent program found; loosen the generator settings")


def random_instance(rng: random.Random, max_nodes: int = 50, max_labels: int = 8, max_tmax: int = 5,
                    max_rules: int = 20, positive_h: bool = False) -> tuple[Graph, Program]:
    n = rng.randint(2, max_nodes)
    g = random_graph(rng, n, rng.randint(0, min(3 * n, n * (n - 1))))
    p = random_consistent_program(
        rng, g,
        n_labels=rng.randint(2, max_labels),
        t_max=rng.randint(0, max_tmax),
        n_rules=rng.randint(0, max_rules),
        n_facts=rng.randint(0, 2 * n),
        n_ics=rng.randint(0, 3),
        positive_h=positive_h,
    )
    return g, p


def random_membership_problem(rng: random.Random, n_nodes: int, n_edges: int, n_groups: int,
                              known_fraction: float = 0.3, theta: Optional[Fraction] = None,
                              rounds: int = 0) -> MembershipProblem:
    g = random_graph(rng, n_nodes, n_edges)
    groups = tuple(f"g{i}" for i in range(n_groups))
    known = {n: rng.choice(groups) for n in g.nodes if rng.random() < known_fraction}
    alpha = {grp: Fraction(rng.randint(1, 10), 10) for grp in groups}
    return MembershipProblem(g, groups, known, alpha, theta if theta is not None else Fraction(1), rounds)


FIELD_SCALE = {"n_nodes": 2333, "n_edges": 3676, "n_groups": 58}


def field_scale_problem(seed: int = 0, theta: Optional[Fraction] = None) -> MembershipProblem:
    """Random network with the node, edge and rule counts of the field study."""
    return random_membership_problem(random.Random(seed), theta=theta, **FIELD_SCALE)
