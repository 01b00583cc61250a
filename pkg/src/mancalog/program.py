"""Facts, integrity constraints, influence functions, rules and programs."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Tuple, Union

from .diagnostics import Diagnostic, Span, error
from .errors import EngineError
from .intervals import FULL, ONE, ZERO, WeightInterval, _make, interval_subseteq, to_rational
from .model import (
    Component,
    Const,
    Formula,
    Graph,
    Label,
    NetworkAtom,
    Not,
    conjuncts,
    format_component,
    is_nonfluent,
)

# -- influence functions ----------------------------------------------------


@dataclass(frozen=True)
class Tip:
    """(q, e) -> [1 - (1 - alpha)^q, 1]: each qualifying neighbour pushes the weight up."""

    alpha: Fraction

    def __post_init__(self):
        object.__setattr__(self, "alpha", to_rational(self.alpha))
        if not ZERO < self.alpha <= ONE:
            raise ValueError("tip parameter must lie in (0, 1]")

    def evaluate(self, q: int, e: int) -> WeightInterval:
        if q == 0:
            return FULL
        return _make(ONE - (ONE - self.alpha) ** q, ONE, False, False)


@dataclass(frozen=True)
class Suppress:
    """(q, e) -> [0, (1 - beta)^q]: each qualifying neighbour pushes the weight down."""

    beta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "beta", to_rational(self.beta))
        if not ZERO < self.beta <= ONE:
            raise ValueError("suppress parameter must lie in (0, 1]")

    def evaluate(self, q: int, e: int) -> WeightInterval:
        if q == 0:
            return FULL
        return _make(ZERO, (ONE - self.beta) ** q, False, False)


@dataclass(frozen=True)
class FracThreshold:
    """(q, e) -> bnd when e > 0 and q / e >= theta, otherwise [0, 1]."""

    theta: Fraction
    bnd: WeightInterval

    def __post_init__(self):
        object.__setattr__(self, "theta", to_rational(self.theta))
        if not ZERO <= self.theta <= ONE:
            raise ValueError("threshold must lie in [0, 1]")

    def evaluate(self, q: int, e: int) -> WeightInterval:
        if e > 0 and Fraction(q, e) >= self.theta:
            return self.bnd
        return FULL


@dataclass(frozen=True)
class Table:
    """Explicit finite map (q, e) -> interval; unlisted pairs read ``default``."""

    rows: Tuple[Tuple[Tuple[int, int], WeightInterval], ...]
    default: WeightInterval = FULL

    def __post_init__(self):
        rows = tuple(sorted(((int(q), int(e)), b) for (q, e), b in self.rows))
        keys = [k for k, _ in rows]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate (q, e) entry in influence table")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "_lookup", dict(rows))

    def evaluate(self, q: int, e: int) -> WeightInterval:
        return self._lookup.get((q, e), self.default)

    def axiom_violations(self) -> list[tuple[int, int, int]]:
        """Triples (q, q', e) with q < q' <= e where ifl(q', e) is not within ifl(q, e)."""
        bad = []
        for e in sorted({e for (_, e), _ in self.rows}):
            values = [self.evaluate(q, e) for q in range(e + 1)]
            for q in range(e + 1):
                for q2 in range(q + 1, e + 1):
                    if not interval_subseteq(values[q2], values[q]):
                        bad.append((q, q2, e))
        return bad


InfluenceFunction = Union[Tip, Suppress, FracThreshold, Table]


@lru_cache(maxsize=65536)
def _cached_eval(ifl: InfluenceFunction, q: int, e: int) -> WeightInterval:
    return ifl.evaluate(q, e)


def influence_eval(ifl: InfluenceFunction, q: int, e: int) -> WeightInterval:
    if q < 0 or e < 0:
        raise EngineError(f"influence arguments must be natural numbers, got ({q}, {e})")
    if q > e:
        raise EngineError(f"qualifying count {q} exceeds eligible count {e}")
    return _cached_eval(ifl, q, e)


# -- program elements -------------------------------------------------------


@dataclass(frozen=True)
class Fact:
    atom: NetworkAtom
    component: Component
    t1: int
    t2: int
    span: Optional[Span] = field(default=None, compare=False, repr=False)

    @property
    def fluent(self) -> bool:
        return self.atom.label.fluent

    def covers(self, t: int) -> bool:
        return self.t1 <= t <= self.t2


@dataclass(frozen=True)
class IntegrityConstraint:
    """``head <- body``: wherever the body holds, the head's bound must hold too."""

    head: NetworkAtom
    body: Tuple[NetworkAtom, ...]
    span: Optional[Span] = field(default=None, compare=False, repr=False)

    def body_holds(self, world) -> bool:
        return all(a.satisfied_by(world) for a in self.body)


@dataclass(frozen=True)
class NeighborCriterion:
    g_edge: Formula
    g_node: Formula
    h: Formula
    ifl: InfluenceFunction


@dataclass(frozen=True)
class Rule:
    head: Label
    delta_t: int
    target: Formula
    neighbor: NeighborCriterion
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Program:
    labels: Tuple[Label, ...]
    facts: Tuple[Fact, ...] = ()
    ics: Tuple[IntegrityConstraint, ...] = ()
    rules: Tuple[Rule, ...] = ()
    t_max: int = 0

    def __post_init__(self):
        for name in ("labels", "facts", "ics", "rules"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    def label(self, name: str) -> Label:
        for lab in self.labels:
            if lab.name == name:
                return lab
        raise KeyError(name)

    @property
    def label_names(self) -> tuple[str, ...]:
        return tuple(lab.name for lab in self.labels)

    @property
    def size(self) -> int:
        """|P|: number of rules, facts and integrity constraints."""
        return len(self.facts) + len(self.ics) + len(self.rules)

    def with_facts(self, facts) -> Program:
        return Program(self.labels, self.facts + tuple(facts), self.ics, self.rules, self.t_max)

    def with_labels(self, labels) -> Program:
        merged = list(self.labels)
        known = {lab.name for lab in merged}
        for lab in labels:
            if lab.name not in known:
                merged.append(lab)
                known.add(lab.name)
        return Program(tuple(merged), self.facts, self.ics, self.rules, self.t_max)


# -- validation -------------------------------------------------------------


def _is_literal_conjunction(f: Formula) -> bool:
    for part in conjuncts(f):
        if isinstance(part, (NetworkAtom, Const)):
            continue
        if isinstance(part, Not) and isinstance(part.operand, NetworkAtom):
            continue
        return False
    return True


def validate_program(p: Program, g: Optional[Graph]) -> list[Diagnostic]:
    """Check the side conditions on facts, constraints and rules.

    Returns every violation found; an empty list means the program is
    well formed with respect to ``g``. With ``g=None`` the component
    existence checks are skipped.
    """
    diags: list[Diagnostic] = []
    vocab: dict[str, Label] = {}
    for lab in p.labels:
        prior = vocab.get(lab.name)
        if prior is not None and prior.fluent != lab.fluent:
            diags.append(error(f"label {lab.name} declared both fluent and non-fluent", location="labels"))
        vocab.setdefault(lab.name, lab)
    if p.t_max < 0:
        diags.append(error("tmax must be a natural number", location="tmax"))

    def check_atoms(f: Formula, span, where):
        for atom in f.atoms():
            known = vocab.get(atom.label.name)
            if known is None:
                diags.append(error(f"unknown label {atom.label.name}", span, where))
            elif known.fluent != atom.label.fluent:
                diags.append(error(f"label {atom.label.name} used with inconsistent fluency", span, where))

    nonfluent_seen: dict[tuple, Fact] = {}
    for i, fact in enumerate(p.facts):
        where = f"fact #{i + 1}"
        check_atoms(fact.atom, fact.span, where)
        if g is not None and not g.has_component(fact.component):
            diags.append(error(f"component {format_component(fact.component)} is not in the graph", fact.span, where))
        if not (0 <= fact.t1 <= fact.t2 <= p.t_max):
            diags.append(error(f"fact interval [{fact.t1},{fact.t2}] must lie within [0,{p.t_max}]", fact.span, where))
        if not fact.fluent:
            if (fact.t1, fact.t2) != (0, p.t_max):
                diags.append(error("non-fluent fact must span [0,t_max]", fact.span, where))
            key = (fact.atom.label.name, fact.component)
            prior = nonfluent_seen.get(key)
            if prior is None:
                nonfluent_seen[key] = fact
            elif prior.atom == fact.atom:
                diags.append(error("non-fluent fact appears more than once", fact.span, where))
            else:
                diags.append(error(
                    f"conflicting non-fluent facts for {fact.atom.label.name} on {format_component(fact.component)}",
                    fact.span, where))

    for i, ic in enumerate(p.ics):
        where = f"ic #{i + 1}"
        check_atoms(ic.head, ic.span, where)
        for atom in ic.body:
            check_atoms(atom, ic.span, where)
        if not ic.head.label.fluent:
            diags.append(error("integrity constraint head must be fluent", ic.span, where))

    for i, rule in enumerate(p.rules):
        where = f"rule #{i + 1}"
        head = vocab.get(rule.head.name)
        if head is None:
            diags.append(error(f"unknown label {rule.head.name}", rule.span, where))
        if not rule.head.fluent:
            diags.append(error("rule head must be fluent", rule.span, where))
        if rule.delta_t < 0:
            diags.append(error("rule delay must be a natural number", rule.span, where))
        nc = rule.neighbor
        for f in (rule.target, nc.g_edge, nc.g_node, nc.h):
            check_atoms(f, rule.span, where)
        if not is_nonfluent(rule.target):
            diags.append(error("rule target criterion must be non-fluent", rule.span, where))
        if not is_nonfluent(nc.g_edge):
            diags.append(error("neighbor edge criterion must be non-fluent", rule.span, where))
        if not is_nonfluent(nc.g_node):
            diags.append(error("neighbor node criterion must be non-fluent", rule.span, where))
        if not _is_literal_conjunction(nc.h):
            diags.append(error("neighbor condition must be a conjunction of literals", rule.span, where))
        if isinstance(nc.ifl, Table):
            for q, e in (k for k, _ in nc.ifl.rows):
                if q > e:
                    diags.append(error(f"influence table row ({q}, {e}) has more qualifying than eligible nodes",
                                       rule.span, where))
            for q, q2, e in nc.ifl.axiom_violations():
                diags.append(error(
                    f"influence table is not narrowing: ifl({q2},{e}) is not within ifl({q},{e})", rule.span, where))
    return diags
