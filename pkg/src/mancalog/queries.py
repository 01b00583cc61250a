"""Consistency, entailment and tight-bound queries answered from the minimal model."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .engine import FixpointResult, canonicalize, gamma_fixpoint
from .errors import QueryError
from .intervals import WeightInterval
from .model import Cell, Component, Graph, format_component
from .program import Fact, Program

CONSISTENT = "consistent"
INCONSISTENT = "inconsistent"
ENTAILED = "entailed"
NOT_ENTAILED = "not-entailed"
TIGHT_BOUND = "tight-bound"


@dataclass(frozen=True)
class QueryResult:
    kind: str
    bound: Optional[WeightInterval] = None
    witness: Optional[Cell] = None
    vacuous: bool = False

    @property
    def status(self) -> str:
        if self.vacuous:
            return "vacuously entailed (program inconsistent)"
        return self.kind


class Solver:
    """Computes the (canonical) minimal model once and answers queries against it."""

    def __init__(self, p: Program, g: Graph, canonical: bool = False, **fixpoint_options):
        self.p = p
        self.g = g
        self.canonical = canonical
        result = gamma_fixpoint(p, g, **fixpoint_options)
        if canonical and result.consistent:
            result = canonicalize(p, g, result, threads=fixpoint_options.get("threads"))
        self.result: FixpointResult = result

    @property
    def consistent(self) -> bool:
        return self.result.consistent

    def consistency(self) -> QueryResult:
        if self.result.consistent:
            return QueryResult(CONSISTENT)
        return QueryResult(INCONSISTENT, witness=self.result.witness)

    def _check_cell(self, c: Component, label: str, times):
        if not self.g.has_component(c):
            raise QueryError(f"unknown component {format_component(c)}")
        if label not in self.p.label_names:
            raise QueryError(f"unknown label {label}")
        for t in times:
            if not 0 <= t <= self.p.t_max:
                raise QueryError(f"time {t} outside [0, {self.p.t_max}]")

    def entails(self, fact: Fact) -> QueryResult:
        self._check_cell(fact.component, fact.atom.label.name, (fact.t1, fact.t2))
        if fact.t1 > fact.t2:
            raise QueryError("empty time window")
        if not self.result.consistent:
            return QueryResult(ENTAILED, witness=self.result.witness, vacuous=True)
        model = self.result.model
        for t in range(fact.t1, fact.t2 + 1):
            if not fact.atom.satisfied_by(model.world(t, fact.component)):
                return QueryResult(NOT_ENTAILED, bound=model.bound(t, fact.component, fact.atom.label.name),
                                   witness=(t, fact.component, fact.atom.label.name))
        return QueryResult(ENTAILED)

    def tight_bound(self, c: Component, label: str, t: int) -> QueryResult:
        self._check_cell(c, label, (t,))
        if not self.result.consistent:
            raise QueryError("program is inconsistent; no tight bound exists")
        return QueryResult(TIGHT_BOUND, bound=self.result.model.bound(t, c, label))


def consistency(p: Program, g: Graph, canonical: bool = False) -> QueryResult:
    return Solver(p, g, canonical).consistency()


def entails(p: Program, g: Graph, fact: Fact, canonical: bool = False) -> QueryResult:
    return Solver(p, g, canonical).entails(fact)


def tight_bound(p: Program, g: Graph, c: Component, label: str, t: int, canonical: bool = False) -> QueryResult:
    return Solver(p, g, canonical).tight_bound(c, label, t)
