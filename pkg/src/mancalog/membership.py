"""Degree-of-group-membership inference on a partially labeled network.

Each group becomes a fluent label. Known members are pinned by facts;
every unknown node carries the non-fluent guard label ``unk`` so that the
generated rules only ever fire on nodes whose affiliation is open.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

from .diagnostics import error
from .dsl.lexer import Token
from .dsl.parser import _Parser
from .dsl.jsonio import interval_to_json
from .engine import FixpointResult, gamma_fixpoint
from .errors import EngineError, ParseError, ValidationError
from .intervals import FULL, ONE, ZERO, WeightInterval, closed, format_rational, point, to_rational
from .model import TRUE, Graph, Label, NetworkAtom
from .program import Fact, NeighborCriterion, Program, Rule, Tip

GUARD = "unk"
DEFAULT_ALPHA = Fraction(1, 2)
FACT_FIXED = "fact-fixed"
RULE_DERIVED = "rule-derived"


@dataclass(frozen=True)
class MembershipProblem:
    graph: Graph
    groups: tuple[str, ...]
    known: Mapping[str, str] = field(default_factory=dict)
    alpha: Mapping[str, Fraction] = field(default_factory=dict)
    theta: Fraction = ONE
    rounds: int = 0

    def __post_init__(self):
        object.__setattr__(self, "groups", tuple(self.groups))
        object.__setattr__(self, "known", dict(self.known))
        object.__setattr__(self, "alpha", {g: to_rational(a) for g, a in self.alpha.items()})
        object.__setattr__(self, "theta", to_rational(self.theta))

    def alpha_for(self, group: str) -> Fraction:
        return self.alpha.get(group, DEFAULT_ALPHA)

    def problems(self) -> list[str]:
        out = []
        if not self.groups:
            out.append("at least one group is required")
        if len(set(self.groups)) != len(self.groups):
            out.append("duplicate group name")
        if GUARD in self.groups:
            out.append(f"'{GUARD}' is reserved and cannot name a group")
        for node, group in self.known.items():
            if not self.graph.has_node(node):
                out.append(f"known member {node} is not in the graph")
            if group not in self.groups:
                out.append(f"node {node} assigned to undeclared group {group}")
        for group, a in self.alpha.items():
            if group not in self.groups:
                out.append(f"alpha given for undeclared group {group}")
            if not ZERO < a <= ONE:
                out.append(f"alpha for {group} must lie in (0, 1]")
        if not ZERO < self.theta <= ONE:
            out.append("theta must lie in (0, 1]")
        if self.rounds < 0:
            out.append("rounds must be a natural number")
        return out


@dataclass(frozen=True)
class MembershipResult:
    bounds: Mapping[tuple[str, str], WeightInterval]
    provenance: Mapping[str, str]
    groups: tuple[str, ...]
    iterations: int = 0

    def degree(self, node: str, group: str) -> Fraction:
        """Lower bound of the membership interval."""
        return self.bounds[(node, group)].lo

    def nodes(self) -> list[str]:
        return list(self.provenance)


def _labels(prob: MembershipProblem) -> dict[str, Label]:
    labels = {g: Label(g, True) for g in prob.groups}
    labels[GUARD] = Label(GUARD, False)
    return labels


def encode_membership(prob: MembershipProblem) -> Program:
    """Facts pinning known members, [0,1] facts for the rest, and the ``unk`` guard."""
    problems = prob.problems()
    if problems:
        raise ValidationError([error(msg, location="membership") for msg in problems])
    labels = _labels(prob)
    guard = labels[GUARD]
    t_max = prob.rounds
    facts = []
    for node in prob.graph.nodes:
        group = prob.known.get(node)
        if group is None:
            for g in prob.groups:
                facts.append(Fact(NetworkAtom(labels[g], FULL), node, 0, t_max))
            facts.append(Fact(NetworkAtom(guard, point(1)), node, 0, t_max))
        else:
            for g in prob.groups:
                facts.append(Fact(NetworkAtom(labels[g], point(1 if g == group else 0)), node, 0, t_max))
            facts.append(Fact(NetworkAtom(guard, point(0)), node, 0, t_max))
    return Program(tuple(labels.values()), tuple(facts), (), (), t_max)


def generate_rules(prob: MembershipProblem) -> list[Rule]:
    """One rule per group: unknown nodes are tipped towards g by in-neighbours already in g."""
    labels = _labels(prob)
    guard = NetworkAtom(labels[GUARD], point(1))
    rules = []
    for g in prob.groups:
        h = NetworkAtom(labels[g], closed(prob.theta, 1))
        rules.append(Rule(labels[g], 0, guard, NeighborCriterion(TRUE, TRUE, h, Tip(prob.alpha_for(g)))))
    return rules


def membership_program(prob: MembershipProblem) -> Program:
    base = encode_membership(prob)
    return Program(base.labels, base.facts, (), tuple(generate_rules(prob)), base.t_max)


def solve_membership(prob: MembershipProblem, *, threads: Optional[int] = None,
                     trace: bool = False) -> tuple[MembershipResult, FixpointResult]:
    program = membership_program(prob)
    fix = gamma_fixpoint(program, prob.graph, threads=threads, trace=trace)
    if not fix.consistent:
        raise EngineError(f"membership encoding became inconsistent at {fix.witness}")
    t = prob.rounds
    bounds = {}
    provenance = {}
    for node in prob.graph.nodes:
        provenance[node] = FACT_FIXED if node in prob.known else RULE_DERIVED
        for g in prob.groups:
            bounds[(node, g)] = fix.model.bound(t, node, g)
    return MembershipResult(bounds, provenance, prob.groups, fix.iterations), fix


def valid_bin_width(w: Fraction) -> bool:
    """True for widths 1/n whose bin edges all have finite decimal forms (1/4, 1/10; not 1/3)."""
    if w <= 0 or w > 1 or w.numerator != 1:
        return False
    n = w.denominator
    for p in (2, 5):
        while n % p == 0:
            n //= p
    return n == 1


def membership_histogram(res: MembershipResult, bin_width) -> list[tuple[tuple[Fraction, Fraction], int]]:
    """Count rule-derived (node, group) pairs by positive lower bound.

    Bins are half-open ``(k*w, (k+1)*w]``; only non-empty bins are returned.
    """
    w = to_rational(bin_width)
    if not valid_bin_width(w):
        raise ValueError(f"bin width {format_rational(w)} must divide 1 evenly")
    counts: dict[int, int] = {}
    for (node, group), bnd in res.bounds.items():
        if res.provenance.get(node) == FACT_FIXED:
            continue
        lo = bnd.lo
        if lo <= 0:
            continue
        k = -(-lo // w) - 1  # ceil(lo / w) - 1
        counts[k] = counts.get(k, 0) + 1
    return [((k * w, (k + 1) * w), n) for k, n in sorted(counts.items())]


# -- files ------------------------------------------------------------------


class _MembershipParser(_Parser):
    def __init__(self, source, filename):
        super().__init__(source, filename)
        self.groups: list[str] = []
        self.known: dict[str, str] = {}
        self.alpha: dict[str, Fraction] = {}
        self.theta = ONE
        self.rounds = 0

    def group_decl(self, kw: Token):
        tok = self.ident("a group name")
        if tok.text in self.groups:
            self.fail(f"group {tok.text} declared twice", tok.span)
        self.groups.append(tok.text)

    def member_decl(self, kw: Token):
        node = self.name("a node id")
        group = self.ident("a group name")
        prior = self.known.get(node.text)
        if prior is not None and prior != group.text:
            self.fail(f"node {node.text} assigned to two groups", node.span)
        self.known[node.text] = group.text

    def param_decl(self, kw: Token):
        which = self.ident("'alpha', 'theta' or 'rounds'")
        if which.text == "alpha":
            group = self.ident("a group name")
            self.alpha[group.text] = self.rational()
        elif which.text == "theta":
            self.theta = self.rational()
        elif which.text == "rounds":
            self.rounds = self.natural()
        else:
            self.fail(f"unknown parameter {which.text!r}", which.span)

    def run(self):
        self.statements({"group": self.group_decl, "member": self.member_decl, "param": self.param_decl})
        self.finish()
        return self


def parse_membership(source, graph: Graph, filename: str = "<membership>") -> MembershipProblem:
    parsed = _MembershipParser(source, filename).run()
    prob = MembershipProblem(graph, tuple(parsed.groups), parsed.known, parsed.alpha, parsed.theta, parsed.rounds)
    problems = prob.problems()
    if problems:
        raise ParseError([error(msg, location=filename) for msg in problems])
    return prob


def result_to_csv(res: MembershipResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["node", "group", "lower", "upper", "provenance"])
    for node in res.nodes():
        for g in res.groups:
            b = res.bounds[(node, g)]
            writer.writerow([node, g, format_rational(b.lo), format_rational(b.hi), res.provenance[node]])
    return buf.getvalue()


def result_from_csv(text: str) -> MembershipResult:
    bounds = {}
    provenance = {}
    groups: list[str] = []
    for row in csv.DictReader(io.StringIO(text)):
        node, g = row["node"], row["group"]
        bounds[(node, g)] = closed(to_rational(row["lower"]), to_rational(row["upper"]))
        provenance[node] = row["provenance"]
        if g not in groups:
            groups.append(g)
    return MembershipResult(bounds, provenance, tuple(groups))


def result_to_json(res: MembershipResult) -> dict:
    return {
        "groups": list(res.groups),
        "iterations": res.iterations,
        "nodes": [
            {
                "node": node,
                "provenance": res.provenance[node],
                "bounds": {g: interval_to_json(res.bounds[(node, g)]) for g in res.groups},
            }
            for node in res.nodes()
        ],
    }


def histogram_to_csv(hist) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["bin_low", "bin_high", "count"])
    for (lo, hi), n in hist:
        writer.writerow([format_rational(lo), format_rational(hi), n])
    return buf.getvalue()
