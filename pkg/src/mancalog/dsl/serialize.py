"""Text serialization; ``parse_*(serialize_*(x)) == x`` for every valid input."""

from __future__ import annotations

import re

from ..intervals import WeightInterval, format_rational
from ..model import And, Component, Const, Formula, Graph, Label, NetworkAtom, Not, Or
from ..program import FracThreshold, InfluenceFunction, Program, Suppress, Table, Tip
from .parser import GraphDocument

_NAME_RE = re.compile(r"^(?:[A-Za-z_][A-Za-z0-9_]*|\d+)$")
_LABEL_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def _name(n: str) -> str:
    if not isinstance(n, str) or not _NAME_RE.match(n):
        raise ValueError(f"node id {n!r} cannot be written in the text format")
    return n


def _label(name: str) -> str:
    if not _LABEL_RE.match(name):
        raise ValueError(f"label {name!r} cannot be written in the text format")
    return name


def serialize_interval(b: WeightInterval) -> str:
    return str(b)


def serialize_atom(a: NetworkAtom) -> str:
    return f"<{_label(a.label.name)}, {serialize_interval(a.bnd)}>"


def serialize_component(c: Component) -> str:
    if isinstance(c, tuple):
        return f"{_name(c[0])} -> {_name(c[1])}"
    return _name(c)


_OR, _AND, _UNARY = 1, 2, 3


def serialize_formula(f: Formula, prec: int = 0) -> str:
    """Print with the fewest parentheses that reproduce the same tree.

    ``&`` binds tighter than ``|`` and both associate to the left, so a right
    operand of the same operator must be parenthesized.
    """
    if isinstance(f, NetworkAtom):
        return serialize_atom(f)
    if isinstance(f, Const):
        return "TRUE" if f.value else "FALSE"
    if isinstance(f, Not):
        return "!" + serialize_formula(f.operand, _UNARY)
    if isinstance(f, And):
        text = f"{serialize_formula(f.left, _AND)} & {serialize_formula(f.right, _UNARY)}"
        return f"({text})" if prec > _AND else text
    if isinstance(f, Or):
        text = f"{serialize_formula(f.left, _OR)} | {serialize_formula(f.right, _AND)}"
        return f"({text})" if prec > _OR else text
    raise TypeError(f"not a formula: {f!r}")


def serialize_ifl(ifl: InfluenceFunction) -> str:
    if isinstance(ifl, Tip):
        return f"tip({format_rational(ifl.alpha)})"
    if isinstance(ifl, Suppress):
        return f"suppress({format_rational(ifl.beta)})"
    if isinstance(ifl, FracThreshold):
        return f"frac({format_rational(ifl.theta)}, {serialize_interval(ifl.bnd)})"
    if isinstance(ifl, Table):
        rows = "".join(f", ({q}, {e}): {serialize_interval(b)}" for (q, e), b in ifl.rows)
        return f"table(default {serialize_interval(ifl.default)}{rows})"
    raise TypeError(f"not an influence function: {ifl!r}")


def _label_decl(lab: Label) -> str:
    return f"label {_label(lab.name)} {'fluent' if lab.fluent else 'nonfluent'};"


def serialize_program(p: Program) -> str:
    lines = [_label_decl(lab) for lab in p.labels]
    lines.append(f"tmax {p.t_max};")
    for fact in p.facts:
        t2 = "tmax" if fact.t2 == p.t_max else str(fact.t2)
        lines.append(f"fact ({serialize_atom(fact.atom)}, {serialize_component(fact.component)}) @ [{fact.t1}, {t2}];")
    for ic in p.ics:
        body = " & ".join(serialize_atom(a) for a in ic.body)
        lines.append(f"ic {serialize_atom(ic.head)} <- {body};")
    for r in p.rules:
        nc = r.neighbor
        lines.append(
            f"rule {_label(r.head.name)} <-{r.delta_t}- if {serialize_formula(r.target)}"
            f" via edge {serialize_formula(nc.g_edge)} node {serialize_formula(nc.g_node)}"
            f" having {serialize_formula(nc.h)} using {serialize_ifl(nc.ifl)};"
        )
    return "\n".join(lines) + "\n"


def serialize_graph(g: Graph | GraphDocument, annotations=(), labels=()) -> str:
    """Render a graph, its label declarations and inline annotations.

    Accepts either a ``GraphDocument`` or a bare graph with annotations given
    as ``(component, atom)`` pairs.
    """
    if isinstance(g, GraphDocument):
        annotations, labels, g = g.annotations, g.labels, g.graph
    by_component: dict = {}
    for c, atom in annotations:
        by_component.setdefault(c, []).append(atom)
    lines = [_label_decl(lab) for lab in labels]

    def notes(c) -> str:
        atoms = by_component.get(c)
        return " : " + ", ".join(serialize_atom(a) for a in atoms) if atoms else ""

    for n in g.nodes:
        lines.append(f"node {_name(n)}{notes(n)};")
    for u, v in g.edges:
        lines.append(f"edge {_name(u)} -> {_name(v)}{notes((u, v))};")
    return "\n".join(lines) + "\n"
