"""JSON encoding of intervals, formulas, programs, graphs and interpretations.

Rationals are written as fraction strings (authoritative) with a decimal
companion for readability. See docs/formats.md for the schema.
"""

from __future__ import annotations

from ..intervals import EMPTY, WeightInterval, decimal_string, format_rational, to_rational
from ..model import And, Const, Formula, Graph, Interpretation, Label, NetworkAtom, Not, Or
from ..program import (
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
from .parser import GraphDocument


def interval_to_json(b: WeightInterval) -> dict:
    if b is EMPTY:
        return {"empty": True}
    return {
        "lower": format_rational(b.lo),
        "upper": format_rational(b.hi),
        "lower_open": b.lo_open,
        "upper_open": b.hi_open,
        "lower_decimal": decimal_string(b.lo),
        "upper_decimal": decimal_string(b.hi),
    }


def interval_from_json(d: dict) -> WeightInterval:
    if d.get("empty"):
        return EMPTY
    return WeightInterval(to_rational(d["lower"]), to_rational(d["upper"]),
                          bool(d.get("lower_open", False)), bool(d.get("upper_open", False)))


def component_to_json(c):
    return list(c) if isinstance(c, tuple) else c


def component_from_json(c):
    return tuple(c) if isinstance(c, list) else c


def atom_to_json(a: NetworkAtom) -> dict:
    return {"label": a.label.name, "bound": interval_to_json(a.bnd)}


def formula_to_json(f: Formula) -> dict:
    if isinstance(f, NetworkAtom):
        return {"atom": atom_to_json(f)}
    if isinstance(f, Const):
        return {"const": f.value}
    if isinstance(f, Not):
        return {"not": formula_to_json(f.operand)}
    if isinstance(f, And):
        return {"and": [formula_to_json(f.left), formula_to_json(f.right)]}
    if isinstance(f, Or):
        return {"or": [formula_to_json(f.left), formula_to_json(f.right)]}
    raise TypeError(f"not a formula: {f!r}")


def ifl_to_json(ifl) -> dict:
    if isinstance(ifl, Tip):
        return {"kind": "tip", "alpha": format_rational(ifl.alpha)}
    if isinstance(ifl, Suppress):
        return {"kind": "suppress", "beta": format_rational(ifl.beta)}
    if isinstance(ifl, FracThreshold):
        return {"kind": "frac", "theta": format_rational(ifl.theta), "bound": interval_to_json(ifl.bnd)}
    if isinstance(ifl, Table):
        return {
            "kind": "table",
            "default": interval_to_json(ifl.default),
            "rows": [{"q": q, "e": e, "bound": interval_to_json(b)} for (q, e), b in ifl.rows],
        }
    raise TypeError(f"not an influence function: {ifl!r}")


def program_to_json(p: Program) -> dict:
    return {
        "tmax": p.t_max,
        "labels": [{"name": lab.name, "fluent": lab.fluent} for lab in p.labels],
        "facts": [
            {"atom": atom_to_json(f.atom), "component": component_to_json(f.component), "t1": f.t1, "t2": f.t2}
            for f in p.facts
        ],
        "ics": [{"head": atom_to_json(ic.head), "body": [atom_to_json(a) for a in ic.body]} for ic in p.ics],
        "rules": [
            {
                "head": r.head.name,
                "delta_t": r.delta_t,
                "target": formula_to_json(r.target),
                "g_edge": formula_to_json(r.neighbor.g_edge),
                "g_node": formula_to_json(r.neighbor.g_node),
                "h": formula_to_json(r.neighbor.h),
                "ifl": ifl_to_json(r.neighbor.ifl),
            }
            for r in p.rules
        ],
    }


def program_from_json(d: dict) -> Program:
    labels = {x["name"]: Label(x["name"], bool(x["fluent"])) for x in d["labels"]}

    def atom(x) -> NetworkAtom:
        return NetworkAtom(labels[x["label"]], interval_from_json(x["bound"]))

    def formula(x) -> Formula:
        if "atom" in x:
            return atom(x["atom"])
        if "const" in x:
            return Const(bool(x["const"]))
        if "not" in x:
            return Not(formula(x["not"]))
        if "and" in x:
            return And(formula(x["and"][0]), formula(x["and"][1]))
        if "or" in x:
            return Or(formula(x["or"][0]), formula(x["or"][1]))
        raise ValueError(f"unknown formula node {sorted(x)}")

    def ifl(x):
        kind = x["kind"]
        if kind == "tip":
            return Tip(to_rational(x["alpha"]))
        if kind == "suppress":
            return Suppress(to_rational(x["beta"]))
        if kind == "frac":
            return FracThreshold(to_rational(x["theta"]), interval_from_json(x["bound"]))
        if kind == "table":
            rows = tuple(((r["q"], r["e"]), interval_from_json(r["bound"])) for r in x["rows"])
            return Table(rows, interval_from_json(x["default"]))
        raise ValueError(f"unknown influence function kind {kind!r}")

    facts = tuple(Fact(atom(f["atom"]), component_from_json(f["component"]), f["t1"], f["t2"]) for f in d["facts"])
    ics = tuple(IntegrityConstraint(atom(ic["head"]), tuple(atom(a) for a in ic["body"])) for ic in d["ics"])
    rules = tuple(
        Rule(labels[r["head"]], r["delta_t"], formula(r["target"]),
             NeighborCriterion(formula(r["g_edge"]), formula(r["g_node"]), formula(r["h"]), ifl(r["ifl"])))
        for r in d["rules"]
    )
    return Program(tuple(labels.values()), facts, ics, rules, d["tmax"])


def graph_to_json(doc: GraphDocument | Graph) -> dict:
    if isinstance(doc, Graph):
        doc = GraphDocument(doc)
    return {
        "nodes": list(doc.graph.nodes),
        "edges": [list(e) for e in doc.graph.edges],
        "labels": [{"name": lab.name, "fluent": lab.fluent} for lab in doc.labels],
        "annotations": [{"component": component_to_json(c), "atom": atom_to_json(a)} for c, a in doc.annotations],
    }


def graph_from_json(d: dict) -> GraphDocument:
    labels = tuple(Label(x["name"], bool(x["fluent"])) for x in d.get("labels", []))
    by_name = {lab.name: lab for lab in labels}
    graph = Graph(d["nodes"], [tuple(e) for e in d["edges"]])
    notes = tuple(
        (component_from_json(x["component"]),
         NetworkAtom(by_name[x["atom"]["label"]], interval_from_json(x["atom"]["bound"])))
        for x in d.get("annotations", [])
    )
    return GraphDocument(graph, labels, notes)


def interpretation_to_json(i: Interpretation) -> dict:
    return {
        "tmax": i.t_max,
        "cells": [
            {"t": t, "component": component_to_json(c), "label": label, "bound": interval_to_json(b)}
            for (t, c, label), b in i.sorted_cells()
        ],
    }


def interpretation_from_json(d: dict) -> Interpretation:
    cells = {
        (x["t"], component_from_json(x["component"]), x["label"]): interval_from_json(x["bound"])
        for x in d["cells"]
    }
    return Interpretation(d["tmax"], cells)
