"""Labels, network atoms and formulas, worlds, graphs and interpretations."""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from typing import Protocol, Tuple, Union

from .intervals import EMPTY, FULL, WeightInterval, interval_subseteq

Node = str
Edge = Tuple[str, str]
Component = Union[Node, Edge]
Cell = Tuple[int, Component, str]


def component_key(c: Component) -> tuple:
    """Total order on components: nodes before edges, then lexicographic."""
    if isinstance(c, tuple):
        return (1, c[0], c[1])
    return (0, c, "")


def cell_key(cell: Cell) -> tuple:
    t, c, label = cell
    return (t, component_key(c), label)


def format_component(c: Component) -> str:
    if isinstance(c, tuple):
        return f"{c[0]} -> {c[1]}"
    return c


@dataclass(frozen=True)
class Label:
    name: str
    fluent: bool

    def __str__(self) -> str:
        return self.name


class BoundLookup(Protocol):
    def bound(self, label: str) -> WeightInterval: ...


# -- formulas ---------------------------------------------------------------


@dataclass(frozen=True)
class NetworkAtom:
    label: Label
    bnd: WeightInterval

    def satisfied_by(self, world: BoundLookup) -> bool:
        bnd = self.bnd
        if bnd is FULL:
            return True
        if bnd is EMPTY:
            return False
        return interval_subseteq(world.bound(self.label.name), bnd)

    def atoms(self) -> Iterator[NetworkAtom]:
        yield self

    @property
    def fluent(self) -> bool:
        return self.label.fluent

    def __str__(self) -> str:
        return f"<{self.label.name}, {self.bnd}>"


@dataclass(frozen=True)
class Const:
    """``TRUE`` (tautology) or ``FALSE`` (contradiction)."""

    value: bool

    def satisfied_by(self, world: BoundLookup) -> bool:
        return self.value

    def atoms(self) -> Iterator[NetworkAtom]:
        return iter(())

    def __str__(self) -> str:
        return "TRUE" if self.value else "FALSE"


@dataclass(frozen=True)
class Not:
    operand: Formula

    def satisfied_by(self, world: BoundLookup) -> bool:
        return not self.operand.satisfied_by(world)

    def atoms(self) -> Iterator[NetworkAtom]:
        return self.operand.atoms()

    def __str__(self) -> str:
        return f"!{_wrap(self.operand)}"


@dataclass(frozen=True)
class And:
    left: Formula
    right: Formula

    def satisfied_by(self, world: BoundLookup) -> bool:
        return self.left.satisfied_by(world) and self.right.satisfied_by(world)

    def atoms(self) -> Iterator[NetworkAtom]:
        yield from self.left.atoms()
        yield from self.right.atoms()

    def __str__(self) -> str:
        return f"({self.left} & {self.right})"


@dataclass(frozen=True)
class Or:
    left: Formula
    right: Formula

    def satisfied_by(self, world: BoundLookup) -> bool:
        return self.left.satisfied_by(world) or self.right.satisfied_by(world)

    def atoms(self) -> Iterator[NetworkAtom]:
        yield from self.left.atoms()
        yield from self.right.atoms()

    def __str__(self) -> str:
        return f"({self.left} | {self.right})"


Formula = Union[NetworkAtom, Const, Not, And, Or]

TRUE = Const(True)
FALSE = Const(False)


def _wrap(f: Formula) -> str:
    return str(f)


def conjunction(parts: Iterable[Formula]) -> Formula:
    """Left-nested conjunction; the empty conjunction is ``TRUE``."""
    result: Formula | None = None
    for part in parts:
        result = part if result is None else And(result, part)
    return TRUE if result is None else result


def conjuncts(f: Formula) -> list[Formula]:
    if isinstance(f, And):
        return conjuncts(f.left) + conjuncts(f.right)
    return [f]


def formula_labels(f: Formula) -> set[str]:
    return {a.label.name for a in f.atoms()}


def is_nonfluent(f: Formula) -> bool:
    return all(not a.label.fluent for a in f.atoms())


def is_fluent(f: Formula) -> bool:
    return all(a.label.fluent for a in f.atoms())


def is_positive(f: Formula) -> bool:
    """True when no atom occurs under a negation."""
    if isinstance(f, Not):
        return False
    if isinstance(f, (And, Or)):
        return is_positive(f.left) and is_positive(f.right)
    return True


# -- worlds -----------------------------------------------------------------


class World(Mapping):
    """Per-component assignment label name -> interval; absent labels read [0, 1]."""

    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping[str, WeightInterval] | Iterable[NetworkAtom] = ()):
        if isinstance(entries, Mapping):
            items = dict(entries)
        else:
            items = {}
            for atom in entries:
                name = atom.label.name
                if name in items and items[name] != atom.bnd:
                    raise ValueError(f"world holds two atoms for label {name}")
                items[name] = atom.bnd
        self._entries = {k: v for k, v in items.items() if v is not FULL}

    def bound(self, label: str) -> WeightInterval:
        return self._entries.get(label, FULL)

    def __getitem__(self, label: str) -> WeightInterval:
        return self._entries[label]

    def __iter__(self):
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}: {v}" for k, v in sorted(self._entries.items()))
        return f"World({{{inner}}})"


def world_satisfies(w: BoundLookup, f: Formula) -> bool:
    return f.satisfied_by(w)


# -- graphs -----------------------------------------------------------------


class GraphError(ValueError):
    pass


class Graph:
    """Directed graph without self-loops or parallel edges."""

    def __init__(self, nodes: Iterable[Node], edges: Iterable[Edge] = ()):
        node_list = list(nodes)
        if len(set(node_list)) != len(node_list):
            raise GraphError("duplicate node id")
        self.nodes: tuple[Node, ...] = tuple(node_list)
        node_set = frozenset(node_list)
        seen: set[Edge] = set()
        edge_list: list[Edge] = []
        for u, v in edges:
            if u not in node_set or v not in node_set:
                raise GraphError(f"edge ({u}, {v}) references an undefined node")
            if u == v:
                raise GraphError(f"self-loop on {u}")
            if (u, v) in seen:
                raise GraphError(f"parallel edge {u} -> {v}")
            seen.add((u, v))
            edge_list.append((u, v))
        self.edges: tuple[Edge, ...] = tuple(edge_list)
        self._node_set = node_set
        self._edge_set = frozenset(seen)
        preds: dict[Node, list[Node]] = {n: [] for n in node_list}
        succs: dict[Node, list[Node]] = {n: [] for n in node_list}
        for u, v in edge_list:
            preds[v].append(u)
            succs[u].append(v)
        self._preds = {n: tuple(p) for n, p in preds.items()}
        self._succs = {n: tuple(s) for n, s in succs.items()}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._node_set == other._node_set and self._edge_set == other._edge_set

    def __hash__(self) -> int:
        return hash((self._node_set, self._edge_set))

    def __repr__(self) -> str:
        return f"Graph(|V|={len(self.nodes)}, |E|={len(self.edges)})"

    @property
    def components(self) -> tuple[Component, ...]:
        return self.nodes + self.edges

    def has_node(self, n: object) -> bool:
        return n in self._node_set

    def has_edge(self, e: object) -> bool:
        return e in self._edge_set

    def has_component(self, c: object) -> bool:
        if isinstance(c, tuple):
            return c in self._edge_set
        return c in self._node_set

    def predecessors(self, v: Node) -> tuple[Node, ...]:
        return self._preds[v]

    def successors(self, v: Node) -> tuple[Node, ...]:
        return self._succs[v]

    def max_in_degree(self) -> int:
        return max((len(p) for p in self._preds.values()), default=0)


# -- interpretations --------------------------------------------------------


class CellView:
    """Read-through world for one (time, component) pair of an interpretation."""

    __slots__ = ("_cells", "_t", "_c")

    def __init__(self, cells: Mapping[Cell, WeightInterval], t: int, c: Component):
        self._cells = cells
        self._t = t
        self._c = c

    def bound(self, label: str) -> WeightInterval:
        return self._cells.get((self._t, self._c, label), FULL)


@dataclass(frozen=True)
class Interpretation:
    """Timeline of network interpretations over [0, t_max].

    Only cells whose bound differs from [0, 1] are stored; every other
    (time, component, label) cell reads as [0, 1].
    """

    t_max: int
    cells: Mapping[Cell, WeightInterval] = field(default_factory=dict)

    def __post_init__(self):
        if self.t_max < 0:
            raise ValueError("t_max must be a natural number")
        cleaned = {k: v for k, v in self.cells.items() if v is not FULL}
        for t, _, _ in cleaned:
            if not 0 <= t <= self.t_max:
                raise ValueError(f"time {t} outside [0, {self.t_max}]")
        object.__setattr__(self, "cells", cleaned)

    @classmethod
    def bottom(cls, t_max: int) -> Interpretation:
        """The all-[0, 1] interpretation."""
        return cls(t_max, {})

    def bound(self, t: int, c: Component, label: str) -> WeightInterval:
        return self.cells.get((t, c, label), FULL)

    def world(self, t: int, c: Component) -> CellView:
        return CellView(self.cells, t, c)

    def network_interpretation(self, t: int) -> dict[Component, World]:
        grouped: dict[Component, dict[str, WeightInterval]] = {}
        for (tt, c, label), bnd in self.cells.items():
            if tt == t:
                grouped.setdefault(c, {})[label] = bnd
        return {c: World(entries) for c, entries in grouped.items()}

    @property
    def timeline(self) -> list[dict[Component, World]]:
        return [self.network_interpretation(t) for t in range(self.t_max + 1)]

    def sorted_cells(self) -> list[tuple[Cell, WeightInterval]]:
        return sorted(self.cells.items(), key=lambda kv: cell_key(kv[0]))

    def empty_cells(self) -> list[Cell]:
        return sorted((k for k, v in self.cells.items() if v is EMPTY), key=cell_key)

    def replace(self, updates: Mapping[Cell, WeightInterval]) -> Interpretation:
        merged = dict(self.cells)
        merged.update(updates)
        return Interpretation(self.t_max, merged)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Interpretation):
            return NotImplemented
        return self.t_max == other.t_max and dict(self.cells) == dict(other.cells)

    def __hash__(self) -> int:
        return hash((self.t_max, frozenset(self.cells.items())))
