"""Threshold subgraphs and shell (k-core) decomposition of membership results."""

from __future__ import annotations

import csv
import io
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .intervals import format_rational, to_rational
from .membership import MembershipResult
from .model import Graph


@dataclass(frozen=True)
class ThresholdSubgraph:
    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    group: str
    threshold: Fraction
    degrees: Mapping[str, Fraction]


@dataclass(frozen=True)
class ShellAssignment:
    shells: Mapping[str, int]
    core_threshold: int

    @property
    def core_members(self) -> list[str]:
        return [n for n, k in self.shells.items() if k == self.core_threshold]


def threshold_subgraph(res: MembershipResult, g: Graph, group: str, threshold) -> ThresholdSubgraph:
    """Subgraph induced by nodes whose degree of membership in ``group`` is at least ``threshold``."""
    theta = to_rational(threshold)
    if not 0 <= theta <= 1:
        raise ValueError("threshold must lie in [0, 1]")
    if group not in res.groups:
        raise KeyError(f"unknown group {group}")
    degrees = {}
    for n in g.nodes:
        b = res.bounds.get((n, group))
        if b is None or b.is_empty:
            continue
        if b.lo >= theta:
            degrees[n] = b.lo
    keep = set(degrees)
    edges = tuple(e for e in g.edges if e[0] in keep and e[1] in keep)
    return ThresholdSubgraph(tuple(n for n in g.nodes if n in keep), edges, group, theta, degrees)


def undirected_adjacency(nodes, edges) -> dict[str, set[str]]:
    adj: dict[str, set[str]] = {n: set() for n in nodes}
    for u, v in edges:
        if u != v:
            adj[u].add(v)
            adj[v].add(u)
    return adj


def core_numbers(nodes, edges) -> dict[str, int]:
    """Bucket-based peeling: repeatedly remove a node of minimum remaining degree."""
    adj = undirected_adjacency(nodes, edges)
    deg = {n: len(nbrs) for n, nbrs in adj.items()}
    if not deg:
        return {}
    buckets: dict[int, set[str]] = defaultdict(set)
    for n, d in deg.items():
        buckets[d].add(n)
    core: dict[str, int] = {}
    k = 0
    d = 0
    max_deg = max(deg.values())
    while len(core) < len(deg):
        while not buckets[d]:
            d += 1
            if d > max_deg:  # pragma: no cover - unreachable while nodes remain
                raise AssertionError("bucket scan overran")
        v = min(buckets[d])
        buckets[d].discard(v)
        k = max(k, d)
        core[v] = k
        for u in adj[v]:
            if u in core:
                continue
            du = deg[u]
            if du > d:
                buckets[du].discard(u)
                deg[u] = du - 1
                buckets[du - 1].add(u)
        d = max(d - 1, 0)
    return {n: core[n] for n in adj}


def shell_decomposition(sub: ThresholdSubgraph) -> ShellAssignment:
    if not sub.nodes:
        raise ValueError("shell decomposition needs a non-empty subgraph")
    shells = core_numbers(sub.nodes, sub.edges)
    return ShellAssignment(shells, max(shells.values()))


def edge_list(sub: ThresholdSubgraph) -> str:
    return "".join(f"{u} {v}\n" for u, v in sub.edges)


def node_table(sub: ThresholdSubgraph, shells: ShellAssignment) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["node", "degree_lower", "shell", "is_core"])
    for n in sub.nodes:
        k = shells.shells[n]
        writer.writerow([n, format_rational(sub.degrees[n]), k, "true" if k == shells.core_threshold else "false"])
    return buf.getvalue()
