import random
from fractions import Fraction

import networkx as nx
import pytest

from mancalog.analytics import (
    ThresholdSubgraph,
    core_numbers,
    edge_list,
    node_table,
    shell_decomposition,
    threshold_subgraph,
)
from mancalog.intervals import EMPTY, closed
from mancalog.membership import RULE_DERIVED, MembershipResult
from mancalog.model import Graph
from mancalog.synthetic import random_graph

from oracles import shells_bruteforce


def result(degrees, group="g"):
    bounds = {(n, group): (closed(d, 1) if d is not None else EMPTY) for n, d in degrees.items()}
    return MembershipResult(bounds, {n: RULE_DERIVED for n in degrees}, (group,))


def sub(nodes, edges):
    return ThresholdSubgraph(tuple(nodes), tuple(edges), "g", Fraction(0), {n: Fraction(1) for n in nodes})


class TestThreshold:
    g = Graph(["a", "b", "c"], [("a", "b"), ("b", "c"), ("c", "a")])

    def test_filter(self):
        s = threshold_subgraph(result({"a": 1, "b": Fraction(7, 8), "c": 0}), self.g, "g", Fraction(3, 10))
        assert s.nodes == ("a", "b") and s.edges == (("a", "b"),)

    def test_zero_keeps_nonempty(self):
        s = threshold_subgraph(result({"a": 1, "b": 0, "c": None}), self.g, "g", 0)
        assert s.nodes == ("a", "b")

    def test_one_keeps_full_members(self):
        s = threshold_subgraph(result({"a": 1, "b": Fraction(7, 8), "c": 1}), self.g, "g", 1)
        assert s.nodes == ("a", "c") and s.edges == (("c", "a"),)

    def test_unknown_group(self):
        with pytest.raises(KeyError):
            threshold_subgraph(result({"a": 1}), Graph(["a"]), "nope", Fraction(1, 2))

    def test_threshold_range(self):
        with pytest.raises(ValueError):
            threshold_subgraph(result({"a": 1}), Graph(["a"]), "g", 2)

    @pytest.mark.parametrize("seed", range(10))
    def test_antitone(self, seed):
        rng = random.Random(seed)
        g = random_graph(rng, 15, 30)
        res = result({n: Fraction(rng.randint(0, 10), 10) for n in g.nodes})
        t1, t2 = sorted(Fraction(rng.randint(0, 10), 10) for _ in range(2))
        assert set(threshold_subgraph(res, g, "g", t2).nodes) <= set(threshold_subgraph(res, g, "g", t1).nodes)


class TestShells:
    def test_triangle_with_pendant(self):
        s = shell_decomposition(sub("abcd", [("a", "b"), ("b", "c"), ("c", "a"), ("c", "d")]))
        assert s.shells == {"a": 2, "b": 2, "c": 2, "d": 1}
        assert s.core_threshold == 2 and sorted(s.core_members) == ["a", "b", "c"]

    def test_isolated(self):
        assert shell_decomposition(sub("a", [])).shells == {"a": 0}

    def test_k4(self):
        edges = [(u, v) for u in "abcd" for v in "abcd" if u < v]
        assert set(shell_decomposition(sub("abcd", edges)).shells.values()) == {3}

    def test_double_headed_ties_collapse(self):
        assert shell_decomposition(sub("ab", [("a", "b"), ("b", "a")])).shells == {"a": 1, "b": 1}

    def test_empty_subgraph(self):
        with pytest.raises(ValueError):
            shell_decomposition(sub("", []))

    @pytest.mark.parametrize("seed", range(25))
    def test_oracles(self, seed):
        rng = random.Random(seed)
        n = rng.randint(1, 20)
        g = random_graph(rng, n, rng.randint(0, n * 3))
        ours = core_numbers(g.nodes, g.edges)
        assert ours == shells_bruteforce(g.nodes, g.edges)
        ref = nx.Graph()
        ref.add_nodes_from(g.nodes)
        ref.add_edges_from(g.edges)
        assert ours == nx.core_number(ref)

    @pytest.mark.parametrize("seed", range(10))
    def test_relabeling_invariance(self, seed):
        rng = random.Random(seed)
        g = random_graph(rng, 15, 35)
        names = list(g.nodes)
        perm = dict(zip(names, rng.sample(names, len(names))))
        moved = core_numbers([perm[n] for n in g.nodes], [(perm[u], perm[v]) for u, v in g.edges])
        assert {n: moved[perm[n]] for n in g.nodes} == core_numbers(g.nodes, g.edges)


def test_exports():
    g = Graph(["a", "b", "c"], [("a", "b"), ("b", "a"), ("b", "c")])
    res = result({"a": 1, "b": Fraction(7, 8), "c": Fraction(1, 2)})
    s = threshold_subgraph(res, g, "g", Fraction(1, 2))
    shells = shell_decomposition(s)
    assert edge_list(s) == "a b\nb a\nb c\n"
    assert node_table(s, shells).splitlines() == [
        "node,degree_lower,shell,is_core",
        "a,1,1,true",
        "b,7/8,1,true",
        "c,1/2,1,true",
    ]
