import json
import random
from fractions import Fraction

import pytest

from mancalog.dsl import (
    graph_from_json,
    graph_to_json,
    interpretation_from_json,
    interpretation_to_json,
    parse_graph,
    parse_program,
    parse_queries,
    program_from_json,
    program_to_json,
    serialize_formula,
    serialize_graph,
    serialize_interval,
    serialize_program,
)
from mancalog.dsl.parser import ConsistencyQuery, EntailsQuery, TightQuery
from mancalog.engine import gamma_fixpoint
from mancalog.errors import ParseError
from mancalog.intervals import EMPTY, WeightInterval, closed, point
from mancalog.model import TRUE, And, Label, NetworkAtom, Not, Or
from mancalog.program import Fact, IntegrityConstraint, Table, Tip
from mancalog.synthetic import random_formula, random_graph, random_program

from conftest import read

VOCAB = [Label("male", False), Label("fem", False), Label("strTie", False), Label("wkTie", False),
         Label("visPgA", True), Label("visPgB", True)]


def diagnostics(fn, *args, **kwargs):
    with pytest.raises(ParseError) as info:
        fn(*args, **kwargs)
    return info.value.diagnostics


class TestGraphs:
    def test_running_network(self):
        doc = parse_graph(read("gsoc.mcg"))
        assert len(doc.graph.nodes) == 8
        assert len(doc.graph.edges) == 14
        assert ("n1", NetworkAtom(Label("male", False), point(1))) in doc.annotations
        assert all(not f.atom.label.fluent for f in doc.facts(3))

    def test_requires_a_node(self):
        diags = diagnostics(parse_graph, "label strTie nonfluent;")
        assert "graph must contain at least one node" in diags[0].message

    def test_undefined_endpoint_points_at_it(self):
        src = "label strTie nonfluent;\nnode a;\nedge a -> b : <strTie,[1,1]>;\n"
        diags = diagnostics(parse_graph, src, "g.mcg")
        d = diags[0]
        assert "b" in d.message
        assert (d.span.file, d.span.line, d.span.col) == ("g.mcg", 3, 11)

    def test_duplicate_node(self):
        assert any("duplicate" in d.message for d in diagnostics(parse_graph, "node a; node a;"))

    def test_unknown_label(self):
        assert any("unknown label" in d.message for d in diagnostics(parse_graph, "node a : <zz, [1,1]>;"))

    def test_malformed_interval(self):
        assert diagnostics(parse_graph, "label x nonfluent; node a : <x, [1/0, 1]>;")


class TestPrograms:
    def test_rule_syntax(self):
        src = ("rule visPgA <-2- if <fem,[1,1]> via edge <strTie,[0.9,1]> node TRUE "
               "having <visPgA,[0.9,1.0]> using tip(3/10);")
        rule = parse_program(src, VOCAB).rules[0]
        assert rule.head.name == "visPgA" and rule.delta_t == 2
        assert rule.target == NetworkAtom(Label("fem", False), point(1))
        assert rule.neighbor.g_edge == NetworkAtom(Label("strTie", False), closed(Fraction(9, 10), 1))
        assert rule.neighbor.g_node == TRUE
        assert rule.neighbor.h == NetworkAtom(Label("visPgA", True), closed(Fraction(9, 10), 1))
        assert rule.neighbor.ifl == Tip(Fraction(3, 10))

    def test_fact_syntax(self):
        p = parse_program("tmax 3; fact (<male,[1,1]>, n1) @ [0,tmax];", VOCAB)
        assert p.facts == (Fact(NetworkAtom(Label("male", False), point(1)), "n1", 0, 3),)

    def test_ic_syntax(self):
        vocab = [Label("male", True), Label("fem", False)]
        p = parse_program("ic <male,[0,0]> <- <fem,[1,1]>;", vocab)
        assert p.ics == (IntegrityConstraint(NetworkAtom(vocab[0], point(0)), (NetworkAtom(vocab[1], point(1)),)),)

    def test_decimal_and_fraction_literals_agree(self):
        a = parse_program("label L fluent; fact (<L,[0.25,0.9]>, v) @ [0,0];")
        b = parse_program("label L fluent; fact (<L,[1/4,9/10]>, v) @ [0,0];")
        assert a == b

    def test_interval_forms(self):
        p = parse_program("label L fluent; tmax 0; fact (<L,(1/2, 9/10]>, v) @ [0,0]; "
                          "fact (<L,[0,1)>, v) @ [0,0]; fact (<L, empty>, w) @ [0,0];")
        bounds = [f.atom.bnd for f in p.facts]
        assert bounds == [WeightInterval(Fraction(1, 2), Fraction(9, 10), True, False),
                          WeightInterval(Fraction(0), Fraction(1), False, True), EMPTY]

    def test_formula_precedence(self):
        p = parse_program("label A nonfluent; label B nonfluent; label C nonfluent; label L fluent; "
                          "rule L <-0- if <A,[1,1]> | <B,[1,1]> & !<C,[1,1]> via edge TRUE node TRUE "
                          "having TRUE using tip(1);")
        f = p.rules[0].target
        assert isinstance(f, Or) and isinstance(f.right, And) and isinstance(f.right.right, Not)

    def test_all_influence_forms(self):
        src = ("label L fluent; label X nonfluent;"
               "rule L <-0- if TRUE via edge TRUE node TRUE having <L,[1,1]> using suppress(1/4);"
               "rule L <-0- if TRUE via edge TRUE node TRUE having <L,[1,1]> using frac(1/2, [0.5, 1]);"
               "rule L <-1- if TRUE via edge TRUE node TRUE having <L,[1,1]> "
               "using table(default [0,1], (1, 1): [1/2, 1], (2, 2): [1, 1]);")
        p = parse_program(src + " tmax 2;")
        assert isinstance(p.rules[2].neighbor.ifl, Table)

    def test_syntax_error_recovery_reports_all(self):
        diags = diagnostics(parse_program, "label L fluent; fact (<L,[0,1]> v) @ [0,0]; tmax x; rule;")
        assert len(diags) == 3
        assert all(d.span is not None for d in diags)

    def test_validation_diagnostics_pass_through(self):
        diags = diagnostics(parse_program, "label N nonfluent; tmax 5; fact (<N,[1,1]>, v) @ [0,3];")
        assert any(d.message == "non-fluent fact must span [0,t_max]" for d in diags)

    def test_queries_rejected_in_programs(self):
        assert diagnostics(parse_program, "query consistent;")

    def test_deep_nesting_is_a_diagnostic(self):
        src = "label L fluent; rule L <-0- if " + "!" * 5000 + "TRUE via edge TRUE node TRUE having TRUE using tip(1);"
        assert diagnostics(parse_program, src)

    def test_invalid_utf8(self):
        assert diagnostics(parse_program, b"label L fluent; # \xff\xfe\n")


class TestQueries:
    def test_query_file(self, facts_demo):
        g, p = facts_demo
        qs = parse_queries(read("facts_demo.mcq"), p)
        assert [type(q) for q in qs] == [ConsistencyQuery, EntailsQuery, EntailsQuery, TightQuery]
        assert qs[1].fact.atom.bnd == closed(Fraction(1, 2), 1)

    def test_unknown_kind(self, facts_demo):
        _, p = facts_demo
        assert diagnostics(parse_queries, "query maybe;", p)


class TestSerialization:
    def test_interval_text(self):
        assert serialize_interval(EMPTY) == "empty"
        assert serialize_interval(WeightInterval(Fraction(1, 2), Fraction(9, 10), True, False)) == "(1/2, 9/10]"

    def test_formula_parentheses(self):
        a, b, c = (NetworkAtom(Label(x, False), point(1)) for x in "ABC")
        assert serialize_formula(And(a, Or(b, c))) == "<A, [1, 1]> & (<B, [1, 1]> | <C, [1, 1]>)"
        assert serialize_formula(And(a, And(b, c))) == "<A, [1, 1]> & (<B, [1, 1]> & <C, [1, 1]>)"
        assert serialize_formula(Not(And(a, b))) == "!(<A, [1, 1]> & <B, [1, 1]>)"

    def test_running_example_round_trip(self, running_example):
        g, p = running_example
        again = parse_program(serialize_program(p), graph=g)
        assert again == p

    def test_graph_round_trip(self):
        doc = parse_graph(read("gsoc.mcg"))
        again = parse_graph(serialize_graph(doc))
        assert again.graph == doc.graph and again.annotations == doc.annotations and again.labels == doc.labels

    def test_load_model_merges_annotations(self, running_example):
        g, p = running_example
        assert sum(1 for f in p.facts if f.atom.label.name == "male" and f.component == "n1") == 1


def random_programs(seed, count):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        g = random_graph(rng, rng.randint(1, 8), rng.randint(0, 12))
        p = random_program(rng, g, n_labels=rng.randint(2, 6), t_max=rng.randint(0, 4),
                           n_rules=rng.randint(0, 5), n_facts=rng.randint(0, 8), n_ics=rng.randint(0, 2))
        out.append((g, p))
    return out


@pytest.mark.parametrize("g,p", random_programs(21, 60))
def test_text_round_trip(g, p):
    assert parse_program(serialize_program(p), graph=g) == p
    assert parse_graph(serialize_graph(g)).graph == g


@pytest.mark.parametrize("g,p", random_programs(22, 30))
def test_json_round_trip(g, p):
    assert program_from_json(json.loads(json.dumps(program_to_json(p)))) == p
    assert graph_from_json(json.loads(json.dumps(graph_to_json(g)))).graph == g
    fix = gamma_fixpoint(p, g, threads=1)
    assert interpretation_from_json(json.loads(json.dumps(interpretation_to_json(fix.final)))) == fix.final


def test_random_formula_round_trip():
    rng = random.Random(3)
    labels = [Label(f"N{i}", False) for i in range(3)]
    decl = " ".join(f"label {lab.name} nonfluent;" for lab in labels) + " label H fluent;"
    for _ in range(200):
        f = random_formula(rng, labels, depth=4)
        src = f"{decl} rule H <-0- if {serialize_formula(f)} via edge TRUE node TRUE having TRUE using tip(1);"
        assert parse_program(src).rules[0].target == f


def test_fuzz_sample_never_crashes():
    rng = random.Random(4)
    seeds = [read("running.mcp").encode(), read("gsoc.mcg").encode()]
    for k in range(3000):
        if k % 2:
            data = bytes(rng.randrange(256) for _ in range(rng.randint(0, 80)))
        else:
            base = bytearray(rng.choice(seeds))
            for _ in range(rng.randint(1, 6)):
                base[rng.randrange(len(base))] = rng.randrange(256)
            data = bytes(base)
        for parse in (parse_graph, parse_program):
            try:
                parse(data)
            except ParseError as exc:
                assert exc.diagnostics and all(d.span is not None or d.location for d in exc.diagnostics)
