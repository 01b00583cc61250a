"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line.

The lines are printed in pytest's terminal summary and also when the file
is run directly with ``python tests/test_acceptance.py``.
"""

import json
import os
import random
import time
from fractions import Fraction

import pytest

from mancalog.analytics import ThresholdSubgraph, core_numbers, shell_decomposition
from mancalog.checker import check_model
from mancalog.dsl import interpretation_to_json, load_model, parse_graph, parse_program, serialize_graph, serialize_program
from mancalog.engine import TOP, convergence_bound, gamma_fixpoint, gamma_step, interp_precedes
from mancalog.errors import ParseError
from mancalog.intervals import EMPTY, closed, point
from mancalog.membership import MembershipProblem, result_to_csv, solve_membership
from mancalog.model import TRUE, And, Graph, Label, NetworkAtom, Not, World, world_satisfies
from mancalog.program import Fact, IntegrityConstraint, NeighborCriterion, Program, Rule, Suppress, validate_program
from mancalog.synthetic import field_scale_problem, random_graph, random_instance, random_program

from conftest import read
from oracles import brute_force_consistent, lattice_instance, loosen, shells_bruteforce, tighten_model

RESULTS: dict[int, tuple[bool, str]] = {}
THREADS = sorted({1, 4, os.cpu_count() or 1})


def record(n: int, ok: bool, detail: str):
    RESULTS[n] = (ok, detail)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


# -- shared workloads -------------------------------------------------------

_cache: dict = {}


def criterion1_instances():
    if "c1" not in _cache:
        rng = random.Random(2024)
        _cache["c1"] = [random_instance(rng) for _ in range(500)]
    return _cache["c1"]


def field_scale_runs():
    """(seconds, csv) for three single-thread runs and one run per extra thread count."""
    if "c7" not in _cache:
        prob = field_scale_problem(seed=0)
        runs = []
        for threads in [1, 1, 1] + [t for t in THREADS if t != 1]:
            began = time.perf_counter()
            res, fix = solve_membership(prob, threads=threads)
            runs.append((threads, time.perf_counter() - began, result_to_csv(res), fix))
        _cache["c7"] = (prob, runs)
    return _cache["c7"]


def model_bytes(fix) -> bytes:
    body = {"consistent": fix.consistent, "iterations": fix.iterations, "witness": fix.witness,
            "model": interpretation_to_json(fix.final)}
    return json.dumps(body, sort_keys=True, default=str).encode()


# -- criteria ---------------------------------------------------------------


def test_criterion_01_fixpoint_is_model():
    began = time.perf_counter()
    instances = criterion1_instances()
    good = 0
    for g, p in instances:
        fix = gamma_fixpoint(p, g, threads=1)
        _cache.setdefault("c1_fix", []).append(fix)
        good += fix.consistent and check_model(p, g, fix.model)[0]
    elapsed = time.perf_counter() - began
    record(1, good == 500 and elapsed < 120, f"{good}/500 fixpoints are models in {elapsed:.1f}s (budget 120s)")


def test_criterion_02_minimality_and_contraction():
    rng = random.Random(7)
    ok = 0
    for _ in range(200):
        g, p = random_instance(rng, max_nodes=15, max_rules=10, positive_h=True)
        least = gamma_fixpoint(p, g, threads=1).model
        model = tighten_model(rng, p, g, least)
        below = loosen(rng, p, model)
        ok += (check_model(p, g, model)[0] and interp_precedes(least, model)
               and interp_precedes(below, model) and interp_precedes(gamma_step(p, g, below), model))
    record(2, ok == 200, f"{ok}/200 pairs satisfy least ⊑ model and Γ(I') ⊑ model")


def test_criterion_03_convergence_bound():
    instances = criterion1_instances()
    fixes = _cache.get("c1_fix") or [gamma_fixpoint(p, g, threads=1) for g, p in instances]
    bad_bound = sum(f.iterations > convergence_bound(p, g) for f, (g, p) in zip(fixes, instances))
    bad_touched = sum(f.iterations > f.touched + 1 for f in fixes)
    worst = max(f.iterations / convergence_bound(p, g) for f, (g, p) in zip(fixes, instances))
    record(3, bad_bound == 0 and bad_touched == 0,
           f"{len(fixes) - bad_bound}/{len(fixes)} within |P|·d_in·t_max·|E|, "
           f"{len(fixes) - bad_touched}/{len(fixes)} within touched+1 (max k/bound {worst:.3f})")


def inject(rng: random.Random, kind: str):
    """A consistent random program with one contradiction added."""
    while True:
        g = random_graph(rng, rng.randint(2, 12), rng.randint(1, 20))
        base = random_program(rng, g, n_labels=4, t_max=rng.randint(0, 3), n_rules=rng.randint(0, 4),
                              n_facts=rng.randint(0, 8), n_ics=rng.randint(0, 1), positive_h=True)
        if gamma_fixpoint(base, g, threads=1).consistent:
            break
    x, y = Label("X", True), Label("Y", True)
    v = rng.choice(g.nodes)
    t = rng.randint(0, base.t_max)
    facts, ics, rules = list(base.facts), list(base.ics), list(base.rules)
    if kind == "disjoint":
        facts += [Fact(NetworkAtom(x, closed(0, "0.3")), v, t, t), Fact(NetworkAtom(x, closed("0.6", 1)), v, t, t)]
    elif kind == "ic":
        facts += [Fact(NetworkAtom(x, point(1)), v, t, t), Fact(NetworkAtom(y, closed("0.8", 1)), v, t, t)]
        ics.append(IntegrityConstraint(NetworkAtom(y, closed(0, "0.5")), (NetworkAtom(x, point(1)),)))
    else:
        u, v = rng.choice(g.edges)
        facts += [Fact(NetworkAtom(y, point(1)), u, 0, base.t_max), Fact(NetworkAtom(x, point(1)), v, t, t)]
        rules.append(Rule(x, 0, TRUE, NeighborCriterion(TRUE, TRUE, NetworkAtom(y, point(1)), Suppress(1))))
    p = Program(base.labels + (x, y), tuple(facts), tuple(ics), tuple(rules), base.t_max)
    return g, p


def test_criterion_04_inconsistency_detection():
    rng = random.Random(11)
    kinds = ["disjoint", "ic", "suppress"]
    detected = 0
    for k in range(100):
        g, p = inject(rng, kinds[k % 3])
        fix = gamma_fixpoint(p, g, threads=1)
        detected += fix.model is TOP and fix.witness is not None and fix.final.bound(*fix.witness) is EMPTY
    rng = random.Random(12)
    agree = 0
    n_small = 300
    for _ in range(n_small):
        g, p = lattice_instance(rng)
        agree += gamma_fixpoint(p, g, threads=1).consistent == brute_force_consistent(p, g)
    record(4, detected == 100 and agree == n_small,
           f"{detected}/100 injected contradictions give ⊤ with an empty witness cell; "
           f"{agree}/{n_small} small instances agree with lattice brute force")


def test_criterion_05_membership_oracle():
    exact = []
    for k in (1, 2, 3, 5):
        leaves = [f"m{i}" for i in range(k)]
        g = Graph(["center"] + leaves, [(u, "center") for u in leaves])
        res, _ = solve_membership(MembershipProblem(g, ("g1",), {u: "g1" for u in leaves}, {"g1": Fraction(1, 2)}))
        exact.append(res.bounds[("center", "g1")] == closed(1 - Fraction(1, 2) ** k, 1))
    g = Graph(["u1", "u2", "u3"], [("u1", "u2"), ("u2", "u3")])
    res, _ = solve_membership(MembershipProblem(g, ("g",), {"u1": "g"}, {"g": Fraction(3, 4)}, theta=Fraction(3, 4)))
    chain = res.bounds[("u2", "g")] == res.bounds[("u3", "g")] == closed(Fraction(3, 4), 1)
    record(5, all(exact) and chain, f"star k=1,2,3,5 exact: {exact}; chain [3/4,1] at both unknowns: {chain}")


def test_criterion_06_worked_example():
    fem, male = Label("fem", False), Label("male", False)
    vis_a, vis_b = Label("visPgA", True), Label("visPgB", True)
    w = World([NetworkAtom(fem, point(1)), NetworkAtom(male, point(0)),
               NetworkAtom(vis_a, point(1)), NetworkAtom(vis_b, point(0))])
    f = And(And(NetworkAtom(fem, point(1)), Not(NetworkAtom(vis_a, closed("0.5", "0.9")))),
            Not(NetworkAtom(vis_b, closed("0.1", "0.7"))))
    sat = world_satisfies(w, f)
    g, p = load_model(read("gsoc.mcg"), read("running.mcp"))
    parsed = len(p.rules) == 3 and len(p.ics) == 1 and not validate_program(p, g)
    heads = [(r.head.name, r.delta_t) for r in p.rules]
    record(6, sat and parsed and heads == [("visPgA", 2), ("visPgB", 1), ("visPgA", 3)],
           f"world check {sat}; facts/IC/R1-R3 parse and validate: {parsed} (heads {heads})")


def test_criterion_07_field_scale():
    prob, runs = field_scale_runs()
    seconds, fix = runs[0][1], runs[0][3]
    record(7, seconds <= 38 and fix.consistent,
           f"2333 nodes / 3676 edges / {len(prob.groups)} rules solved in {seconds:.2f}s "
           f"({fix.iterations} iterations, limit 38s)")


def test_criterion_08_determinism():
    subset = criterion1_instances()[:60]
    stable = 0
    for g, p in subset:
        outs = {model_bytes(gamma_fixpoint(p, g, threads=1)) for _ in range(3)}
        outs |= {model_bytes(gamma_fixpoint(p, g, threads=t)) for t in THREADS}
        stable += len(outs) == 1
    _, runs = field_scale_runs()
    scale_ok = len({csv for _, _, csv, _ in runs}) == 1
    record(8, stable == len(subset) and scale_ok,
           f"{stable}/{len(subset)} criterion-1 instances and field-scale run identical "
           f"across 3 runs and threads {THREADS}: {scale_ok}")


def test_criterion_09_shells():
    rng = random.Random(5)
    agree = 0
    for _ in range(100):
        n = rng.randint(1, 20)
        g = random_graph(rng, n, rng.randint(0, n * (n - 1) // 2))
        agree += core_numbers(g.nodes, g.edges) == shells_bruteforce(g.nodes, g.edges)
    nodes = ("a", "b", "c", "d")
    sub = ThresholdSubgraph(nodes, (("a", "b"), ("b", "c"), ("c", "a"), ("c", "d")), "g", Fraction(0),
                            {n: Fraction(1) for n in nodes})
    shells = shell_decomposition(sub)
    pendant = dict(shells.shells) == {"a": 2, "b": 2, "c": 2, "d": 1} and shells.core_threshold == 2
    record(9, agree == 100 and pendant, f"{agree}/100 random graphs match brute-force k-core; triangle+pendant: {pendant}")


def fuzz_input(rng: random.Random, seeds: list[bytes]) -> bytes:
    if rng.random() < 0.5:
        return bytes(rng.randrange(256) for _ in range(rng.randint(0, 60)))
    base = bytearray(rng.choice(seeds))
    for _ in range(rng.randint(1, 4)):
        base[rng.randrange(len(base))] = rng.randrange(256)
    return bytes(base)


def test_criterion_10_dsl_round_trip_and_fuzz():
    rng = random.Random(10)
    same = 0
    for _ in range(1000):
        g = random_graph(rng, rng.randint(1, 10), rng.randint(0, 15))
        p = random_program(rng, g, n_labels=rng.randint(2, 6), t_max=rng.randint(0, 4),
                           n_rules=rng.randint(0, 5), n_facts=rng.randint(0, 8), n_ics=rng.randint(0, 2))
        same += parse_program(serialize_program(p), graph=g) == p and parse_graph(serialize_graph(g)).graph == g
    seeds = [read("running.mcp").encode()[-400:], read("gsoc.mcg").encode()[-300:], read("facts_demo.mcp").encode()]
    crashes = []
    diagnostics = 0
    for k in range(100_000):
        data = fuzz_input(rng, seeds)
        parse = parse_program if k % 2 else parse_graph
        try:
            parse(data)
        except ParseError as exc:
            diagnostics += bool(exc.diagnostics)
        except Exception as exc:  # anything else is a crash
            crashes.append((data, repr(exc)))
    record(10, same == 1000 and not crashes,
           f"{same}/1000 round-trips equal; 100000 fuzz inputs, {len(crashes)} crashes, {diagnostics} diagnosed")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))
