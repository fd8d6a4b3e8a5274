"""Exit criteria of the toolkit. Each test is one criterion; the terminal
summary prints a PASS or FAIL line for every one of them."""

import random
import time
from pathlib import Path

import pytest

from hrg2pg.cli import run
from hrg2pg.crosscheck import ambiguity_report, crosscheck
from hrg2pg.errors import NotWellFormedError
from hrg2pg.grammar import enumerate_graphs, generation_ambiguity
from hrg2pg.hypergraph import Edge, Hypergraph, isomorphic
from hrg2pg.plr import build_table, recognition_ambiguity
from hrg2pg.positional import (
    check_relation_axioms,
    format_positional,
    realize,
    translate_graph,
    translate_grammar,
    translate_production,
)
from hrg2pg.transform import is_well_formed, normalize, rhs_orderings, simple_permute

import randomgraphs
from conftest import fixture_path, load

ROOT = Path(__file__).resolve().parent.parent
FIG1_GOLDEN = "S ⇒ ⟨1,−1,3⟩ d ⟨2,0,1⟩ C ⟨2,1,1⟩∧⟨2,0,3⟩ B (S1=d1, S2=C2)"
FIG1_H_GOLDEN = "a ⟨2,0,1⟩ a ⟨1,1,2⟩∧⟨2,0,1⟩ b"
CYCLE_STATES = 7
SEEDED_CASES = 120

pytestmark = pytest.mark.acceptance


def cycle_graph(labels):
    n = len(labels)
    return Hypergraph(tuple(Edge(f"e{i + 1}", lab, (f"v{i}", f"v{(i + 1) % n}"))
                            for i, lab in enumerate(labels)))


def scrambled_cycle(g):
    # multi-element productions put the terminal first, which breaks entering interface 1
    return g.replace_productions([simple_permute(p, (2, 1)) if len(p.rhs.edges) == 2 else p
                                  for p in g.productions])


@pytest.mark.criterion(1, "fig1 golden translation")
def test_fig1_translation():
    t0 = time.perf_counter()
    code, report, text, _ = run(["translate", str(fixture_path("fig1.hrg"))])
    assert code == 0
    assert FIG1_GOLDEN in text.splitlines()
    fig1 = load("fig1.hrg")
    pp = translate_production(fig1.productions[0], fig1.labels)
    assert isomorphic(realize(pp), fig1.productions[0].rhs) is not None
    assert time.perf_counter() - t0 < 1.0
    log = (ROOT / "docs" / "paper-divergences.md").read_text()
    assert "⟨3,0,2⟩" in log and "⟨2,0,3⟩" in log


@pytest.mark.criterion(2, "fig1 H golden string")
def test_fig1_h_translation(fig1_h):
    t0 = time.perf_counter()
    ps = translate_graph(fig1_h, ["e1", "e2", "e3"])
    assert format_positional(ps) == FIG1_H_GOLDEN
    assert format_positional(ps, human=True) == "a ⟨2,1⟩ a ⟨1,1,2⟩∧⟨2,1⟩ b"
    assert isomorphic(realize(ps), fig1_h) is not None
    assert time.perf_counter() - t0 < 1.0


@pytest.mark.criterion(3, "well-formedness judgments")
def test_well_formedness(cycle):
    assert cycle.entering == {"S": frozenset({1}), "C": frozenset({1})}
    for pp in translate_grammar(cycle).productions:
        assert is_well_formed(pp, cycle.entering[pp.lhs]).ok, pp.name
    permuted = translate_production(simple_permute(cycle.production("P2"), (2, 1)))
    assert format_positional(permuted).startswith("C ⇒ a ⟨1,0,2⟩ C")
    wf = is_well_formed(permuted, cycle.entering["C"])
    assert not wf.ok
    assert wf.failing == (1,)
    assert "entering interface 1" in wf.diagnostic


@pytest.mark.criterion(4, "conflict-free cycle table")
def test_cycle_table():
    code, report, _, _ = run(["tables", str(fixture_path("cycle.hrg"))])
    assert code == 0
    assert report["payload"]["conflicts"] == []
    assert report["payload"]["state_count"] == CYCLE_STATES


@pytest.mark.criterion(5, "parser/oracle membership agreement")
def test_oracle_agreement(cycle, cycle_table):
    t0 = time.perf_counter()
    report = crosscheck(cycle, cycle_table, 6, mutations=200, seed=0)
    members = [c for c in report.comparisons if c.source.startswith("member")]
    mutants = [c for c in report.comparisons if c.source.startswith("mutation")]
    assert len(members) == len(enumerate_graphs(cycle, 6)) == 37
    assert len(mutants) == 200
    assert all(c.oracle > 0 and c.parser for c in members)
    assert all(c.oracle == 0 and not c.parser for c in mutants)
    assert report.agreement == 1.0
    assert time.perf_counter() - t0 < 60.0


@pytest.mark.criterion(6, "start independence on cycles of 1 to 8 edges")
def test_start_independence(cycle, cycle_table):
    classes = enumerate_graphs(cycle, 8).classes
    assert {len(c.graph.edges) for c in classes} == set(range(1, 9))
    for c in classes:
        n = len(c.graph.edges)
        report = recognition_ambiguity(cycle_table, c.graph)
        assert len(report.admissible) == n
        for r in report.rows:
            assert r.accepted, (r.start_edge, r.diagnostic)
            assert (r.shifts, r.reduces) == (n, n + 1)


@pytest.mark.criterion(7, "normalization of the scrambled cycle grammar")
def test_normalization(cycle):
    t0 = time.perf_counter()
    bad = scrambled_cycle(cycle)
    with pytest.raises(NotWellFormedError):
        build_table(translate_grammar(bad))
    for copies in (None, 0):
        result = normalize(bad) if copies is None else normalize(bad, max_duplicates=copies)
        assert result.plan.cost == 0
        assert result.table.conflicts == []
    code, report, _, _ = run(["normalize", str(fixture_path("scrambled-cycle.hrg")),
                              "--max-duplicates", "0"])
    assert code == 0 and report["payload"]["plan"]["cost"] == 0
    assert time.perf_counter() - t0 < 10.0


@pytest.mark.criterion(8, "generation vs recognition ambiguity")
def test_ambiguity_distinction(cycle, cycle_table, cycle_enum6):
    h = cycle_graph("aab")
    assert generation_ambiguity(cycle, h, cycle_enum6) == 3
    recognition = recognition_ambiguity(cycle_table, h)
    assert len(recognition.accepting) == len(recognition.admissible) == 3
    assert all(r.tree is not None for r in recognition.accepting)
    assert recognition.fetch_ambiguities == 0
    side_by_side = ambiguity_report(cycle, cycle_table, h, cycle_enum6)
    assert side_by_side["generation_ambiguity"] == 3
    assert side_by_side["recognition"]["fetch_ambiguities"] == 0
    assert side_by_side["recognition_trees_up_to_rotation"] == 1


@pytest.mark.criterion(9, "3! orderings of a 3-element rhs")
def test_permutation_count():
    orderings = list(rhs_orderings(3))
    assert len(orderings) == len(set(orderings)) == 6


@pytest.mark.criterion(10, "property suites")
def test_property_suites():
    for seed in range(SEEDED_CASES):
        rng = random.Random(seed)
        p = randomgraphs.random_production(rng)
        pp = translate_production(p)
        assert isomorphic(realize(pp), p.rhs) is not None, seed
        assert check_relation_axioms(pp, p.rhs) == [], seed
        h = randomgraphs.connected_graph(rng)
        ps = translate_graph(h, randomgraphs.chain_order(h, rng))
        assert isomorphic(realize(ps), h) is not None, seed
        assert check_relation_axioms(ps, h) == [], seed

    corpus = {name: (load(name), enumerate_graphs(load(name), 6))
              for name in ("cycle.hrg", "triad.hrg", "tree.hrg")}
    names = sorted(corpus)
    for seed in range(SEEDED_CASES):
        rng = random.Random(seed)
        g, base = corpus[names[seed % len(names)]]
        productions = []
        for p in g.productions:
            perm = list(range(1, len(p.rhs.edges) + 1))
            rng.shuffle(perm)
            productions.append(simple_permute(p, perm))
        result = normalize(g.replace_productions(productions))
        assert result.table.conflicts == []
        again = enumerate_graphs(result.grammar, 6)
        assert len(again) == len(base), seed
        assert all(again.find(c.graph) is not None for c in base.classes), seed
