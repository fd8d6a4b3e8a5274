import random

import pytest

from hrg2pg.errors import RealizationError, TranslationError
from hrg2pg.grammar import Production
from hrg2pg.hypergraph import Edge, Hypergraph, isomorphic
from hrg2pg.positional import (
    Connector,
    Element,
    PositionalProduction,
    PositionalString,
    check_relation_axioms,
    format_positional,
    parse_positional,
    realize,
    to_json,
    translate_graph,
    translate_grammar,
    translate_production,
)

import randomgraphs

CYCLE_ARITIES = {"S": 1, "C": 2, "a": 2, "b": 2}


def test_fig1_production(fig1):
    pp = translate_production(fig1.productions[0], fig1.labels)
    assert format_positional(pp) == "S ⇒ ⟨1,−1,3⟩ d ⟨2,0,1⟩ C ⟨2,1,1⟩∧⟨2,0,3⟩ B (S1=d1, S2=C2)"
    assert pp.unary == {(1, 3), (2, 2)}
    assert isomorphic(realize(pp), fig1.productions[0].rhs) is not None


def test_cycle_productions(cycle):
    texts = [format_positional(pp) for pp in translate_grammar(cycle).productions]
    assert texts == [
        "S ⇒ ⟨1,−1,2⟩ C (S1=C1)",
        "C ⇒ C ⟨2,0,1⟩ a (C1=C1, C2=a2)",
        "C ⇒ C ⟨2,0,1⟩ b (C1=C1, C2=b2)",
        "C ⇒ a (C1=a1, C2=a2)",
        "C ⇒ b (C1=b1, C2=b2)",
    ]


def test_human_form_omits_zero_distance(cycle):
    pp = translate_production(cycle.production("P2"))
    assert format_positional(pp, human=True) == "C ⇒ C ⟨2,1⟩ a (C1=C1, C2=a2)"


def test_fig1_h_strings(fig1_h):
    assert format_positional(translate_graph(fig1_h, ["e1", "e2", "e3"])) == \
        "a ⟨2,0,1⟩ a ⟨1,1,2⟩∧⟨2,0,1⟩ b"
    ps = translate_graph(fig1_h, ["e3", "e1", "e2"])
    assert [el.label for el in ps.elements] == ["b", "a", "a"]
    assert ps.conjunctions == (frozenset(), {Connector(2, 0, 1)},
                               {Connector(2, 0, 1), Connector(1, 1, 2)})
    assert isomorphic(realize(ps), fig1_h) is not None


def test_single_loop():
    loop = Hypergraph((Edge("e1", "a", ("n", "n")),))
    assert format_positional(translate_graph(loop)) == "⟨1,−1,2⟩ a"


def test_order_must_stay_chain_connected():
    chain = Hypergraph((Edge("e1", "a", ("x", "y")), Edge("e2", "a", ("y", "z")),
                        Edge("e3", "a", ("z", "w"))))
    with pytest.raises(TranslationError, match="chain"):
        translate_graph(chain, ["e1", "e3", "e2"])


def test_disconnected_rhs_fails_translation():
    p = Production("P", "S", Hypergraph((Edge("a.1", "a", ("u", "m")), Edge("a.2", "a", ("n", "v"))),
                                        ("u", "v")))
    with pytest.raises(TranslationError, match="not connected"):
        translate_production(p)


def test_printed_strings_realize_to_fig1_h(fig1_h):
    ps = parse_positional("a ⟨2,0,1⟩ a ⟨1,1,2⟩∧⟨2,0,1⟩ b", CYCLE_ARITIES)
    assert isomorphic(realize(ps), fig1_h) is not None
    human = parse_positional("a ⟨2,1⟩ a ⟨1,1,2⟩∧⟨2,1⟩ b", CYCLE_ARITIES)
    assert human.conjunctions == ps.conjunctions


def test_parse_round_trip(cycle, fig1):
    for g in (cycle, fig1):
        for pp in translate_grammar(g).productions:
            back = parse_positional(format_positional(pp), g.labels, pp.name)
            assert format_positional(back) == format_positional(pp)
            assert back.unary == pp.unary
            assert back.external_map == pp.external_map


def test_self_connector_orientation_is_irrelevant(cycle):
    flipped = parse_positional("S ⇒ ⟨2,−1,1⟩ C (S1=C1)", CYCLE_ARITIES)
    canonical = parse_positional("S ⇒ ⟨1,−1,2⟩ C (S1=C1)", CYCLE_ARITIES)
    assert isomorphic(realize(flipped), realize(canonical)) is not None
    assert isomorphic(realize(flipped), cycle.production("P1").rhs) is not None


def test_realize_p2_round_trip(cycle):
    p = cycle.production("P2")
    assert isomorphic(realize(translate_production(p)), p.rhs) is not None


def test_unary_and_shared_is_a_uniqueness_breach():
    ps = PositionalString((Element("a", 2, "e1"), Element("a", 2, "e2")),
                          (frozenset(), frozenset({Connector(1, 0, 1)})),
                          frozenset({(0, 1)}))
    with pytest.raises(RealizationError, match="uniqueness"):
        realize(ps)
    assert any("uniqueness" in line for line in check_relation_axioms(ps))


def test_axioms_pass_on_fig1(fig1):
    pp = translate_production(fig1.productions[0])
    assert check_relation_axioms(pp, fig1.productions[0].rhs) == []
    # d.2, C.1 and B.1 meet at one node; the closure relates C.1 and B.1
    classes = pp.classes()
    assert classes.find((1, 1)) == classes.find((2, 1)) == classes.find((0, 2))


def test_axioms_flag_printed_fig1_token(fig1):
    printed = parse_positional("S ⇒ ⟨1,−1,3⟩ d ⟨2,0,1⟩ C ⟨2,1,1⟩∧⟨3,0,2⟩ B (S1=d1, S2=C2)",
                               fig1.labels)
    rhs = fig1.productions[0].rhs
    assert isomorphic(realize(printed), rhs) is None
    reference = Hypergraph(tuple(Edge(el.ident, e.label, e.att)
                                 for el, e in zip(printed.elements, rhs.edges)), rhs.ext)
    assert check_relation_axioms(printed, reference) != []


def test_axioms_flag_structural_breaches():
    bad_first = PositionalString((Element("a", 2, "e1"),), (frozenset({Connector(1, 0, 2)}),), ())
    assert check_relation_axioms(bad_first)
    broken = PositionalString((Element("a", 2, "e1"), Element("a", 2, "e2")),
                              (frozenset(), frozenset()), {(0, 1), (0, 2), (1, 1), (1, 2)})
    assert any("no connector" in line for line in check_relation_axioms(broken))


def test_missing_relation_is_reported():
    ps = PositionalString((Element("a", 2, "e1"), Element("a", 2, "e2")),
                          (frozenset(), frozenset({Connector(2, 0, 1)})), {(0, 1)})
    assert any("no relation" in line for line in check_relation_axioms(ps))


def test_connector_count_is_occurrences_minus_one(fig1):
    rhs = fig1.productions[0].rhs
    pp = translate_production(fig1.productions[0])
    occurrences = {}
    for e in rhs.edges:
        for v in e.att:
            occurrences[v] = occurrences.get(v, 0) + 1
    assert sum(len(c) for c in pp.conjunctions) == sum(n - 1 for n in occurrences.values())


def test_json_form(fig1):
    data = to_json(translate_production(fig1.productions[0]))
    assert data["lhs"] == "S"
    assert data["elements"][2]["conjunction"] == [[2, 1, 1], [2, 0, 3]]
    assert data["external_map"] == [[0, 1], [1, 2]]
    assert data["unary"] == [[1, 3], [2, 2]]


def test_external_class_collision():
    pp = PositionalProduction((Element("a", 2, "e1"),), (frozenset({Connector(1, -1, 2)}),), (),
                              lhs="X", external_map=((0, 1), (0, 2)))
    with pytest.raises(RealizationError, match="same node"):
        realize(pp)


@pytest.mark.parametrize("seed", range(120))
def test_round_trip_random_productions(seed):
    rng = random.Random(seed)
    p = randomgraphs.random_production(rng)
    pp = translate_production(p)
    back = realize(pp)
    assert isomorphic(back, p.rhs) is not None
    assert check_relation_axioms(pp, p.rhs) == []


@pytest.mark.parametrize("seed", range(120))
def test_order_invariance_random_graphs(seed):
    rng = random.Random(1000 + seed)
    h = randomgraphs.connected_graph(rng)
    first = translate_graph(h, randomgraphs.chain_order(h, rng))
    second = translate_graph(h, randomgraphs.chain_order(h, rng))
    assert isomorphic(realize(first), realize(second)) is not None
    assert isomorphic(realize(first), h) is not None
    assert check_relation_axioms(first, h) == []
