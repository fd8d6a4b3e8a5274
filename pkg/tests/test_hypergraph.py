import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hrg2pg.errors import SizeLimitError
from hrg2pg.hypergraph import (
    Edge,
    Hypergraph,
    components,
    invariant_key,
    is_connected,
    isomorphic,
    type_of,
    validate,
)

LABELS = {"a": 2, "b": 2}


def cycle_graph(labels, prefix="v"):
    n = len(labels)
    return Hypergraph(tuple(Edge(f"e{i + 1}", lab, (f"{prefix}{i}", f"{prefix}{(i + 1) % n}"))
                            for i, lab in enumerate(labels)))


def kinds(report):
    return sorted(v.kind for v in report)


def test_fig1_h_is_valid(fig1_h):
    assert validate(fig1_h, LABELS) == []
    assert fig1_h.nodes == ("nL", "nT", "nR")
    assert type_of(fig1_h) == 0


def test_arity_mismatch_names_the_edge():
    h = Hypergraph((Edge("e1", "a", ("n1", "n2")), Edge("e2", "a", ("n2",))))
    report = validate(h)
    assert kinds(report) == ["arity mismatch"]
    assert report[0].subject == "e2"


def test_undeclared_label():
    h = Hypergraph((Edge("e1", "z", ("n1", "n2")),))
    report = validate(h, LABELS)
    assert kinds(report) == ["undeclared label"]
    assert "e1" in str(report[0])


def test_isolated_node_and_edge():
    h = Hypergraph((Edge("e1", "a", ("n1", "n2")), Edge("e2", "c", ())), nodes=("n1", "n2", "n3"))
    assert kinds(validate(h)) == ["isolated edge", "isolated node"]


def test_duplicate_ids_and_externals():
    h = Hypergraph((Edge("e1", "a", ("n1", "n2")), Edge("e1", "b", ("n2", "n1"))), ext=("n1", "n1"))
    assert kinds(validate(h)) == ["duplicate edge id", "duplicate external"]


def test_unknown_nodes():
    h = Hypergraph((Edge("e1", "a", ("n1", "n2")),), ext=("n9",), nodes=("n1",))
    assert kinds(validate(h)) == ["unknown node", "unknown node"]


def test_loops_are_allowed():
    assert validate(Hypergraph((Edge("e1", "a", ("n", "n")),)), LABELS) == []


def test_connectivity():
    assert is_connected(cycle_graph("aab"))
    split = Hypergraph((Edge("e1", "a", ("n1", "n2")), Edge("e2", "a", ("n3", "n4"))))
    assert not is_connected(split)
    assert len(components(split)) == 2


def test_isomorphism_ignores_names_and_order():
    h1 = cycle_graph("aab")
    h2 = cycle_graph("aba", prefix="w").reordered([2, 0, 1])
    iso = isomorphic(h1, h2)
    assert iso is not None
    for e in h1.edges:
        image = h2.edge(iso.edges[e.id])
        assert image.label == e.label
        assert image.att == tuple(iso.nodes[v] for v in e.att)


def test_isomorphism_respects_direction_and_labels():
    assert isomorphic(cycle_graph("aab"), cycle_graph("abb")) is None
    forward = Hypergraph((Edge("e1", "a", ("x", "y")), Edge("e2", "a", ("y", "z"))))
    converge = Hypergraph((Edge("e1", "a", ("x", "y")), Edge("e2", "a", ("z", "y"))))
    assert isomorphic(forward, converge) is None


def test_isomorphism_respects_external_order():
    h1 = Hypergraph((Edge("e1", "a", ("x", "y")),), ext=("x", "y"))
    h2 = Hypergraph((Edge("e1", "a", ("x", "y")),), ext=("y", "x"))
    assert isomorphic(h1, h1) is not None
    assert isomorphic(h1, h2) is None


def test_isomorphism_size_limit():
    big = cycle_graph("a" * 5)
    with pytest.raises(SizeLimitError):
        isomorphic(big, big, max_edges=4)


def test_size_limit_from_environment(monkeypatch):
    monkeypatch.setenv("HRG2PG_ISO_MAX_EDGES", "3")
    with pytest.raises(SizeLimitError):
        isomorphic(cycle_graph("aaaa"), cycle_graph("aaaa"))


def test_regular_graphs_need_backtracking():
    # two 6-cycles vs one 12-cycle: same degree sequence, different shape
    two = Hypergraph(tuple(Edge(f"e{i}", "a", (f"p{i}", f"p{(i + 1) % 6}")) for i in range(6))
                     + tuple(Edge(f"f{i}", "a", (f"q{i}", f"q{(i + 1) % 6}")) for i in range(6)))
    one = cycle_graph("a" * 12)
    assert isomorphic(two, one) is None


@st.composite
def random_graphs(draw):
    n_nodes = draw(st.integers(1, 5))
    n_edges = draw(st.integers(1, 6))
    edges = []
    for i in range(n_edges):
        label = draw(st.sampled_from(["a", "b", "t"]))
        arity = 3 if label == "t" else 2
        att = tuple(f"n{draw(st.integers(0, n_nodes - 1))}" for _ in range(arity))
        edges.append(Edge(f"e{i}", label, att))
    return Hypergraph(tuple(edges))


@settings(max_examples=150, deadline=None)
@given(random_graphs(), st.randoms(use_true_random=False))
def test_isomorphic_to_any_renaming_and_reordering(h, rnd):
    names = list(h.nodes)
    fresh = [f"m{i}" for i in range(len(names))]
    rnd.shuffle(fresh)
    rename = dict(zip(names, fresh))
    order = list(range(len(h.edges)))
    rnd.shuffle(order)
    renamed = Hypergraph(tuple(Edge(f"x{k}", h.edges[i].label, tuple(rename[v] for v in h.edges[i].att))
                               for k, i in enumerate(order)))
    assert invariant_key(h) == invariant_key(renamed)
    assert isomorphic(h, renamed) is not None


@settings(max_examples=150, deadline=None)
@given(random_graphs(), st.integers(0, 10_000))
def test_relabelling_one_edge_breaks_isomorphism(h, seed):
    rng = random.Random(seed)
    i = rng.randrange(len(h.edges))
    e = h.edges[i]
    if e.label == "t":
        return
    swapped = "b" if e.label == "a" else "a"
    edges = list(h.edges)
    edges[i] = Edge(e.id, swapped, e.att)
    assert isomorphic(h, Hypergraph(tuple(edges))) is None


@settings(max_examples=100, deadline=None)
@given(random_graphs())
def test_validate_accepts_generated_graphs(h):
    assert validate(h, {"a": 2, "b": 2, "t": 3}) == []
