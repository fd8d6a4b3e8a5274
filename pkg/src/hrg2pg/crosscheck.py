"""Parser-versus-oracle checks: replay, mutations, membership agreement."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .grammar import Enumeration, Hrg, enumerate_graphs, generation_ambiguity, replace, start_graph
from .hypergraph import Edge, Hypergraph, validate
from .plr import DerivationTree, ParseTable, admissible_starts, parse, recognition_ambiguity


def replay_tree(g: Hrg, tree: DerivationTree) -> Hypergraph:
    """Rebuild the derived graph by applying the tree's productions top-down."""
    h = start_graph(g)
    work = [(h.edges[0].id, tree)]
    while work:
        edge_id, node = work.pop()
        p = g.production(node.production)
        h, edge_map, _ = replace(h, edge_id, p)
        for rhs_edge, child in zip(p.rhs.edges, node.children):
            if isinstance(child, DerivationTree):
                work.append((edge_map[rhs_edge.id], child))
    return h


def recognizes(table: ParseTable, h: Hypergraph) -> bool:
    """True when some admissible start edge leads to acceptance."""
    return any(parse(table, h, s).accepted for s in admissible_starts(table, h))


# -- mutations --------------------------------------------------------------


def mutate(h: Hypergraph, rng: random.Random, terminals: dict[str, int]) -> Optional[tuple[str, Hypergraph]]:
    """One random relabel, edge deletion or node split; None if not applicable."""
    kind = rng.choice(("relabel", "delete", "split"))
    edges = list(h.edges)
    if kind == "relabel":
        i = rng.randrange(len(edges))
        e = edges[i]
        options = sorted(t for t, a in terminals.items() if a == len(e.att) and t != e.label)
        if not options:
            return None
        edges[i] = Edge(e.id, rng.choice(options), e.att)
        return f"relabel {e.id} {e.label}->{edges[i].label}", Hypergraph(tuple(edges), h.ext, name=h.name)
    if kind == "delete":
        if len(edges) < 2:
            return None
        e = edges.pop(rng.randrange(len(edges)))
        return f"delete {e.id}", Hypergraph(tuple(edges), h.ext, name=h.name)
    occurrences = {}
    for i, e in enumerate(edges):
        for j, v in enumerate(e.att):
            occurrences.setdefault(v, []).append((i, j))
    splittable = sorted(v for v, occ in occurrences.items() if len(occ) > 1 and v not in h.ext)
    if not splittable:
        return None
    v = rng.choice(splittable)
    occ = occurrences[v]
    moved = set(rng.sample(occ, rng.randrange(1, len(occ))))
    fresh = f"{v}'"
    while fresh in occurrences:
        fresh += "'"
    new_edges = []
    for i, e in enumerate(edges):
        att = tuple(fresh if (i, j) in moved else w for j, w in enumerate(e.att))
        new_edges.append(Edge(e.id, e.label, att))
    return f"split {v}", Hypergraph(tuple(new_edges), h.ext, name=h.name)


def seeded_nonmembers(g: Hrg, enumeration: Enumeration, count: int, seed: int = 0,
                      max_steps: int = 2, max_attempts: int = 100_000) -> list[tuple[str, Hypergraph]]:
    """Mutations of enumerated members that the oracle places outside the language."""
    rng = random.Random(seed)
    members = [c.graph for c in enumeration.classes]
    out = []
    attempts = 0
    while members and len(out) < count and attempts < max_attempts:
        attempts += 1
        h = rng.choice(members)
        steps = []
        for _ in range(rng.randint(1, max_steps)):
            m = mutate(h, rng, g.terminals)
            if m is not None:
                steps.append(m[0])
                h = m[1]
        if not steps or validate(h, g.terminals):
            continue
        if len(h.edges) <= enumeration.max_edges and generation_ambiguity(g, h, enumeration) == 0:
            out.append(("; ".join(steps), h))
    return out


# -- membership agreement ------------------------------------------------------


@dataclass
class Comparison:
    source: str
    edges: int
    oracle: int  # derivation count, 0 = not in the language
    parser: bool
    diagnostic: str = ""

    @property
    def agree(self) -> bool:
        return (self.oracle > 0) == self.parser

    def to_json(self) -> dict:
        return {"source": self.source, "edges": self.edges, "oracle_derivations": self.oracle,
                "parser_accepts": self.parser, "agree": self.agree, "diagnostic": self.diagnostic}


@dataclass
class OracleReport:
    max_edges: int
    comparisons: list[Comparison] = field(default_factory=list)

    @property
    def agreement(self) -> float:
        if not self.comparisons:
            return 1.0
        return sum(c.agree for c in self.comparisons) / len(self.comparisons)

    @property
    def ok(self) -> bool:
        return all(c.agree for c in self.comparisons)

    def to_json(self) -> dict:
        return {"max_edges": self.max_edges, "comparisons": len(self.comparisons),
                "agreement": self.agreement,
                "disagreements": [c.to_json() for c in self.comparisons if not c.agree],
                "rows": [c.to_json() for c in self.comparisons]}


def compare(g: Hrg, table: ParseTable, graphs: Iterable[tuple[str, Hypergraph]],
            enumeration: Enumeration) -> list[Comparison]:
    rows = []
    for source, h in graphs:
        oracle = generation_ambiguity(g, h, enumeration)
        result = parse(table, h)
        accepted = result.accepted or recognizes(table, h)
        rows.append(Comparison(source, len(h.edges), oracle, accepted,
                               "" if accepted else result.diagnostic))
    return rows


def crosscheck(g: Hrg, table: ParseTable, max_edges: int, mutations: int = 0, seed: int = 0,
               graphs: Iterable[tuple[str, Hypergraph]] = ()) -> OracleReport:
    """Compare parser acceptance with enumeration membership.

    Covers every enumerated member up to ``max_edges``, ``mutations`` seeded
    non-member mutations of them, and any extra ``graphs``.
    """
    extra = list(graphs)
    bound = max([max_edges] + [len(h.edges) for _, h in extra])
    enumeration = enumerate_graphs(g, bound)
    corpus = [(f"member {i + 1} ({len(c.graph.edges)} edges)", c.graph)
              for i, c in enumerate(enumeration.classes) if len(c.graph.edges) <= max_edges]
    if mutations:
        member_enum = Enumeration(g, max_edges, [c for c in enumeration.classes
                                                 if len(c.graph.edges) <= max_edges])
        corpus += [(f"mutation: {how}", h)
                   for how, h in seeded_nonmembers(g, member_enum, mutations, seed)]
    corpus += extra
    return OracleReport(max_edges, compare(g, table, corpus, enumeration))


def ambiguity_report(g: Hrg, table: ParseTable, h: Hypergraph,
                     enumeration: Optional[Enumeration] = None) -> dict:
    """Generation ambiguity (derivation trees) next to recognition ambiguity (parser runs)."""
    recognition = recognition_ambiguity(table, h)
    return {
        "generation_ambiguity": generation_ambiguity(g, h, enumeration),
        "recognition_trees_up_to_rotation": recognition.distinct_up_to_rotation,
        "recognition": recognition.to_json(),
    }
