"""Hyperedge replacement grammars, derivation, and the enumeration oracle."""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import BudgetError, DerivationError
from .hypergraph import (
    Edge,
    Hypergraph,
    Violation,
    components,
    invariant_key,
    is_connected,
    isomorphic,
    type_of,
    validate,
)

DEFAULT_FRONTIER_MAX = 200_000


@dataclass(frozen=True)
class Production:
    """``lhs -> rhs`` where the rhs edge order is the mark order."""

    name: str
    lhs: str
    rhs: Hypergraph

    @property
    def copy_of(self) -> Optional[str]:
        """Name of the original when this production is a duplicated permutation."""
        base, sep, _ = self.name.partition("#")
        return base if sep else None

    @property
    def base_name(self) -> str:
        return self.name.partition("#")[0]


@dataclass(frozen=True)
class Hrg:
    name: str
    nonterminals: dict[str, int]
    terminals: dict[str, int]
    productions: tuple[Production, ...]
    start: str
    entering: dict[str, frozenset[int]] = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "productions", tuple(self.productions))
        entering = {x: frozenset(self.entering.get(x, (1,))) for x in self.nonterminals}
        object.__setattr__(self, "entering", entering)

    @property
    def labels(self) -> dict[str, int]:
        return {**self.terminals, **self.nonterminals}

    def productions_for(self, lhs: str) -> list[Production]:
        return [p for p in self.productions if p.lhs == lhs]

    def production(self, name: str) -> Production:
        for p in self.productions:
            if p.name == name:
                return p
        raise KeyError(name)

    def replace_productions(self, productions: Iterable[Production]) -> "Hrg":
        return Hrg(self.name, dict(self.nonterminals), dict(self.terminals),
                   tuple(productions), self.start, dict(self.entering), self.notes)


def validate_grammar(g: Hrg) -> list[Violation]:
    report: list[Violation] = []
    for x in sorted(set(g.nonterminals) & set(g.terminals)):
        report.append(Violation("label in both N and Σ", x,
                                f"label {x} declared both terminal and non-terminal"))
    if g.start not in g.nonterminals:
        report.append(Violation("start not a non-terminal", g.start,
                                f"start symbol {g.start} is not a declared non-terminal"))
    for name, arity in g.labels.items():
        if arity < 1:
            report.append(Violation("zero arity", name, f"label {name} has type {arity} < 1"))
    for x, ent in g.entering.items():
        bad = sorted(i for i in ent if not 1 <= i <= g.nonterminals[x])
        if bad:
            report.append(Violation("entering out of range", x,
                                    f"entering interfaces {bad} of {x} outside 1..{g.nonterminals[x]}"))
    names = set()
    for p in g.productions:
        if p.name in names:
            report.append(Violation("duplicate production", p.name,
                                    f"production name {p.name} used twice"))
        names.add(p.name)
        if p.lhs not in g.nonterminals:
            report.append(Violation("lhs not a non-terminal", p.name,
                                    f"{p.name}: lhs {p.lhs} is not a non-terminal"))
        elif type_of(p.rhs) != g.nonterminals[p.lhs]:
            report.append(Violation("type mismatch lhs/rhs", p.name,
                                    f"{p.name}: type(rhs)={type_of(p.rhs)} but type({p.lhs})="
                                    f"{g.nonterminals[p.lhs]}"))
        for v in validate(p.rhs, g.labels):
            report.append(Violation(v.kind, f"{p.name}/{v.subject}", f"{p.name}: {v.message}"))
        if not p.rhs.edges:
            report.append(Violation("empty rhs", p.name, f"{p.name}: rhs has no hyperedges"))
        elif not is_connected(p.rhs):
            parts = components(p.rhs)
            report.append(Violation("rhs not connected", p.name,
                                    f"{p.name}: rhs splits into {len(parts)} components"))
    return report


# -- derivation -------------------------------------------------------------


class _Fresh:
    """Generates node/edge names not present in a host graph."""

    def __init__(self, h: Hypergraph):
        self.nodes = set(h.nodes)
        self.edges = {e.id for e in h.edges}
        self.n = len(self.nodes)
        self.e = len(self.edges)

    def node(self) -> str:
        while True:
            self.n += 1
            name = f"n{self.n}"
            if name not in self.nodes:
                self.nodes.add(name)
                return name

    def edge(self) -> str:
        while True:
            self.e += 1
            name = f"e{self.e}"
            if name not in self.edges:
                self.edges.add(name)
                return name


def replace(host: Hypergraph, edge_id: str, p: Production
            ) -> tuple[Hypergraph, dict[str, str], dict[str, str]]:
    """Replace one edge by a fresh copy of ``p.rhs``.

    Returns the new graph plus the rhs-edge -> host-edge and rhs-node ->
    host-node maps of the inserted copy. The copy's edges take the replaced
    edge's position, preserving mark order.
    """
    idx = host.edge_index(edge_id)
    target = host.edges[idx]
    if target.label != p.lhs:
        raise DerivationError(f"edge {edge_id} is labelled {target.label}, {p.name} rewrites {p.lhs}")
    if len(target.att) != len(p.rhs.ext):
        raise DerivationError(f"edge {edge_id} has {len(target.att)} attachments, "
                              f"rhs of {p.name} has type {len(p.rhs.ext)}")
    fresh = _Fresh(host)
    node_map = dict(zip(p.rhs.ext, target.att))
    for v in p.rhs.nodes:
        if v not in node_map:
            node_map[v] = fresh.node()
    edge_map = {}
    new_edges = []
    for e in p.rhs.edges:
        edge_map[e.id] = fresh.edge()
        new_edges.append(Edge(edge_map[e.id], e.label, tuple(node_map[v] for v in e.att)))
    edges = host.edges[:idx] + tuple(new_edges) + host.edges[idx + 1:]
    nodes = list(host.nodes) + [node_map[v] for v in p.rhs.nodes if v not in p.rhs.ext]
    return Hypergraph(edges, host.ext, tuple(nodes), host.name), edge_map, node_map


def derive_step(host: Hypergraph, edge_id: str, p: Production) -> Hypergraph:
    return replace(host, edge_id, p)[0]


def start_graph(g: Hrg) -> Hypergraph:
    """One start-labelled edge on distinct fresh nodes, no external nodes."""
    arity = g.nonterminals[g.start]
    return Hypergraph((Edge("e0", g.start, tuple(f"n{i}" for i in range(arity))),))


def min_yields(g: Hrg) -> dict[str, float]:
    """Least number of terminal edges derivable from each non-terminal."""
    best = {x: float("inf") for x in g.nonterminals}
    changed = True
    while changed:
        changed = False
        for p in g.productions:
            total = sum(best.get(e.label, 1) if e.label in g.nonterminals else 1
                        for e in p.rhs.edges)
            if total < best[p.lhs]:
                best[p.lhs] = total
                changed = True
    return best


@dataclass
class GraphClass:
    """An isomorphism class of derived terminal graphs."""

    graph: Hypergraph
    count: int
    derivation: tuple[str, ...]


@dataclass
class Enumeration:
    grammar: Hrg
    max_edges: int
    classes: list[GraphClass]

    def find(self, h: Hypergraph) -> Optional[GraphClass]:
        key = invariant_key(h)
        for c in self._buckets().get(key, ()):
            if isomorphic(c.graph, h) is not None:
                return c
        return None

    def _buckets(self):
        cache = self.__dict__.get("_bucket_cache")
        if cache is None:
            cache = {}
            for c in self.classes:
                cache.setdefault(invariant_key(c.graph), []).append(c)
            self.__dict__["_bucket_cache"] = cache
        return cache

    def __len__(self):
        return len(self.classes)


def frontier_bound() -> int:
    return int(os.environ.get("HRG2PG_FRONTIER_MAX", DEFAULT_FRONTIER_MAX))


def enumerate_graphs(g: Hrg, max_edges: int, max_frontier: Optional[int] = None) -> Enumeration:
    """All terminal graphs with at most ``max_edges`` edges, grouped by isomorphism.

    Derivations always rewrite the first non-terminal edge in mark order, so
    each leftmost derivation sequence is one derivation tree and the class
    counts are derivation-tree counts.
    """
    limit = frontier_bound() if max_frontier is None else max_frontier
    yields = min_yields(g)
    by_lhs: dict[str, list[Production]] = {}
    for p in g.productions:
        by_lhs.setdefault(p.lhs, []).append(p)

    def lower_bound(h: Hypergraph) -> float:
        return sum(yields[e.label] if e.label in g.nonterminals else 1 for e in h.edges)

    buckets: dict[tuple, list[GraphClass]] = {}
    classes: list[GraphClass] = []
    queue = deque([(start_graph(g), ())])
    visited = 0
    while queue:
        if len(queue) > limit:
            raise BudgetError(f"enumeration frontier exceeded {limit} sentential forms")
        h, steps = queue.popleft()
        visited += 1
        if visited > 50 * limit:
            raise BudgetError(f"enumeration visited more than {50 * limit} sentential forms")
        nt = next((e for e in h.edges if e.label in g.nonterminals), None)
        if nt is None:
            key = invariant_key(h)
            bucket = buckets.setdefault(key, [])
            for c in bucket:
                if isomorphic(c.graph, h) is not None:
                    c.count += 1
                    break
            else:
                c = GraphClass(h, 1, steps)
                bucket.append(c)
                classes.append(c)
            continue
        for p in by_lhs.get(nt.label, ()):
            nxt = derive_step(h, nt.id, p)
            if lower_bound(nxt) <= max_edges:
                queue.append((nxt, steps + (p.name,)))
    return Enumeration(g, max_edges, classes)


def generation_ambiguity(g: Hrg, h: Hypergraph, enumeration: Optional[Enumeration] = None) -> int:
    """Number of derivation trees yielding a graph isomorphic to ``h`` (0: not derivable)."""
    if any(e.label not in g.terminals for e in h.edges):
        return 0
    if enumeration is None or enumeration.max_edges < len(h.edges):
        enumeration = enumerate_graphs(g, len(h.edges))
    found = enumeration.find(h)
    return found.count if found else 0


def replay(g: Hrg, names: Iterable[str]) -> Hypergraph:
    """Apply a leftmost derivation given as a sequence of production names."""
    h = start_graph(g)
    for name in names:
        p = g.production(name)
        nt = next((e for e in h.edges if e.label in g.nonterminals), None)
        if nt is None:
            raise DerivationError(f"no non-terminal left for {name}")
        h = derive_step(h, nt.id, p)
    return h
