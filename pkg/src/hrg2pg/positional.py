"""Positional strings and productions over the "shares" relation.

An element is a labelled hyperedge instance; the conjunction preceding it
holds connectors ``<k, z, l>`` relating interface ``k`` of the element
``z + 1`` places to the left (``z = -1``: the element itself) with its
interface ``l``. Two interfaces are related iff they attach to the same node.
Interfaces of single-incidence internal nodes are *unary* and never printed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence

from .errors import RealizationError, TranslationError
from .grammar import Hrg, Production
from .hypergraph import Edge, Hypergraph, is_connected

MINUS = "−"
AND = "∧"
ARROW = "⇒"


class Connector(NamedTuple):
    source: int  # interface k of the source element
    distance: int  # z; -1 means the source is the target itself
    target: int  # interface l of the target element

    def source_index(self, target_index: int) -> int:
        return target_index if self.distance < 0 else target_index - 1 - self.distance

    def canonical(self) -> "Connector":
        """Self-connectors are symmetric; orient them with k < l."""
        if self.distance == -1 and self.source > self.target:
            return Connector(self.target, -1, self.source)
        return self


class Element(NamedTuple):
    label: str
    arity: int
    ident: str


Interface = tuple[int, int]  # (0-based element index, 1-based interface)


@dataclass(frozen=True)
class PositionalString:
    elements: tuple[Element, ...]
    conjunctions: tuple[frozenset, ...]
    unary: frozenset

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(Element(*e) for e in self.elements))
        object.__setattr__(self, "conjunctions", tuple(frozenset(Connector(*c) for c in conj)
                                                       for conj in self.conjunctions))
        object.__setattr__(self, "unary", frozenset(tuple(u) for u in self.unary))
        if len(self.elements) != len(self.conjunctions):
            raise ValueError("one conjunction per element required")

    def __len__(self):
        return len(self.elements)

    @property
    def external_interfaces(self) -> tuple[Interface, ...]:
        return ()

    def connectors(self) -> Iterable[tuple[int, Connector]]:
        for i, conj in enumerate(self.conjunctions):
            for c in conj:
                yield i, c

    def interfaces(self) -> list[Interface]:
        return [(i, k) for i, el in enumerate(self.elements) for k in range(1, el.arity + 1)]

    def classes(self) -> "InterfaceClasses":
        return InterfaceClasses.of(self)


@dataclass(frozen=True)
class PositionalProduction(PositionalString):
    lhs: str = ""
    external_map: tuple[Interface, ...] = ()
    name: str = ""

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "external_map", tuple(tuple(x) for x in self.external_map))

    @property
    def external_interfaces(self) -> tuple[Interface, ...]:
        return self.external_map


class InterfaceClasses:
    """Union-find over interfaces driven by connectors and external identifications."""

    def __init__(self, interfaces: Iterable[Interface]):
        self.parent = {x: x for x in interfaces}

    @classmethod
    def of(cls, ps: PositionalString) -> "InterfaceClasses":
        uf = cls(ps.interfaces())
        for i, c in ps.connectors():
            j = c.source_index(i)
            if not 0 <= j < len(ps.elements):
                raise RealizationError(f"connector {format_connector(c)} on element {i + 1} "
                                       f"points outside the string")
            if c.source not in range(1, ps.elements[j].arity + 1) or \
                    c.target not in range(1, ps.elements[i].arity + 1):
                raise RealizationError(f"connector {format_connector(c)} on element {i + 1} "
                                       f"names a missing interface")
            uf.union((j, c.source), (i, c.target))
        return uf

    def find(self, x: Interface) -> Interface:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: Interface, b: Interface) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # keep the earliest interface as representative
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra

    def groups(self) -> list[list[Interface]]:
        out: dict[Interface, list[Interface]] = {}
        for x in sorted(self.parent):
            out.setdefault(self.find(x), []).append(x)
        return list(out.values())


# -- translation --------------------------------------------------------------


def _synthesize(edges: Sequence[Edge]) -> tuple[list[frozenset], dict[str, Interface]]:
    first: dict[str, Interface] = {}
    conjunctions = []
    for i, e in enumerate(edges):
        conj = set()
        for l, v in enumerate(e.att, start=1):
            if v in first:
                si, k = first[v]
                conj.add(Connector(k, -1 if si == i else i - si - 1, l))
            else:
                first[v] = (i, l)
        conjunctions.append(frozenset(conj))
    return conjunctions, first


def chain_breaks(conjunctions: Sequence[frozenset]) -> list[int]:
    """0-based indices of non-first elements with no connector to an earlier element."""
    return [i for i, conj in enumerate(conjunctions)
            if i > 0 and not any(c.distance >= 0 for c in conj)]


def _unary(edges: Sequence[Edge], external: Iterable[str]) -> frozenset:
    count: dict[str, int] = {}
    for e in edges:
        for v in e.att:
            count[v] = count.get(v, 0) + 1
    external = set(external)
    return frozenset((i, l) for i, e in enumerate(edges) for l, v in enumerate(e.att, start=1)
                     if count[v] == 1 and v not in external)


def translate_production(p: Production, labels: Optional[Mapping[str, int]] = None
                         ) -> PositionalProduction:
    rhs = p.rhs
    if labels is not None:
        for e in rhs.edges:
            if labels.get(e.label) != len(e.att):
                raise TranslationError(f"{p.name}: edge {e.id} violates the type of {e.label}")
    if not rhs.edges or not is_connected(rhs):
        raise TranslationError(f"{p.name}: rhs not connected")
    conjunctions, first = _synthesize(rhs.edges)
    breaks = chain_breaks(conjunctions)
    if breaks:
        raise TranslationError(f"{p.name}: element {breaks[0] + 1} ({rhs.edges[breaks[0]].label}) "
                               f"is not connected to any earlier element")
    return PositionalProduction(
        elements=tuple(Element(e.label, len(e.att), e.id) for e in rhs.edges),
        conjunctions=tuple(conjunctions),
        unary=_unary(rhs.edges, rhs.ext),
        lhs=p.lhs,
        external_map=tuple(first[v] for v in rhs.ext),
        name=p.name,
    )


def translate_graph(h: Hypergraph, order: Optional[Sequence] = None) -> PositionalString:
    """Positional string of ``h`` with elements in ``order``.

    ``order`` lists edge ids or 0-based indices; default is the edge sequence.
    """
    if order is None:
        indices = list(range(len(h.edges)))
    else:
        indices = [o if isinstance(o, int) else h.edge_index(o) for o in order]
    if sorted(indices) != list(range(len(h.edges))):
        raise TranslationError("order is not a permutation of the edges")
    if not is_connected(h):
        raise TranslationError("graph not connected")
    edges = [h.edges[i] for i in indices]
    conjunctions, _ = _synthesize(edges)
    breaks = chain_breaks(conjunctions)
    if breaks:
        raise TranslationError(f"order breaks chain-connectivity at element {breaks[0] + 1} "
                               f"({edges[breaks[0]].id})")
    return PositionalString(
        elements=tuple(Element(e.label, len(e.att), e.id) for e in edges),
        conjunctions=tuple(conjunctions),
        unary=_unary(edges, ()),
    )


def chain_order(h: Hypergraph, first: int = 0) -> list[int]:
    """A chain-connected edge order starting at ``first`` (BFS over shared nodes)."""
    inc = h.incidence()
    order, seen = [first], {first}
    k = 0
    while k < len(order):
        for v in h.edges[order[k]].att:
            for j, _ in inc[v]:
                if j not in seen:
                    seen.add(j)
                    order.append(j)
        k += 1
    return order


@dataclass(frozen=True)
class PositionalGrammar:
    name: str
    start: str
    nonterminals: dict
    terminals: dict
    entering: dict
    productions: tuple[PositionalProduction, ...]

    def productions_for(self, lhs: str) -> list[PositionalProduction]:
        return [p for p in self.productions if p.lhs == lhs]


def translate_grammar(g: Hrg) -> PositionalGrammar:
    return PositionalGrammar(
        g.name, g.start, dict(g.nonterminals), dict(g.terminals), dict(g.entering),
        tuple(translate_production(p, g.labels) for p in g.productions),
    )


# -- realization and axioms --------------------------------------------------------


def realize(ps: PositionalString) -> Hypergraph:
    """Inverse of translation: nodes are the classes of related interfaces."""
    uf = InterfaceClasses.of(ps)
    for i, e in enumerate(ps.external_interfaces):
        if e not in uf.parent:
            raise RealizationError(f"external interface {i + 1} maps to missing interface {e}")
    ext_roots = [uf.find(x) for x in ps.external_interfaces]
    if len(set(ext_roots)) != len(ext_roots):
        raise RealizationError("two external interfaces realize the same node")
    external = set(ps.external_interfaces)
    groups = uf.groups()
    for u in sorted(ps.unary):
        if u not in uf.parent:
            raise RealizationError(f"unary interface {u} does not exist")
        if u in external or any(u in g and len(g) > 1 for g in groups):
            raise RealizationError(f"uniqueness breach: interface {_iface_name(ps, u)} "
                                   f"is unary and also shares a node")
    names: dict[Interface, str] = {}
    for x in ps.interfaces():
        root = uf.find(x)
        if root not in names:
            names[root] = f"v{len(names) + 1}"
    edges = tuple(
        Edge(el.ident, el.label, tuple(names[uf.find((i, k))] for k in range(1, el.arity + 1)))
        for i, el in enumerate(ps.elements)
    )
    return Hypergraph(edges, tuple(names[r] for r in ext_roots))


def sharing_pairs(h: Hypergraph, index: Mapping[str, int]) -> set[tuple[Interface, Interface]]:
    """Ordered interface pairs (distinct) attached to the same node of ``h``."""
    occ: dict[str, list[Interface]] = {}
    for e in h.edges:
        for l, v in enumerate(e.att, start=1):
            occ.setdefault(v, []).append((index[e.id], l))
    return {(a, b) for group in occ.values() for a in group for b in group if a != b}


def check_relation_axioms(ps: PositionalString, reference: Optional[Hypergraph] = None) -> list[str]:
    """Report breaches of uniqueness, symmetry and transitivity.

    The connector set, closed under symmetry and transitivity, must equal the
    node-sharing relation of ``reference`` (edges matched to elements by id)
    or, without a reference, of the realized graph.
    """
    report = []
    n = len(ps.elements)
    for i, c in ps.connectors():
        j = c.source_index(i)
        where = f"element {i + 1} ({ps.elements[i].label}) connector {format_connector(c)}"
        if c.distance < -1:
            report.append(f"{where}: distance below -1")
            continue
        if not 0 <= j < n:
            report.append(f"{where}: source outside the string")
            continue
        if not 1 <= c.source <= ps.elements[j].arity or not 1 <= c.target <= ps.elements[i].arity:
            report.append(f"{where}: interface out of range")
        if c.distance == -1 and c.source == c.target:
            report.append(f"{where}: self-connector relates an interface to itself")
        if i == 0 and c.distance != -1:
            report.append(f"{where}: first element may only carry self-connectors")
    for i in chain_breaks(ps.conjunctions):
        report.append(f"element {i + 1} ({ps.elements[i].label}): no connector to an earlier element")
    if report:
        return report

    shared = {(c.source_index(i), c.source) for i, c in ps.connectors()} | \
             {(i, c.target) for i, c in ps.connectors()}
    shared |= set(ps.external_interfaces)
    for u in sorted(ps.unary & shared):
        report.append(f"uniqueness: interface {_iface_name(ps, u)} is unary and shared")
    for x in ps.interfaces():
        if x not in shared and x not in ps.unary:
            report.append(f"uniqueness: interface {_iface_name(ps, x)} takes part in no relation")

    uf = InterfaceClasses.of(ps)
    closure = {(a, b) for g in uf.groups() for a in g for b in g if a != b}
    if reference is None:
        try:
            reference = realize(ps)
        except RealizationError as exc:
            report.append(str(exc))
            return report
    index = {el.ident: i for i, el in enumerate(ps.elements)}
    if {e.id for e in reference.edges} != set(index):
        report.append("reference edges do not match the elements")
        return report
    expected = sharing_pairs(reference, index)
    for a, b in sorted(closure - expected):
        if a < b:
            report.append(f"closure relates {_iface_name(ps, a)} and {_iface_name(ps, b)}, "
                          f"which attach to different nodes")
    for a, b in sorted(expected - closure):
        if a < b:
            report.append(f"{_iface_name(ps, a)} and {_iface_name(ps, b)} share a node "
                          f"but are not related")
    return report


# -- text notation ---------------------------------------------------------------


def format_connector(c: Connector, human: bool = False) -> str:
    if human and c.distance == 0:
        return f"⟨{c.source},{c.target}⟩"
    z = str(c.distance).replace("-", MINUS)
    return f"⟨{c.source},{z},{c.target}⟩"


def format_conjunction(conj: Iterable[Connector], human: bool = False) -> str:
    ordered = sorted(conj, key=lambda c: (-c.distance, c.source, c.target))
    return AND.join(format_connector(c, human) for c in ordered)


def _element_ref(ps: PositionalString, index: int) -> str:
    label = ps.elements[index].label
    same = [i for i, el in enumerate(ps.elements) if el.label == label]
    if len(same) == 1:
        return label
    return f"{label}[{same.index(index) + 1}]"


def _iface_name(ps: PositionalString, x: Interface) -> str:
    return f"{_element_ref(ps, x[0])}.{x[1]}"


def format_body(ps: PositionalString, human: bool = False) -> str:
    tokens = []
    for conj, el in zip(ps.conjunctions, ps.elements):
        if conj:
            tokens.append(format_conjunction(conj, human))
        tokens.append(el.label)
    return " ".join(tokens)


def format_positional(ps: PositionalString, human: bool = False) -> str:
    body = format_body(ps, human)
    if not isinstance(ps, PositionalProduction):
        return body
    binds = ", ".join(f"{ps.lhs}{i}={_element_ref(ps, e)}{k}"
                      for i, (e, k) in enumerate(ps.external_map, start=1))
    return f"{ps.lhs} {ARROW} {body} ({binds})"


_CONNECTOR = re.compile(r"^⟨\s*(\d+)\s*,\s*(?:([-−]?\d+)\s*,\s*)?(\d+)\s*⟩$")
_BIND = re.compile(r"^(.+?)(\d+)\s*=\s*(.+?)(?:\[(\d+)\])?(\d+)$")


def parse_connector(token: str) -> Connector:
    m = _CONNECTOR.match(token.strip())
    if not m:
        raise ValueError(f"bad connector {token!r}")
    z = int(m.group(2).replace(MINUS, "-")) if m.group(2) else 0
    return Connector(int(m.group(1)), z, int(m.group(3)))


def parse_positional(text: str, arities: Mapping[str, int], name: str = "") -> PositionalString:
    """Read the text notation back; unary interfaces are inferred.

    Accepts ``lhs ⇒ body (X1=a1, ...)`` for productions and a bare body for
    strings. ``=>``, ``->`` and ``⟶`` may replace ``⇒``, ``<`` ``>`` may
    replace the angle brackets and ``-`` the minus sign.
    """
    text = text.strip()
    lhs, binds = None, None
    for arrow in (ARROW, "⟶", "=>", "->"):
        if arrow in text:
            lhs, text = (s.strip() for s in text.split(arrow, 1))
            break
    text = text.replace("<", "⟨").replace(">", "⟩")
    m = re.search(r"\(([^()]*)\)\s*$", text)
    if m:
        binds = [b.strip() for b in m.group(1).split(",") if b.strip()]
        text = text[:m.start()].strip()
    elements, conjunctions = [], []
    pending: set = set()
    for token in re.findall(r"⟨[^⟩]*⟩|[^\s∧]+", text):
        if token.startswith("⟨"):
            pending.add(parse_connector(token))
        else:
            if token not in arities:
                raise ValueError(f"unknown label {token!r}")
            elements.append(Element(token, arities[token], f"e{len(elements) + 1}"))
            conjunctions.append(frozenset(pending))
            pending = set()
    if pending:
        raise ValueError("trailing conjunction without target element")
    external_map: list[Interface] = []
    if binds is not None:
        for b in binds:
            bm = _BIND.match(b)
            if not bm:
                raise ValueError(f"bad external binding {b!r}")
            label, occ, iface = bm.group(3), int(bm.group(4) or 1), int(bm.group(5))
            same = [i for i, el in enumerate(elements) if el.label == label]
            if len(same) < occ:
                raise ValueError(f"binding {b!r} names a missing element")
            external_map.append((same[occ - 1], iface))
    related = set(external_map)
    for i, conj in enumerate(conjunctions):
        for c in conj:
            related.add((c.source_index(i), c.source))
            related.add((i, c.target))
    unary = {(i, k) for i, el in enumerate(elements) for k in range(1, el.arity + 1)} - related
    if lhs is None:
        return PositionalString(tuple(elements), tuple(conjunctions), frozenset(unary))
    return PositionalProduction(tuple(elements), tuple(conjunctions), frozenset(unary),
                                lhs=lhs, external_map=tuple(external_map), name=name)


def to_json(ps: PositionalString) -> dict:
    out = {
        "text": format_positional(ps),
        "elements": [
            {"index": i, "label": el.label, "arity": el.arity, "id": el.ident,
             "conjunction": [list(c) for c in sorted(conj, key=lambda c: (-c.distance, c.source, c.target))]}
            for i, (el, conj) in enumerate(zip(ps.elements, ps.conjunctions))
        ],
        "unary": sorted(list(u) for u in ps.unary),
    }
    if isinstance(ps, PositionalProduction):
        out = {"name": ps.name, "lhs": ps.lhs, **out,
               "external_map": [list(x) for x in ps.external_map]}
    return out
