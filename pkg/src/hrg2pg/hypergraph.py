"""Labelled hypergraphs with external nodes.

A hypergraph is an ordered sequence of hyperedges, each carrying a label and
a sequence of attachment nodes, plus an optional sequence of external nodes.
Edge order matters only where a grammar uses it as the mark order of a
right-hand side; comparisons between input graphs go through
:func:`isomorphic`.
"""

from __future__ import annotations

import os
from collections import Counter, defaultdict, deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Optional

from .errors import SizeLimitError

DEFAULT_ISO_MAX_EDGES = 32


def iso_edge_bound() -> int:
    """Edge bound for isomorphism checks, overridable via ``HRG2PG_ISO_MAX_EDGES``."""
    return int(os.environ.get("HRG2PG_ISO_MAX_EDGES", DEFAULT_ISO_MAX_EDGES))


class Label(NamedTuple):
    name: str
    arity: int


@dataclass(frozen=True)
class Edge:
    id: str
    label: str
    att: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "att", tuple(self.att))

    @property
    def arity(self) -> int:
        return len(self.att)


@dataclass(frozen=True)
class Hypergraph:
    edges: tuple[Edge, ...] = ()
    ext: tuple[str, ...] = ()
    nodes: Optional[tuple[str, ...]] = None
    name: str = ""

    def __post_init__(self):
        edges = tuple(e if isinstance(e, Edge) else Edge(*e) for e in self.edges)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "ext", tuple(self.ext))
        if self.nodes is None:
            seen = dict.fromkeys(v for e in edges for v in e.att)
            seen.update(dict.fromkeys(self.ext))
            object.__setattr__(self, "nodes", tuple(seen))
        else:
            object.__setattr__(self, "nodes", tuple(dict.fromkeys(self.nodes)))

    def __len__(self):
        return len(self.edges)

    def edge(self, edge_id: str) -> Edge:
        for e in self.edges:
            if e.id == edge_id:
                return e
        raise KeyError(edge_id)

    def edge_index(self, edge_id: str) -> int:
        for i, e in enumerate(self.edges):
            if e.id == edge_id:
                return i
        raise KeyError(edge_id)

    def incidence(self) -> dict[str, list[tuple[int, int]]]:
        """Map each node to its (edge index, 0-based position) occurrences."""
        inc: dict[str, list[tuple[int, int]]] = {v: [] for v in self.nodes}
        for i, e in enumerate(self.edges):
            for j, v in enumerate(e.att):
                inc.setdefault(v, []).append((i, j))
        return inc

    def label_counts(self) -> Counter:
        return Counter(e.label for e in self.edges)

    def reordered(self, order: Iterable[int]) -> "Hypergraph":
        """Same graph with the edge sequence permuted (0-based indices)."""
        order = list(order)
        if sorted(order) != list(range(len(self.edges))):
            raise ValueError(f"not a permutation of {len(self.edges)} edges: {order}")
        return Hypergraph(tuple(self.edges[i] for i in order), self.ext, self.nodes, self.name)


class Violation(NamedTuple):
    kind: str
    subject: str
    message: str

    def __str__(self):
        return f"{self.kind}: {self.message}"


def validate(h: Hypergraph, labels: Optional[Mapping[str, int]] = None) -> list[Violation]:
    """Check the structural restrictions on ``h``.

    ``labels`` maps label names to arities. When omitted, the arity of each
    label is taken from its first use and later disagreeing uses are
    reported as arity mismatches.
    """
    report: list[Violation] = []
    inferred: dict[str, int] = {}
    node_set = set(h.nodes)
    seen_ids: set[str] = set()
    for e in h.edges:
        if e.id in seen_ids:
            report.append(Violation("duplicate edge id", e.id, f"edge id {e.id!r} used twice"))
        seen_ids.add(e.id)
        if labels is not None:
            if e.label not in labels:
                report.append(Violation("undeclared label", e.id,
                                        f"edge {e.id} has undeclared label {e.label!r}"))
                expected = None
            else:
                expected = labels[e.label]
        else:
            expected = inferred.setdefault(e.label, len(e.att))
        if expected is not None and expected != len(e.att):
            report.append(Violation("arity mismatch", e.id,
                                    f"edge {e.id} labelled {e.label} has {len(e.att)} "
                                    f"attachments, type is {expected}"))
        if len(e.att) == 0:
            report.append(Violation("isolated edge", e.id, f"edge {e.id} has no attachments"))
        for v in e.att:
            if v not in node_set:
                report.append(Violation("unknown node", e.id,
                                        f"edge {e.id} attaches unknown node {v!r}"))
    if len(set(h.ext)) != len(h.ext):
        dup = [v for v, c in Counter(h.ext).items() if c > 1]
        report.append(Violation("duplicate external", ",".join(dup),
                                f"external nodes repeated: {', '.join(dup)}"))
    for v in h.ext:
        if v not in node_set:
            report.append(Violation("unknown node", v, f"external node {v!r} is not a node"))
    attached = {v for e in h.edges for v in e.att}
    for v in h.nodes:
        if v not in attached:
            report.append(Violation("isolated node", v, f"node {v} has no adjacent edge"))
    return report


def type_of(h: Hypergraph) -> int:
    return len(h.ext)


def components(h: Hypergraph) -> list[set[str]]:
    """Node sets of the connected components of the incidence graph."""
    adj: dict[str, set[str]] = {v: set() for v in h.nodes}
    for e in h.edges:
        for v in e.att:
            adj.setdefault(v, set()).update(e.att)
    comps, seen = [], set()
    for start in adj:
        if start in seen:
            continue
        comp, queue = {start}, deque([start])
        seen.add(start)
        while queue:
            for w in adj[queue.popleft()]:
                if w not in seen:
                    seen.add(w)
                    comp.add(w)
                    queue.append(w)
        comps.append(comp)
    return comps


def is_connected(h: Hypergraph) -> bool:
    if not h.nodes:
        return len(h.edges) <= 1
    return len(components(h)) == 1


# -- isomorphism ----------------------------------------------------------


@dataclass(frozen=True)
class Isomorphism:
    nodes: dict[str, str] = field(default_factory=dict)
    edges: dict[str, str] = field(default_factory=dict)


def _refined_colors(h: Hypergraph, rounds: int = 3) -> dict[str, int]:
    ext_pos = {v: i for i, v in enumerate(h.ext)}
    inc = h.incidence()
    sig = {v: (ext_pos.get(v, -1), len(inc[v])) for v in h.nodes}
    colors = _rank(sig)
    for _ in range(rounds):
        sig = {}
        for v in h.nodes:
            around = sorted(
                (h.edges[i].label, j, tuple(colors[w] for w in h.edges[i].att))
                for i, j in inc[v]
            )
            sig[v] = (colors[v], tuple(around))
        new = _rank(sig)
        if len(set(new.values())) == len(set(colors.values())):
            colors = new
            break
        colors = new
    return colors


def _rank(sig: Mapping[str, tuple]) -> dict[str, int]:
    order = {s: i for i, s in enumerate(sorted(set(sig.values())))}
    return {v: order[s] for v, s in sig.items()}


def invariant_key(h: Hypergraph) -> tuple:
    """Isomorphism-invariant fingerprint; equal for isomorphic graphs.

    Used to bucket graphs before the exact backtracking check.
    """
    colors = _refined_colors(h)
    return (
        len(h.nodes),
        len(h.ext),
        tuple(sorted(h.label_counts().items())),
        tuple(sorted(Counter(colors.values()).items())),
        tuple(sorted((e.label, tuple(colors[v] for v in e.att)) for e in h.edges)),
        tuple(colors[v] for v in h.ext),
    )


def isomorphic(h1: Hypergraph, h2: Hypergraph, max_edges: Optional[int] = None
               ) -> Optional[Isomorphism]:
    """Find a label-, attachment- and external-preserving bijection, or None."""
    bound = iso_edge_bound() if max_edges is None else max_edges
    if max(len(h1.edges), len(h2.edges)) > bound:
        raise SizeLimitError(f"isomorphism check limited to {bound} edges "
                             f"(got {len(h1.edges)} and {len(h2.edges)})")
    if (len(h1.nodes), len(h1.edges), len(h1.ext)) != (len(h2.nodes), len(h2.edges), len(h2.ext)):
        return None
    if h1.label_counts() != h2.label_counts():
        return None
    c1, c2 = _refined_colors(h1), _refined_colors(h2)
    if Counter(c1.values()) != Counter(c2.values()):
        return None
    # colour ids are only comparable when both graphs refine identically
    if invariant_key(h1) != invariant_key(h2):
        return None

    node_map: dict[str, str] = {}
    used: set[str] = set()
    for a, b in zip(h1.ext, h2.ext):
        if c1[a] != c2[b]:
            return None
        node_map[a] = b
        used.add(b)

    order = _search_order(h1)
    by_label: dict[str, list[int]] = defaultdict(list)
    for i, e in enumerate(h2.edges):
        by_label[e.label].append(i)
    edge_map: dict[int, int] = {}
    taken: set[int] = set()

    def extend(k: int) -> bool:
        if k == len(order):
            return True
        e1 = h1.edges[order[k]]
        for i2 in by_label[e1.label]:
            if i2 in taken:
                continue
            e2 = h2.edges[i2]
            added = []
            ok = True
            for a, b in zip(e1.att, e2.att):
                if a in node_map:
                    if node_map[a] != b:
                        ok = False
                        break
                elif b in used or c1[a] != c2[b]:
                    ok = False
                    break
                else:
                    node_map[a] = b
                    used.add(b)
                    added.append(a)
            if ok:
                taken.add(i2)
                edge_map[order[k]] = i2
                if extend(k + 1):
                    return True
                taken.discard(i2)
                del edge_map[order[k]]
            for a in added:
                used.discard(node_map.pop(a))
        return False

    if not extend(0):
        return None
    # isolated nodes pair up by colour
    rest1 = [v for v in h1.nodes if v not in node_map]
    rest2 = [v for v in h2.nodes if v not in used]
    for a in rest1:
        match = next((b for b in rest2 if b not in used and c1[a] == c2[b]), None)
        if match is None:
            return None
        node_map[a] = match
        used.add(match)
    return Isomorphism(
        nodes=dict(node_map),
        edges={h1.edges[i].id: h2.edges[j].id for i, j in edge_map.items()},
    )


def _search_order(h: Hypergraph) -> list[int]:
    """Edges in BFS order over shared nodes so partial maps constrain early."""
    inc = h.incidence()
    order, seen = [], set()
    for root in range(len(h.edges)):
        if root in seen:
            continue
        seen.add(root)
        queue = deque([root])
        while queue:
            i = queue.popleft()
            order.append(i)
            for v in h.edges[i].att:
                for j, _ in inc[v]:
                    if j not in seen:
                        seen.add(j)
                        queue.append(j)
    return order
