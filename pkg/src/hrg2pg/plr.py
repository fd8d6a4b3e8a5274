"""pLR item sets, parse tables and the bottom-up hypergraph parser.

Items carry a dot over the (conjunction, element) pairs of a positional
production. Items added by closure at dot 0 also carry the *inherited*
conjunction: the parent's connectors re-targeted at the interface of the
leftmost element the lhs interface is tied to. Because the leftmost element
occupies the stack slot the non-terminal will later occupy, connector
distances carry over unchanged.

At run time the parser fetches the next edge from the input through the
dotted conjunction instead of reading a token stream. Reductions re-verify
the whole production locally: every connector, injectivity of internal
nodes, and that internal nodes are touched by no edge outside the subtree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .errors import NotWellFormedError
from .hypergraph import Hypergraph
from .positional import (
    ARROW,
    Connector,
    Element,
    InterfaceClasses,
    PositionalGrammar,
    PositionalProduction,
    chain_breaks,
    format_conjunction,
)

AUGMENTED = 0


@dataclass(frozen=True)
class Item:
    production: int
    dot: int
    inherited: frozenset = frozenset()

    def sort_key(self):
        return self.production, self.dot, sorted(self.inherited)


@dataclass(frozen=True)
class Conflict:
    state: int
    kind: str
    actions: tuple[str, ...]

    def __str__(self):
        return f"state {self.state}: {self.kind} between {', '.join(self.actions)}"


class _ProductionInfo:
    def __init__(self, p: PositionalProduction):
        uf = InterfaceClasses.of(p)
        self.classes = uf.groups()
        self.class_of = {x: n for n, cls in enumerate(self.classes) for x in cls}
        self.external = {self.class_of[x] for x in p.external_map}
        self.tie: dict[int, int] = {}
        for l, x in enumerate(p.external_map, start=1):
            leftmost = [k for (i, k) in self.classes[self.class_of[x]] if i == 0]
            if leftmost:
                self.tie[l] = min(leftmost)


class _Grammar:
    """Indexing shared by closure, table construction and parsing."""

    def __init__(self, pg: PositionalGrammar):
        self.pg = pg
        start_arity = pg.nonterminals[pg.start]
        augmented = PositionalProduction(
            elements=(Element(pg.start, start_arity, pg.start),),
            conjunctions=(frozenset(),), unary=frozenset(),
            lhs=pg.start + "'", external_map=(), name="accept",
        )
        self.productions = (augmented,) + tuple(pg.productions)
        self.info = [_ProductionInfo(p) for p in self.productions]
        self.by_lhs: dict[str, list[int]] = {}
        for n, p in enumerate(self.productions):
            if n != AUGMENTED:
                self.by_lhs.setdefault(p.lhs, []).append(n)
        self.nonterminals = set(pg.nonterminals)

    def dotted(self, item: Item) -> Optional[Element]:
        p = self.productions[item.production]
        return p.elements[item.dot] if item.dot < len(p.elements) else None

    def fetch_conjunction(self, item: Item) -> frozenset:
        if item.dot == 0:
            return item.inherited
        return self.productions[item.production].conjunctions[item.dot]

    def closure(self, items: Iterable[Item]) -> frozenset:
        result = set(items)
        work = list(result)
        while work:
            item = work.pop()
            el = self.dotted(item)
            if el is None or el.label not in self.nonterminals:
                continue
            conj = [c for c in self.fetch_conjunction(item) if c.distance >= 0]
            for q in self.by_lhs.get(el.label, ()):
                tie = self.info[q].tie
                inherited = frozenset(Connector(c.source, c.distance, tie[c.target])
                                      for c in conj if c.target in tie)
                new = Item(q, 0, inherited)
                if new not in result:
                    result.add(new)
                    work.append(new)
        return frozenset(result)


def closure(pg: PositionalGrammar, items: Iterable[Item]) -> frozenset:
    """Least item set containing ``items`` and closed under non-terminal expansion.

    Production indices follow ``pg.productions`` shifted by one; index 0 is
    the augmented start production.
    """
    return _Grammar(pg).closure(items)


@dataclass
class ParseTable:
    grammar: PositionalGrammar
    productions: tuple[PositionalProduction, ...]
    states: list[frozenset]
    shifts: list[dict]  # (label, conjunction) -> state
    gotos: list[dict]  # non-terminal -> state
    reduces: list[tuple[int, ...]]
    accepting: frozenset
    conflicts: list[Conflict]
    resolutions: list[Conflict]
    _index: _Grammar = field(repr=False, default=None)

    @property
    def state_count(self) -> int:
        return len(self.states)

    def format_item(self, item: Item) -> str:
        return format_item(self.productions[item.production], item)

    def dump(self) -> str:
        lines = []
        for n, items in enumerate(self.states):
            lines.append(f"state {n}")
            for item in sorted(items, key=Item.sort_key):
                lines.append(f"    {self.format_item(item)}")
            for (label, conj), nxt in sorted(self.shifts[n].items(), key=_shift_sort):
                lines.append(f"  shift {label} via [{format_conjunction(conj)}] -> {nxt}")
            for label, nxt in sorted(self.gotos[n].items()):
                lines.append(f"  goto {label} -> {nxt}")
            for q in self.reduces[n]:
                lines.append(f"  reduce {self.productions[q].name}")
            if n in self.accepting:
                lines.append("  accept")
        lines.append(f"conflicts: {len(self.conflicts)}")
        lines += [f"  {c}" for c in self.conflicts]
        if self.resolutions:
            lines.append(f"resolved by shift preference: {len(self.resolutions)}")
            lines += [f"  {c}" for c in self.resolutions]
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "states": [
                {
                    "id": n,
                    "items": [self.format_item(i) for i in sorted(items, key=Item.sort_key)],
                    "shift": [{"label": label, "conjunction": sorted(list(c) for c in conj), "to": nxt}
                              for (label, conj), nxt in sorted(self.shifts[n].items(), key=_shift_sort)],
                    "goto": dict(sorted(self.gotos[n].items())),
                    "reduce": [self.productions[q].name for q in self.reduces[n]],
                    "accept": n in self.accepting,
                }
                for n, items in enumerate(self.states)
            ],
            "conflicts": [{"state": c.state, "kind": c.kind, "actions": list(c.actions)}
                          for c in self.conflicts],
            "resolutions": [{"state": c.state, "kind": c.kind, "actions": list(c.actions)}
                            for c in self.resolutions],
        }


def _shift_sort(entry):
    (label, conj), nxt = entry
    return label, sorted(conj), nxt


def format_item(p: PositionalProduction, item: Item) -> str:
    tokens = []
    for i, (conj, el) in enumerate(zip(p.conjunctions, p.elements)):
        if i == item.dot:
            tokens.append("•")
        if conj:
            tokens.append(format_conjunction(conj))
        tokens.append(el.label)
    if item.dot == len(p.elements):
        tokens.append("•")
    text = f"{p.lhs} {ARROW} {' '.join(tokens)}"
    if item.inherited:
        text += f"  [inherits {format_conjunction(item.inherited)}]"
    return text


def check_parsable(pg: PositionalGrammar) -> list[str]:
    from .transform import is_well_formed

    problems = []
    for p in pg.productions:
        for i in chain_breaks(p.conjunctions):
            problems.append(f"{p.name}: element {i + 1} not chain-connected")
        wf = is_well_formed(p, pg.entering.get(p.lhs, frozenset({1})))
        if not wf.ok:
            problems.append(f"{p.name}: {wf.diagnostic}")
    return problems


def build_table(pg: PositionalGrammar, check: bool = True) -> ParseTable:
    """Canonical LR(0) collection over positional items."""
    if check:
        problems = check_parsable(pg)
        if problems:
            raise NotWellFormedError("; ".join(problems))
    g = _Grammar(pg)
    states = [g.closure([Item(AUGMENTED, 0)])]
    index = {states[0]: 0}
    shifts, gotos, reduces, accepting = [], [], [], set()
    k = 0
    while k < len(states):
        items = states[k]
        shift_groups: dict[tuple, list[Item]] = {}
        goto_groups: dict[str, list[Item]] = {}
        red = []
        for item in sorted(items, key=Item.sort_key):
            el = g.dotted(item)
            if el is None:
                if item.production == AUGMENTED:
                    accepting.add(k)
                elif item.production not in red:
                    red.append(item.production)
            elif el.label in g.nonterminals:
                goto_groups.setdefault(el.label, []).append(item)
            else:
                key = (el.label, g.fetch_conjunction(item))
                shift_groups.setdefault(key, []).append(item)

        def target(group):
            nxt = g.closure(Item(i.production, i.dot + 1) for i in group)
            if nxt not in index:
                index[nxt] = len(states)
                states.append(nxt)
            return index[nxt]

        shifts.append({key: target(group) for key, group in shift_groups.items()})
        gotos.append({label: target(group) for label, group in goto_groups.items()})
        reduces.append(tuple(sorted(red)))
        k += 1

    conflicts, resolutions = _conflicts(g, shifts, reduces)
    return ParseTable(pg, g.productions, states, shifts, gotos, reduces,
                      frozenset(accepting), conflicts, resolutions, g)


def _conflicts(g: _Grammar, shifts, reduces):
    conflicts, resolutions = [], []
    start = g.pg.start
    start_in_rhs = any(el.label == start for p in g.productions[1:] for el in p.elements)
    for n, (sh, red) in enumerate(zip(shifts, reduces)):
        names = [g.productions[q].name for q in red]
        if len(red) > 1:
            conflicts.append(Conflict(n, "reduce/reduce", tuple(f"reduce {x}" for x in names)))
        labels: dict[str, list] = {}
        for label, conj in sh:
            labels.setdefault(label, []).append(conj)
        for label, conjs in sorted(labels.items()):
            if len(conjs) > 1:
                conflicts.append(Conflict(n, "shift/shift", tuple(
                    f"shift {label} via [{format_conjunction(c)}]" for c in sorted(conjs, key=sorted))))
        if red and sh:
            actions = tuple(f"reduce {x}" for x in names) + tuple(
                f"shift {label} via [{format_conjunction(conj)}]"
                for label, conj in sorted(sh, key=lambda key: (key[0], sorted(key[1]))))
            # reducing to a non-recursive start symbol can only accept, which
            # needs every edge consumed, so a fetchable shift always wins
            provable = not start_in_rhs and all(g.productions[q].lhs == start for q in red)
            (resolutions if provable else conflicts).append(Conflict(n, "shift/reduce", actions))
    return conflicts, resolutions


# -- runtime -----------------------------------------------------------------


@dataclass
class DerivationTree:
    production: str
    lhs: str
    children: list  # DerivationTree or input edge id, in element order
    bindings: tuple[str, ...]

    def leaves(self) -> list[str]:
        out = []
        for c in self.children:
            out.extend(c.leaves() if isinstance(c, DerivationTree) else [c])
        return out

    def key(self) -> tuple:
        return (self.production, tuple(c.key() if isinstance(c, DerivationTree) else c
                                       for c in self.children))

    def canonical_key(self) -> tuple:
        """Key that identifies duplicated copies with their original production.

        Copies list their children in another order, so children are compared
        as a set (edge ids are unique, so no information is lost).
        """
        base = self.production.split("#", 1)[0]
        return (base, frozenset(c.canonical_key() if isinstance(c, DerivationTree) else c
                                for c in self.children))

    def format(self, indent: int = 0) -> str:
        pad = "  " * indent
        lines = [f"{pad}{self.production}: {self.lhs}({', '.join(self.bindings)})"]
        for c in self.children:
            if isinstance(c, DerivationTree):
                lines.append(c.format(indent + 1))
            else:
                lines.append(f"{pad}  {c}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {"production": self.production, "lhs": self.lhs, "bindings": list(self.bindings),
                "children": [c.to_json() if isinstance(c, DerivationTree) else c
                             for c in self.children]}


@dataclass
class _Instance:
    label: str
    nodes: tuple[str, ...]
    edges: frozenset
    tree: Union[DerivationTree, str]


@dataclass
class ParseResult:
    accepted: bool
    start_edge: Optional[str]
    tree: Optional[DerivationTree] = None
    diagnostic: str = ""
    shifts: int = 0
    reduces: int = 0
    fetch_ambiguity: bool = False
    trace: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"accepted": self.accepted, "start_edge": self.start_edge,
                "diagnostic": self.diagnostic, "shifts": self.shifts, "reduces": self.reduces,
                "fetch_ambiguity": self.fetch_ambiguity,
                "tree": self.tree.to_json() if self.tree else None}


def natural_key(text: str):
    return [int(t) if t.isdigit() else t for t in re.split(r"(\d+)", text)]


def admissible_starts(table: ParseTable, h: Hypergraph) -> list[str]:
    labels = {label for label, _ in table.shifts[0]}
    return sorted((e.id for e in h.edges if e.label in labels), key=natural_key)


class _Run:
    def __init__(self, table: ParseTable, h: Hypergraph, trace: bool):
        self.table = table
        self.g = table._index
        self.h = h
        self.edges = {e.id: e for e in h.edges}
        self.incident: dict[str, set[str]] = {v: set() for v in h.nodes}
        self.at: dict[tuple, list[str]] = {}
        self.by_label: dict[str, list[str]] = {}
        for e in h.edges:
            self.by_label.setdefault(e.label, []).append(e.id)
            for l, v in enumerate(e.att, start=1):
                self.incident.setdefault(v, set()).add(e.id)
                self.at.setdefault((v, e.label, l), []).append(e.id)
        self.stack: list[tuple[int, Optional[_Instance]]] = [(0, None)]
        self.consumed: set[str] = set()
        self.result = ParseResult(False, None)
        self.tracing = trace

    def log(self, line: str):
        if self.tracing:
            self.result.trace.append(line)

    def reject(self, message: str, ambiguous: bool = False) -> ParseResult:
        self.result.accepted = False
        self.result.diagnostic = message
        self.result.fetch_ambiguity = ambiguous
        self.log(f"reject: {message}")
        return self.result

    def shift(self, edge_id: str, nxt: int):
        e = self.edges[edge_id]
        self.consumed.add(edge_id)
        self.stack.append((nxt, _Instance(e.label, e.att, frozenset([edge_id]), edge_id)))
        self.result.shifts += 1
        self.log(f"shift {edge_id} ({e.label}) -> state {nxt}")

    def fetch(self, state: int) -> list[tuple[str, int, str]]:
        elements = [inst for _, inst in self.stack[1:]]
        t = len(elements)
        options = []
        for (label, conj), nxt in self.table.shifts[state].items():
            forward = sorted(c for c in conj if c.distance >= 0)
            if any(t - 1 - c.distance < 0 for c in forward):
                continue
            if forward:
                c0 = forward[0]
                node = elements[t - 1 - c0.distance].nodes[c0.source - 1]
                candidates = self.at.get((node, label, c0.target), ())
            else:
                candidates = self.by_label.get(label, ())
            for eid in candidates:
                if eid in self.consumed:
                    continue
                att = self.edges[eid].att
                if all((att[c.source - 1] if c.distance < 0
                        else elements[t - 1 - c.distance].nodes[c.source - 1]) == att[c.target - 1]
                       for c in conj):
                    options.append((eid, nxt, format_conjunction(conj)))
        seen, unique = set(), []
        for eid, nxt, text in options:
            if (eid, nxt) not in seen:
                seen.add((eid, nxt))
                unique.append((eid, nxt, text))
        return unique

    def verify(self, q: int, insts: list[_Instance]):
        p = self.g.productions[q]
        info = self.g.info[q]
        for i, c in p.connectors():
            j = c.source_index(i)
            if insts[j].nodes[c.source - 1] != insts[i].nodes[c.target - 1]:
                return None, (f"{p.name}: connector {format_conjunction([c])} on "
                              f"{p.elements[i].label} not satisfied")
        bound = []
        for cls in info.classes:
            nodes = {insts[i].nodes[k - 1] for i, k in cls}
            if len(nodes) != 1:
                return None, f"{p.name}: related interfaces bound to different nodes {sorted(nodes)}"
            bound.append(nodes.pop())
        owners: dict[str, list[int]] = {}
        for n, v in enumerate(bound):
            owners.setdefault(v, []).append(n)
        for v, cls in owners.items():
            if len(cls) > 1 and any(n not in info.external for n in cls):
                return None, f"{p.name}: internal node {v} fused with another node"
        covered = frozenset().union(*(inst.edges for inst in insts))
        for n, v in enumerate(bound):
            if n not in info.external and not self.incident[v] <= covered:
                outside = sorted(self.incident[v] - covered, key=natural_key)
                return None, f"{p.name}: internal node {v} also attached to {', '.join(outside)}"
        nodes = tuple(bound[info.class_of[x]] for x in p.external_map)
        tree = DerivationTree(p.name, p.lhs, [inst.tree for inst in insts], nodes)
        return _Instance(p.lhs, nodes, covered, tree), ""

    def reduce(self, state: int) -> Optional[ParseResult]:
        candidates = self.table.reduces[state]
        if not candidates:
            expected = ", ".join(f"{label} via [{format_conjunction(conj)}]"
                                 for label, conj in sorted(self.table.shifts[state], key=lambda k: (k[0], sorted(k[1]))))
            return self.reject(f"state {state}: no edge fetchable for {expected or 'nothing'}; "
                               f"no reduction available")
        done, failures = [], []
        for q in candidates:
            n = len(self.g.productions[q].elements)
            if n > len(self.stack) - 1:
                failures.append(f"{self.g.productions[q].name}: stack too short")
                continue
            inst, why = self.verify(q, [inst for _, inst in self.stack[-n:]])
            if inst is None:
                failures.append(why)
            else:
                done.append((q, n, inst))
        if not done:
            return self.reject(f"state {state}: reduction blocked: {'; '.join(failures)}")
        if len(done) > 1:
            names = ", ".join(self.g.productions[q].name for q, _, _ in done)
            return self.reject(f"state {state}: ambiguous reduction ({names})", ambiguous=True)
        q, n, inst = done[0]
        del self.stack[-n:]
        self.result.reduces += 1
        below = self.stack[-1][0]
        nxt = self.table.gotos[below].get(inst.label)
        self.log(f"reduce {self.g.productions[q].name} -> {inst.label}({', '.join(inst.nodes)})")
        if nxt is None:
            return self.reject(f"state {below}: no goto on {inst.label}")
        self.stack.append((nxt, inst))
        return None

    def run(self, start_edge: Optional[str]) -> ParseResult:
        terminals = self.table.grammar.terminals
        for e in self.h.edges:
            if e.label not in terminals:
                return self.reject(f"edge {e.id} has non-terminal or unknown label {e.label}")
        if not self.h.edges:
            return self.reject("empty input graph")
        starts = admissible_starts(self.table, self.h)
        if start_edge is None:
            if not starts:
                return self.reject("no edge label is shiftable in state 0")
            start_edge = starts[0]
        elif start_edge not in self.edges:
            return self.reject(f"start edge {start_edge} is not in the graph")
        elif start_edge not in starts:
            return self.reject(f"start edge {start_edge} is not shiftable in state 0")
        self.result.start_edge = start_edge
        label = self.edges[start_edge].label
        nxt = next(s for (lbl, _), s in self.table.shifts[0].items() if lbl == label)
        self.shift(start_edge, nxt)

        while True:
            state, top = self.stack[-1]
            if state in self.table.accepting and len(self.stack) == 2 \
                    and len(self.consumed) == len(self.edges):
                if len(set(top.nodes)) != len(top.nodes):
                    return self.reject(f"start nodes not distinct: {top.nodes}")
                self.result.accepted = True
                self.result.tree = top.tree
                self.log("accept")
                return self.result
            options = self.fetch(state)
            if len(options) > 1:
                listed = ", ".join(f"{eid} via [{text}]" for eid, _, text in options)
                return self.reject(f"state {state}: fetch ambiguity between {listed}", ambiguous=True)
            if options:
                self.shift(options[0][0], options[0][1])
                continue
            if state in self.table.accepting and len(self.stack) == 2 \
                    and not self.table.reduces[state]:
                left = sorted(set(self.edges) - self.consumed, key=natural_key)
                return self.reject(f"unconsumed edges remain: {', '.join(left)}")
            outcome = self.reduce(state)
            if outcome is not None:
                return outcome


def parse(table: ParseTable, h: Hypergraph, start_edge: Optional[str] = None,
          trace: bool = False) -> ParseResult:
    """Parse ``h`` bottom-up without backtracking, starting from ``start_edge``."""
    return _Run(table, h, trace).run(start_edge)


def min_rotation(seq: list) -> tuple:
    if not seq:
        return ()
    return min(tuple(seq[i:] + seq[:i]) for i in range(len(seq)))


@dataclass
class RecognitionReport:
    rows: list[ParseResult]
    admissible: list[str]

    @property
    def accepting(self) -> list[ParseResult]:
        return [r for r in self.rows if r.accepted]

    @property
    def distinct_trees(self) -> int:
        return len({r.tree.canonical_key() for r in self.accepting})

    @property
    def distinct_up_to_rotation(self) -> int:
        return len({min_rotation(r.tree.leaves()) for r in self.accepting})

    @property
    def fetch_ambiguities(self) -> int:
        return sum(r.fetch_ambiguity for r in self.rows)

    @property
    def unambiguous(self) -> bool:
        return self.fetch_ambiguities == 0 and self.distinct_up_to_rotation <= 1

    def to_json(self) -> dict:
        return {
            "admissible_starts": self.admissible,
            "accepting_starts": [r.start_edge for r in self.accepting],
            "distinct_trees": self.distinct_trees,
            "distinct_trees_up_to_rotation": self.distinct_up_to_rotation,
            "fetch_ambiguities": self.fetch_ambiguities,
            "unambiguous": self.unambiguous,
            "runs": [r.to_json() for r in self.rows],
        }


def recognition_ambiguity(table: ParseTable, h: Hypergraph) -> RecognitionReport:
    """Parse from every admissible start edge and compare the outcomes."""
    starts = admissible_starts(table, h)
    return RecognitionReport([parse(table, h, s) for s in starts], starts)
