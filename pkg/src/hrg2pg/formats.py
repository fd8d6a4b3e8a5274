"""Line-oriented text formats for graphs (``.hg``) and grammars (``.hrg``).

Graph files::

    graph H
    edge e1 a (nL, nT)
    edge e2 a (nT, nR)
    ext (nL)

Grammar files::

    grammar cycle
    start S
    nonterminal S/1 entering 1
    nonterminal C/2 entering 1
    terminal a/2 b/2
    prod P2: C -> C(u,m) a(m,v) ext(u,v)

The rhs listing order is the mark order. ``#`` starts a comment when it
begins a line or follows whitespace, so derived names such as ``P2#2`` are
legal identifiers.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Union

from .errors import FormatError
from .grammar import Hrg, Production
from .hypergraph import Edge, Hypergraph

_NAME = r"[A-Za-z0-9_'.#-]+"
_EDGE_LINE = re.compile(rf"^edge\s+({_NAME})\s+({_NAME})\s*\(([^)]*)\)$")
_EXT_LINE = re.compile(r"^ext\s*\(([^)]*)\)$")
_LABEL_DECL = re.compile(rf"^({_NAME})/(\d+)$")
_PROD_LINE = re.compile(rf"^prod\s+({_NAME})\s*:\s*({_NAME})\s*->\s*(.*)$")
_RHS_TOKEN = re.compile(rf"({_NAME})\s*\(([^)]*)\)")


def _strip_comment(line: str) -> str:
    m = re.search(r"(^|\s)#", line)
    return (line[: m.start()] if m else line).strip()


def _node_list(text: str) -> tuple[str, ...]:
    text = text.strip()
    if not text:
        return ()
    return tuple(part.strip() for part in text.split(","))


def _lines(text: str):
    for number, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if line:
            yield number, line


# -- graphs -----------------------------------------------------------------


def parse_graph(text: str, source: str = None) -> Hypergraph:
    name = ""
    edges: list[Edge] = []
    ext: tuple[str, ...] = ()
    for number, line in _lines(text):
        keyword = line.split(None, 1)[0]
        if keyword == "graph":
            parts = line.split()
            if len(parts) != 2:
                raise FormatError("expected 'graph <name>'", number, source)
            name = parts[1]
        elif keyword == "edge":
            m = _EDGE_LINE.match(line)
            if not m:
                raise FormatError("expected 'edge <id> <label> (<node>, ...)'", number, source)
            nodes = _node_list(m.group(3))
            if any(not v for v in nodes):
                raise FormatError("empty node name", number, source)
            edges.append(Edge(m.group(1), m.group(2), nodes))
        elif keyword.startswith("ext"):
            m = _EXT_LINE.match(line)
            if not m:
                raise FormatError("expected 'ext (<node>, ...)'", number, source)
            ext = _node_list(m.group(1))
        else:
            raise FormatError(f"unknown keyword {keyword!r}", number, source)
    return Hypergraph(tuple(edges), ext, name=name)


def format_graph(h: Hypergraph) -> str:
    lines = [f"graph {h.name or 'G'}"]
    for e in h.edges:
        lines.append(f"edge {e.id} {e.label} ({', '.join(e.att)})")
    if h.ext:
        lines.append(f"ext ({', '.join(h.ext)})")
    return "\n".join(lines) + "\n"


# -- grammars ---------------------------------------------------------------


def rhs_edge_ids(labels) -> list[str]:
    """Production-local edge ids ``<label>.<occurrence>``."""
    seen: dict[str, int] = {}
    ids = []
    for label in labels:
        seen[label] = seen.get(label, 0) + 1
        ids.append(f"{label}.{seen[label]}")
    return ids


def _parse_rhs(text: str, number: int, source) -> Hypergraph:
    pos = 0
    items = []
    text = text.strip()
    for m in _RHS_TOKEN.finditer(text):
        if text[pos:m.start()].strip():
            raise FormatError(f"unexpected text {text[pos:m.start()].strip()!r} in rhs", number, source)
        items.append((m.group(1), _node_list(m.group(2))))
        pos = m.end()
    if text[pos:].strip():
        raise FormatError(f"unexpected text {text[pos:].strip()!r} in rhs", number, source)
    ext: tuple[str, ...] = ()
    edges = []
    for k, (label, nodes) in enumerate(items):
        if label == "ext":
            if k != len(items) - 1:
                raise FormatError("ext(...) must close the rhs", number, source)
            ext = nodes
        else:
            edges.append((label, nodes))
    ids = rhs_edge_ids(label for label, _ in edges)
    return Hypergraph(tuple(Edge(i, label, nodes) for i, (label, nodes) in zip(ids, edges)), ext)


def parse_grammar(text: str, source: str = None) -> Hrg:
    name = ""
    start = None
    nonterminals: dict[str, int] = {}
    terminals: dict[str, int] = {}
    entering: dict[str, frozenset[int]] = {}
    productions: list[Production] = []
    notes: list[str] = []
    for number, line in _lines(text):
        keyword, _, rest = line.partition(" ")
        rest = rest.strip()
        if keyword == "grammar":
            name = rest
        elif keyword == "start":
            if not rest or " " in rest:
                raise FormatError("expected 'start <NT>'", number, source)
            start = rest
        elif keyword == "note":
            notes.append(rest)
        elif keyword == "nonterminal":
            parts = rest.split(None, 2)
            m = _LABEL_DECL.match(parts[0]) if parts else None
            if not m:
                raise FormatError("expected 'nonterminal <name>/<arity> [entering i,...]'", number, source)
            label, arity = m.group(1), int(m.group(2))
            nonterminals[label] = arity
            if len(parts) > 1:
                if parts[1] != "entering" or len(parts) < 3:
                    raise FormatError("expected 'entering i,j,...'", number, source)
                try:
                    entering[label] = frozenset(int(i) for i in parts[2].replace(" ", "").split(","))
                except ValueError:
                    raise FormatError("entering interfaces must be integers", number, source) from None
        elif keyword == "terminal":
            decls = rest.split()
            if not decls:
                raise FormatError("expected 'terminal <name>/<arity> ...'", number, source)
            for decl in decls:
                m = _LABEL_DECL.match(decl)
                if not m:
                    raise FormatError(f"bad label declaration {decl!r}", number, source)
                terminals[m.group(1)] = int(m.group(2))
        elif keyword == "prod":
            m = _PROD_LINE.match(line)
            if not m:
                raise FormatError("expected 'prod <name>: <NT> -> <label>(...) ... ext(...)'",
                                  number, source)
            productions.append(Production(m.group(1), m.group(2), _parse_rhs(m.group(3), number, source)))
        else:
            raise FormatError(f"unknown keyword {keyword!r}", number, source)
    if start is None:
        raise FormatError("missing 'start' declaration", None, source)
    return Hrg(name, nonterminals, terminals, tuple(productions), start, entering, tuple(notes))


def format_production(p: Production) -> str:
    rhs = " ".join(f"{e.label}({','.join(e.att)})" for e in p.rhs.edges)
    return f"prod {p.name}: {p.lhs} -> {rhs} ext({','.join(p.rhs.ext)})"


def format_grammar(g: Hrg) -> str:
    lines = [f"grammar {g.name or 'G'}"]
    lines += [f"note {n}" for n in g.notes]
    lines.append(f"start {g.start}")
    for x, arity in g.nonterminals.items():
        ent = ",".join(str(i) for i in sorted(g.entering[x]))
        lines.append(f"nonterminal {x}/{arity} entering {ent}")
    if g.terminals:
        lines.append("terminal " + " ".join(f"{t}/{a}" for t, a in g.terminals.items()))
    lines += [format_production(p) for p in g.productions]
    return "\n".join(lines) + "\n"


def read_file(path: Union[str, Path]) -> Union[Hrg, Hypergraph]:
    """Read a grammar or graph file, dispatching on its first keyword."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    for _, line in _lines(text):
        if line.split(None, 1)[0] == "graph":
            return parse_graph(text, str(path))
        break
    return parse_grammar(text, str(path))
