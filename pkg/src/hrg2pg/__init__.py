"""Translate hyperedge replacement grammars into positional grammars and parse
hypergraphs with pLR tables built from them."""

__version__ = "0.1.0"

from .grammar import Hrg, Production, derive_step, enumerate_graphs, generation_ambiguity, validate_grammar
from .hypergraph import Edge, Hypergraph, is_connected, isomorphic, type_of, validate
from .plr import build_table, closure, parse, recognition_ambiguity
from .positional import (
    Connector,
    check_relation_axioms,
    realize,
    translate_graph,
    translate_grammar,
    translate_production,
)
from .transform import is_well_formed, normalize, simple_permute

__all__ = [
    "Connector", "Edge", "Hrg", "Hypergraph", "Production",
    "build_table", "check_relation_axioms", "closure", "derive_step", "enumerate_graphs",
    "generation_ambiguity", "is_connected", "is_well_formed", "isomorphic", "normalize",
    "parse", "realize", "recognition_ambiguity", "simple_permute", "translate_graph",
    "translate_grammar", "translate_production", "type_of", "validate", "validate_grammar",
]
