"""Decide whether partial homology relations are explained by an event-labeled gene tree."""

from .cotree import Cotree, Inner, Leaf, canonicalize, parse_cotree, relations_from_cotree, serialize_cotree
from .dicograph import digraph_of_relations, format_digraph, is_dicograph, parse_digraph, relations_of_digraph
from .digraph import CycleDetected, DiGraph
from .relations import (
    ForbiddenSet,
    Instance,
    ParseError,
    PartialHomologySet,
    RelationSet,
    format_relations,
    induced,
    is_full,
    parse_relations,
    validate,
)
from .satisfiability import (
    DEFAULT_ORDER,
    UNSAT_MESSAGE,
    InvariantError,
    RuleOrder,
    SatOutcome,
    build_cotree,
    extend_to_full,
    is_satisfiable,
)

__version__ = "0.1.0"

__all__ = [
    "Cotree",
    "Inner",
    "Leaf",
    "canonicalize",
    "parse_cotree",
    "relations_from_cotree",
    "serialize_cotree",
    "digraph_of_relations",
    "format_digraph",
    "is_dicograph",
    "parse_digraph",
    "relations_of_digraph",
    "CycleDetected",
    "DiGraph",
    "ForbiddenSet",
    "Instance",
    "ParseError",
    "PartialHomologySet",
    "RelationSet",
    "format_relations",
    "induced",
    "is_full",
    "parse_relations",
    "validate",
    "DEFAULT_ORDER",
    "UNSAT_MESSAGE",
    "InvariantError",
    "RuleOrder",
    "SatOutcome",
    "build_cotree",
    "extend_to_full",
    "is_satisfiable",
]
