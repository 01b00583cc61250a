"""Text formats for graphs (.mcg), programs (.mcp) and queries (.mcq)."""

from .jsonio import (
    graph_from_json,
    graph_to_json,
    interpretation_from_json,
    interpretation_to_json,
    interval_to_json,
    program_from_json,
    program_to_json,
)
from .lexer import Token, tokenize
from .parser import (
    ConsistencyQuery,
    EntailsQuery,
    GraphDocument,
    Query,
    TightQuery,
    load_model,
    parse_graph,
    parse_program,
    parse_queries,
)
from .serialize import (
    serialize_atom,
    serialize_formula,
    serialize_graph,
    serialize_interval,
    serialize_program,
)

__all__ = [
    "ConsistencyQuery",
    "EntailsQuery",
    "GraphDocument",
    "Query",
    "TightQuery",
    "Token",
    "graph_from_json",
    "graph_to_json",
    "interpretation_from_json",
    "interpretation_to_json",
    "interval_to_json",
    "load_model",
    "parse_graph",
    "parse_program",
    "parse_queries",
    "program_from_json",
    "program_to_json",
    "serialize_atom",
    "serialize_formula",
    "serialize_graph",
    "serialize_interval",
    "serialize_program",
    "tokenize",
]
