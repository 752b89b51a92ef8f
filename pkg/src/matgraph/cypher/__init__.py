from .ast import (
    IN,
    MAX_HOPS,
    OUT,
    Comparison,
    CountAgg,
    CreateClause,
    EdgePattern,
    Literal,
    MatchClause,
    NodePattern,
    PatternPath,
    PropertyAccess,
    Query,
    ReturnClause,
    Variable,
    expr_text,
    to_data,
)
from .errors import (
    CypherError,
    CypherSemanticError,
    CypherSyntaxError,
    PlanError,
    UnboundVariableError,
)
from .lexer import Token, tokenize
from .parser import parse
from .printer import pretty_print

__all__ = [
    "IN",
    "MAX_HOPS",
    "OUT",
    "Comparison",
    "CountAgg",
    "CreateClause",
    "CypherError",
    "CypherSemanticError",
    "CypherSyntaxError",
    "EdgePattern",
    "Literal",
    "MatchClause",
    "NodePattern",
    "PatternPath",
    "PlanError",
    "PropertyAccess",
    "Query",
    "ReturnClause",
    "Token",
    "UnboundVariableError",
    "Variable",
    "expr_text",
    "parse",
    "pretty_print",
    "to_data",
    "tokenize",
]
