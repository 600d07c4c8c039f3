from .nodes import (
    AnonValue,
    App,
    Arith,
    BoolLit,
    BoolOp,
    Cmp,
    FALSE,
    IntLit,
    Predicate,
    This,
    TRUE,
    Unary,
    Var,
    conj,
    free_vars,
    substitute,
    to_source,
)
from .parser import (
    NonLinearTerm,
    PredicateError,
    PredicateSyntaxError,
    UnsupportedOperator,
    parse_predicate,
)
from .aliases import AliasError, AliasTable, expand_aliases, parse_alias_decl

__all__ = [
    "AliasError",
    "AliasTable",
    "AnonValue",
    "App",
    "Arith",
    "BoolLit",
    "BoolOp",
    "Cmp",
    "FALSE",
    "IntLit",
    "NonLinearTerm",
    "Predicate",
    "PredicateError",
    "PredicateSyntaxError",
    "This",
    "TRUE",
    "Unary",
    "UnsupportedOperator",
    "Var",
    "conj",
    "expand_aliases",
    "free_vars",
    "parse_alias_decl",
    "parse_predicate",
    "substitute",
    "to_source",
]
