"""SMT-LIB2 scripts for cross-checking verification conditions.

The emitted script mirrors the predicate structure (no internal
rewrites), asserts the hypothesis and the negated goal in QF_LIA, and
ends with (check-sat): an external solver answering `unsat` agrees
with a Valid verdict from the built-in engine.
"""

from __future__ import annotations

from ..predicates import (
    AnonValue,
    Arith,
    BoolLit,
    BoolOp,
    Cmp,
    IntLit,
    Predicate,
    This,
    Unary,
    Var,
    free_vars,
)
from .core import BOOL, _Unsupported, infer_sorts

_OPS = {"&&": "and", "||": "or", "+": "+", "-": "-", "*": "*",
        "<": "<", "<=": "<=", ">": ">", ">=": ">="}


def _symbol(name: str) -> str:
    # `_` is reserved in SMT-LIB; `$` is not a simple-symbol character.
    if name == "_" or "$" in name:
        return f"|{name}|"
    return name


def _sexp(p: Predicate) -> str:
    if isinstance(p, BoolLit):
        return "true" if p.value else "false"
    if isinstance(p, IntLit):
        return str(p.value) if p.value >= 0 else f"(- {-p.value})"
    if isinstance(p, Var):
        return _symbol(p.name)
    if isinstance(p, AnonValue):
        return _symbol("_")
    if isinstance(p, This):
        return "this"
    if isinstance(p, Unary):
        op = "not" if p.op == "!" else "-"
        return f"({op} {_sexp(p.operand)})"
    if isinstance(p, Cmp):
        if p.op == "==":
            return f"(= {_sexp(p.left)} {_sexp(p.right)})"
        if p.op == "!=":
            return f"(not (= {_sexp(p.left)} {_sexp(p.right)}))"
        return f"({_OPS[p.op]} {_sexp(p.left)} {_sexp(p.right)})"
    if isinstance(p, (Arith, BoolOp)):
        return f"({_OPS[p.op]} {_sexp(p.left)} {_sexp(p.right)})"
    raise ValueError(f"cannot export {type(p).__name__}")


def export_smtlib(hypothesis: Predicate, goal: Predicate) -> str:
    try:
        sorts = infer_sorts([hypothesis, goal])
    except _Unsupported:
        sorts = {}
    names = sorted(free_vars(hypothesis) | free_vars(goal))
    lines = ["(set-logic QF_LIA)"]
    for name in names:
        sort = "Bool" if sorts.get(name) == BOOL else "Int"
        lines.append(f"(declare-const {_symbol(name)} {sort})")
    lines.append(f"(assert {_sexp(hypothesis)})")
    lines.append(f"(assert (not {_sexp(goal)}))")
    lines.append("(check-sat)")
    return "\n".join(lines) + "\n"
