"""AST of the refinement predicate language.

The language is the quantifier-free boolean / linear-integer fragment:
comparisons over `+`, `-` and literal-scaled `*`, combined with `&&`,
`||`, `!`.  Two distinguished names exist: `_` (the refined
declaration's own value) and `this` (the receiver in state predicates).
Predicate applications (`connected(this)`, `Positive(x)`) are either
state atoms or aliases; after alias expansion only state atoms remain.

Nodes are immutable and compare structurally (spans are ignored by
`==`), so predicates can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from ..spans import NO_SPAN, Span


class Predicate:
    """Base class for all predicate nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class BoolLit(Predicate):
    value: bool
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class IntLit(Predicate):
    value: int
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class Var(Predicate):
    name: str
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class AnonValue(Predicate):
    """The anonymous value variable `_`."""

    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class This(Predicate):
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class Unary(Predicate):
    op: str  # "!" or "-"
    operand: Predicate
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class Arith(Predicate):
    op: str  # "+", "-", "*"
    left: Predicate
    right: Predicate
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class Cmp(Predicate):
    op: str  # "==", "!=", "<", "<=", ">", ">="
    left: Predicate
    right: Predicate
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class BoolOp(Predicate):
    op: str  # "&&" or "||"
    left: Predicate
    right: Predicate
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class App(Predicate):
    """Application of a named predicate to Var/This arguments."""

    name: str
    args: tuple[Predicate, ...]
    span: Span = field(default=NO_SPAN, compare=False)


TRUE = BoolLit(True)
FALSE = BoolLit(False)


def conj(parts: Iterable[Predicate]) -> Predicate:
    """Left-associated conjunction; empty input yields `true`."""
    out: Predicate | None = None
    for p in parts:
        if isinstance(p, BoolLit) and p.value:
            continue
        out = p if out is None else BoolOp("&&", out, p)
    return out if out is not None else TRUE


def _name_of(p: Predicate) -> str | None:
    if isinstance(p, Var):
        return p.name
    if isinstance(p, AnonValue):
        return "_"
    if isinstance(p, This):
        return "this"
    return None


def free_vars(p: Predicate) -> set[str]:
    """All identifiers occurring in p, with `_` and `this` included by name."""
    out: set[str] = set()
    stack = [p]
    while stack:
        n = stack.pop()
        name = _name_of(n)
        if name is not None:
            out.add(name)
        elif isinstance(n, Unary):
            stack.append(n.operand)
        elif isinstance(n, (Arith, Cmp, BoolOp)):
            stack.append(n.left)
            stack.append(n.right)
        elif isinstance(n, App):
            stack.extend(n.args)
    return out


def substitute(p: Predicate, bindings: Mapping[str, Predicate]) -> Predicate:
    """Capture-free simultaneous substitution of names by terms.

    `_` and `this` are substitutable under their spelled names.  The
    language has no binders, so simultaneous replacement is enough.
    """
    if not bindings:
        return p

    def go(n: Predicate) -> Predicate:
        name = _name_of(n)
        if name is not None:
            return bindings.get(name, n)
        if isinstance(n, Unary):
            return Unary(n.op, go(n.operand), n.span)
        if isinstance(n, Arith):
            return Arith(n.op, go(n.left), go(n.right), n.span)
        if isinstance(n, Cmp):
            return Cmp(n.op, go(n.left), go(n.right), n.span)
        if isinstance(n, BoolOp):
            return BoolOp(n.op, go(n.left), go(n.right), n.span)
        if isinstance(n, App):
            return App(n.name, tuple(go(a) for a in n.args), n.span)
        return n

    return go(p)


# Printing precedence, loosest to tightest.
_PREC_OR = 1
_PREC_AND = 2
_PREC_CMP = 3
_PREC_ADD = 4
_PREC_MUL = 5
_PREC_UNARY = 6
_PREC_ATOM = 7


def _prec(p: Predicate) -> int:
    if isinstance(p, BoolOp):
        return _PREC_OR if p.op == "||" else _PREC_AND
    if isinstance(p, Cmp):
        return _PREC_CMP
    if isinstance(p, Arith):
        return _PREC_ADD if p.op in ("+", "-") else _PREC_MUL
    if isinstance(p, Unary):
        return _PREC_UNARY
    return _PREC_ATOM


def to_source(p: Predicate) -> str:
    """Canonical printing with minimal parentheses.

    Reparsing the output reconstructs the same tree: right operands of
    equal precedence are parenthesized, so associativity is preserved
    structurally, not just semantically.
    """
    me = _prec(p)
    if isinstance(p, BoolLit):
        return "true" if p.value else "false"
    if isinstance(p, IntLit):
        return str(p.value)
    if isinstance(p, Var):
        return p.name
    if isinstance(p, AnonValue):
        return "_"
    if isinstance(p, This):
        return "this"
    if isinstance(p, Unary):
        inner = to_source(p.operand)
        if _prec(p.operand) < _PREC_ATOM:
            inner = f"({inner})"
        return p.op + inner
    if isinstance(p, App):
        return f"{p.name}({', '.join(to_source(a) for a in p.args)})"
    if isinstance(p, (Arith, Cmp, BoolOp)):
        lhs = to_source(p.left)
        if _prec(p.left) < me or (isinstance(p, Cmp) and _prec(p.left) == me):
            lhs = f"({lhs})"
        rhs = to_source(p.right)
        if _prec(p.right) <= me:
            rhs = f"({rhs})"
        return f"{lhs} {p.op} {rhs}"
    raise TypeError(f"not a predicate node: {p!r}")
