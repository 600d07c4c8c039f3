"""Recursive-descent parser for refinement predicates.

Grammar (tightest binding last):

    pred    := and ('||' and)*
    and     := cmp ('&&' cmp)*
    cmp     := add (('==' | '!=' | '<' | '<=' | '>' | '>=') add)?
    add     := mul (('+' | '-') mul)*
    mul     := unary ('*' unary)*
    unary   := ('!' | '-') unary | atom
    atom    := INT | 'true' | 'false' | '_' | 'this'
             | IDENT | IDENT '(' arg (',' arg)* ')' | '(' pred ')'
    arg     := IDENT | 'this' | '_'

Multiplication requires at least one integer-literal operand so every
predicate stays inside linear integer arithmetic; `/` and `%` are
rejected outright.  Spans on errors and nodes are relative to the
payload string (the frontend re-bases them into the enclosing file).
"""

from __future__ import annotations

import re

from ..spans import Span
from .nodes import (
    AnonValue,
    App,
    Arith,
    BoolLit,
    BoolOp,
    Cmp,
    IntLit,
    Predicate,
    This,
    Unary,
    Var,
)


class PredicateError(Exception):
    """Base for refinement-language errors; carries an in-payload span."""

    def __init__(self, message: str, span: Span):
        super().__init__(message)
        self.message = message
        self.span = span


class PredicateSyntaxError(PredicateError):
    pass


class NonLinearTerm(PredicateError):
    pass


class UnsupportedOperator(PredicateError):
    pass


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<ident>[A-Za-z_$][A-Za-z0-9_$]*)"
    r"|(?P<op>&&|\|\||==|!=|<=|>=|[!<>+\-*(),]|/|%))"
)


def _tokenize(text: str) -> list[tuple[str, str, Span]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos and not m.group(0):
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            bad = len(text) - len(stripped)
            raise PredicateSyntaxError(
                f"unexpected character {text[bad]!r}", Span(bad, bad + 1)
            )
        if m.lastgroup is None:
            break
        kind = m.lastgroup
        tok = m.group(kind)
        span = Span(m.end() - len(tok), m.end())
        if kind == "op" and tok in ("/", "%"):
            raise UnsupportedOperator(
                f"operator {tok!r} is not allowed in refinements", span
            )
        tokens.append((kind, tok, span))
        pos = m.end()
    if text[pos:].strip():
        bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
        raise PredicateSyntaxError(
            f"unexpected character {text[bad]!r}", Span(bad, bad + 1)
        )
    tokens.append(("eof", "", Span(len(text), len(text))))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        if tok[0] != "eof":
            self.pos += 1
        return tok

    def expect_op(self, op: str) -> Span:
        kind, tok, span = self.peek()
        if kind != "op" or tok != op:
            raise PredicateSyntaxError(f"expected {op!r}", span)
        self.advance()
        return span

    def at_op(self, *ops: str) -> bool:
        kind, tok, _ = self.peek()
        return kind == "op" and tok in ops

    def parse(self) -> Predicate:
        p = self.or_expr()
        kind, tok, span = self.peek()
        if kind != "eof":
            raise PredicateSyntaxError(f"unexpected {tok!r}", span)
        return p

    def or_expr(self) -> Predicate:
        left = self.and_expr()
        while self.at_op("||"):
            self.advance()
            right = self.and_expr()
            left = BoolOp("||", left, right, left.span.cover(right.span))
        return left

    def and_expr(self) -> Predicate:
        left = self.cmp_expr()
        while self.at_op("&&"):
            self.advance()
            right = self.cmp_expr()
            left = BoolOp("&&", left, right, left.span.cover(right.span))
        return left

    def cmp_expr(self) -> Predicate:
        left = self.add_expr()
        if self.at_op("==", "!=", "<", "<=", ">", ">="):
            _, op, _ = self.advance()
            right = self.add_expr()
            return Cmp(op, left, right, left.span.cover(right.span))
        return left

    def add_expr(self) -> Predicate:
        left = self.mul_expr()
        while self.at_op("+", "-"):
            _, op, _ = self.advance()
            right = self.mul_expr()
            left = Arith(op, left, right, left.span.cover(right.span))
        return left

    def mul_expr(self) -> Predicate:
        left = self.unary_expr()
        while self.at_op("*"):
            _, _, opspan = self.advance()
            right = self.unary_expr()
            if not (_is_literal(left) or _is_literal(right)):
                raise NonLinearTerm(
                    "multiplication needs an integer-literal operand", opspan
                )
            left = Arith("*", left, right, left.span.cover(right.span))
        return left

    def unary_expr(self) -> Predicate:
        if self.at_op("!", "-"):
            _, op, opspan = self.advance()
            operand = self.unary_expr()
            return Unary(op, operand, opspan.cover(operand.span))
        return self.atom()

    def atom(self) -> Predicate:
        kind, tok, span = self.peek()
        if kind == "int":
            self.advance()
            return IntLit(int(tok), span)
        if kind == "ident":
            self.advance()
            if tok == "true":
                return BoolLit(True, span)
            if tok == "false":
                return BoolLit(False, span)
            if self.at_op("("):
                return self.application(tok, span)
            if tok == "_":
                return AnonValue(span)
            if tok == "this":
                return This(span)
            return Var(tok, span)
        if kind == "op" and tok == "(":
            self.advance()
            inner = self.or_expr()
            self.expect_op(")")
            return inner
        raise PredicateSyntaxError(
            "expected a value, name, or parenthesized predicate", span
        )

    def application(self, name: str, name_span: Span) -> Predicate:
        self.expect_op("(")
        args: list[Predicate] = []
        while True:
            args.append(self.app_arg())
            if self.at_op(","):
                self.advance()
                continue
            break
        close = self.expect_op(")")
        return App(name, tuple(args), name_span.cover(close))

    def app_arg(self) -> Predicate:
        # Names, `this`, `_`, or (negated) integer literals; state atoms
        # are narrowed to `this` later by the protocol layer.
        kind, tok, span = self.peek()
        if kind == "ident" and tok not in ("true", "false"):
            self.advance()
            if tok == "this":
                return This(span)
            if tok == "_":
                return AnonValue(span)
            return Var(tok, span)
        if kind == "int":
            self.advance()
            return IntLit(int(tok), span)
        if kind == "op" and tok == "-":
            self.advance()
            inner = self.app_arg()
            if not isinstance(inner, IntLit):
                raise PredicateSyntaxError("expected an integer literal", span)
            return Unary("-", inner, span.cover(inner.span))
        raise PredicateSyntaxError(
            "predicate arguments must be names, 'this', or integer literals", span
        )


def _is_literal(p: Predicate) -> bool:
    if isinstance(p, IntLit):
        return True
    return isinstance(p, Unary) and p.op == "-" and _is_literal(p.operand)


def parse_predicate(text: str) -> Predicate:
    """Parse a refinement payload; spans are relative to `text`."""
    return _Parser(text).parse()
