"""Predicate aliases: named, parameterized predicate abbreviations.

Declared at class level as `@RefinementAlias("Name(params) -> body")`
and expanded away before any solving; only state atoms survive
expansion.  Alias tables are validated eagerly (arity, undefined
names, cycles) so expansion itself is total.
"""

from __future__ import annotations

import re

from ..spans import Span
from .nodes import App, Predicate, substitute
from .parser import PredicateSyntaxError, parse_predicate


class AliasError(Exception):
    def __init__(self, message: str, span: Span = Span(0, 0)):
        super().__init__(message)
        self.message = message
        self.span = span


_HEAD_RE = re.compile(
    r"^\s*(?P<name>[A-Za-z_][A-Za-z0-9_]*)\s*\(\s*"
    r"(?P<params>[A-Za-z_][A-Za-z0-9_]*(?:\s*,\s*[A-Za-z_][A-Za-z0-9_]*)*)?\s*\)\s*->"
)


def parse_alias_decl(payload: str) -> tuple[str, list[str], Predicate]:
    """Parse `Name(x, y) -> body` into (name, params, body predicate)."""
    m = _HEAD_RE.match(payload)
    if not m:
        raise AliasError(
            "alias must have the form Name(params) -> predicate",
            Span(0, len(payload)),
        )
    name = m.group("name")
    params = [p.strip() for p in m.group("params").split(",")] if m.group("params") else []
    if len(set(params)) != len(params):
        raise AliasError(f"duplicate parameter in alias {name}", Span(0, m.end()))
    body_text = payload[m.end():]
    try:
        body = parse_predicate(body_text)
    except PredicateSyntaxError as e:
        raise AliasError(
            f"bad alias body: {e.message}",
            Span(e.span.start + m.end(), e.span.end + m.end()),
        ) from e
    return name, params, body


class AliasTable:
    """Immutable-after-build map from alias name to (params, body)."""

    def __init__(self):
        self._defs: dict[str, tuple[list[str], Predicate]] = {}

    def define(self, name: str, params: list[str], body: Predicate) -> None:
        if name in self._defs:
            raise AliasError(f"alias {name} defined twice")
        self._defs[name] = (params, body)

    def __contains__(self, name: str) -> bool:
        return name in self._defs

    def lookup(self, name: str) -> tuple[list[str], Predicate]:
        return self._defs[name]

    def names(self) -> list[str]:
        return list(self._defs)

    def validate(self, state_predicates: frozenset[str] = frozenset()) -> None:
        """Reject recursive aliases and bodies naming undefined predicates."""
        for name in self._defs:
            self._check_acyclic(name, [], state_predicates)

    def _check_acyclic(self, name, stack, state_predicates):
        if name in stack:
            cycle = " -> ".join(stack + [name])
            raise AliasError(f"recursive alias: {cycle}")
        _, body = self._defs[name]
        for ref in _app_names(body):
            if ref in self._defs:
                self._check_acyclic(ref, stack + [name], state_predicates)
            elif ref not in state_predicates:
                raise AliasError(f"alias {name} uses undefined predicate {ref}")


def _app_names(p: Predicate) -> set[str]:
    out = set()
    stack = [p]
    while stack:
        n = stack.pop()
        if isinstance(n, App):
            out.add(n.name)
            stack.extend(n.args)
        else:
            for attr in ("operand", "left", "right"):
                child = getattr(n, attr, None)
                if child is not None:
                    stack.append(child)
    return out


def expand_aliases(
    p: Predicate,
    table: AliasTable,
    state_predicates: frozenset[str] = frozenset(),
) -> Predicate:
    """Replace alias applications by their bodies, leaving state atoms.

    Raises AliasError for applications that are neither a declared
    alias nor a known state predicate, and for arity mismatches.
    Idempotent on its own output.
    """
    from .nodes import Arith, BoolOp, Cmp, Unary

    def walk(n: Predicate) -> Predicate:
        if isinstance(n, App):
            if n.name in table:
                params, body = table.lookup(n.name)
                if len(params) != len(n.args):
                    raise AliasError(
                        f"alias {n.name} expects {len(params)} argument(s), "
                        f"got {len(n.args)}",
                        n.span,
                    )
                # Arguments are Var/This, so this cannot capture; the
                # body may itself use (acyclic) aliases.
                return walk(substitute(body, dict(zip(params, n.args))))
            if n.name in state_predicates:
                return n
            raise AliasError(f"unknown predicate alias {n.name}", n.span)
        if isinstance(n, Unary):
            return Unary(n.op, walk(n.operand), n.span)
        if isinstance(n, Arith):
            return Arith(n.op, walk(n.left), walk(n.right), n.span)
        if isinstance(n, Cmp):
            return Cmp(n.op, walk(n.left), walk(n.right), n.span)
        if isinstance(n, BoolOp):
            return BoolOp(n.op, walk(n.left), walk(n.right), n.span)
        return n

    return walk(p)
