"""Parsing of refinement annotations into checked, alias-free types.

Bridges the raw annotation payloads captured by the frontend and the
predicate layer: every `@Refinement` payload is parsed, alias-expanded
against its compilation unit's alias table, normalized over `_`, and
validated for scope.  Bad payloads become Annotation diagnostics that
point inside the original string literal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .diagnostics import ANNOTATION, Diagnostic
from .frontend import ast
from .frontend.typecheck import ClassInfo, ProgramInfo
from .predicates import (
    AliasError,
    AliasTable,
    AnonValue,
    App,
    Predicate,
    PredicateError,
    expand_aliases,
    free_vars,
    parse_alias_decl,
    parse_predicate,
    substitute,
)
from .spans import Span
from .typing_core import RefinedType


@dataclass
class MethodContract:
    param_names: list[str]
    param_refts: dict[str, RefinedType]
    return_reft: Optional[RefinedType]


@dataclass
class AnnotationIndex:
    aliases: dict[str, AliasTable] = field(default_factory=dict)
    contracts: dict[tuple[str, str], MethodContract] = field(default_factory=dict)
    field_refts: dict[tuple[str, str], RefinedType] = field(default_factory=dict)
    local_refts: dict[int, RefinedType] = field(default_factory=dict)
    diagnostics: list[Diagnostic] = field(default_factory=list)

    def contract(self, class_name: str, method_name: str) -> Optional[MethodContract]:
        return self.contracts.get((class_name, method_name))

    def field_refinement(self, class_name: str, field_name: str) -> Optional[RefinedType]:
        return self.field_refts.get((class_name, field_name))

    def local_refinement(self, decl: ast.LocalDecl) -> Optional[RefinedType]:
        return self.local_refts.get(id(decl))


CONSTRUCTOR = "<init>"


def build_annotation_index(info: ProgramInfo, state_names: frozenset[str]) -> AnnotationIndex:
    index = AnnotationIndex()
    _collect_aliases(info, state_names, index)
    for cls in info.classes.values():
        table = index.aliases.get(cls.file) or AliasTable()
        builder = _Builder(info, index, table, state_names, cls)
        builder.run()
    return index


def _collect_aliases(info: ProgramInfo, state_names, index: AnnotationIndex) -> None:
    for unit in info.program.compilation_units:
        table = AliasTable()
        for decl in unit.decls:
            for ann in decl.annotations:
                if ann.kind != ast.REFINEMENT_ALIAS:
                    continue
                payload = ann.payload()
                if payload is None:
                    index.diagnostics.append(
                        _ann_diag(info, unit.path, ann.span, "@RefinementAlias needs a payload")
                    )
                    continue
                try:
                    name, params, body = parse_alias_decl(payload.text)
                    table.define(name, params, body)
                except AliasError as e:
                    index.diagnostics.append(
                        _ann_diag(info, unit.path, payload.abs_span(e.span), e.message)
                    )
        try:
            table.validate(state_names)
        except AliasError as e:
            index.diagnostics.append(
                _ann_diag(info, unit.path, Span(0, 0), e.message)
            )
            table = AliasTable()
        index.aliases[unit.path] = table


def _ann_diag(info: ProgramInfo, path: str, span: Span, message: str) -> Diagnostic:
    sl, sc, el, ec = info.program.source_map.position(path, span)
    return Diagnostic(
        file=path, span=span, kind=ANNOTATION, message=message,
        start_line=sl, start_col=sc, end_line=el, end_col=ec,
    )


class _Builder:
    def __init__(self, info, index, table, state_names, cls: ClassInfo):
        self.info = info
        self.index = index
        self.table = table
        self.state_names = state_names
        self.cls = cls
        self.path = cls.file or "<external>"

    def run(self) -> None:
        for f in self.cls.fields.values():
            reft = self._field_reft(f)
            if reft is not None:
                self.index.field_refts[(self.cls.name, f.name)] = reft
        for m in self.cls.methods.values():
            self._method_contract(m.name, m)
        if self.cls.constructor is not None:
            self._method_contract(CONSTRUCTOR, self.cls.constructor)
        decl = self.cls.decl
        if decl is not None:
            for m in decl.methods + decl.constructors:
                if m.body is not None:
                    self._collect_locals(m.body)

    def error(self, span: Span, message: str) -> None:
        self.index.diagnostics.append(_ann_diag(self.info, self.path, span, message))

    def _parse_payload(self, payload: ast.Payload, own_name: Optional[str],
                       allowed: set[str], what: str) -> Optional[Predicate]:
        try:
            pred = parse_predicate(payload.text)
        except PredicateError as e:
            self.error(payload.abs_span(e.span), e.message)
            return None
        try:
            pred = expand_aliases(pred, self.table, self.state_names)
        except AliasError as e:
            span = payload.abs_span(e.span) if e.span != Span(0, 0) else payload.full_span()
            self.error(span, e.message)
            return None
        if _has_app(pred):
            self.error(
                payload.full_span(),
                "state predicates are not allowed in value refinements",
            )
            return None
        if own_name is not None:
            pred = substitute(pred, {own_name: AnonValue()})
        loose = free_vars(pred) - {"_"} - allowed
        if loose:
            self.error(
                payload.full_span(),
                f"unknown name {sorted(loose)[0]} in {what} refinement",
            )
            return None
        return pred

    def _field_reft(self, f) -> Optional[RefinedType]:
        if f.annotation is None:
            return None
        payload = f.annotation.payload()
        if payload is None:
            self.error(f.annotation.span, "@Refinement needs a predicate payload")
            return None
        pred = self._parse_payload(payload, f.name, set(), "field")
        if pred is None:
            return None
        return RefinedType(f.base_type, pred)

    def _method_contract(self, key_name: str, m) -> None:
        param_names = [p.name for p in m.params]
        param_refts: dict[str, RefinedType] = {}
        earlier: set[str] = set()
        for p in m.params:
            if p.annotation is not None and p.annotation.kind == ast.REFINEMENT:
                payload = p.annotation.payload()
                if payload is None:
                    self.error(p.annotation.span, "@Refinement needs a predicate payload")
                elif p.base_type in ("int", "boolean"):
                    pred = self._parse_payload(
                        payload, p.name, set(earlier), f"parameter {p.name}"
                    )
                    if pred is not None:
                        param_refts[p.name] = RefinedType(p.base_type, pred)
                else:
                    self.error(
                        p.annotation.span,
                        "value refinements apply to int or boolean parameters",
                    )
            earlier.add(p.name)
        return_reft = None
        if m.return_annotation is not None:
            payload = m.return_annotation.payload()
            if payload is None:
                self.error(m.return_annotation.span, "@Refinement needs a predicate payload")
            elif m.return_type in ("int", "boolean"):
                pred = self._parse_payload(payload, None, set(param_names), "return")
                if pred is not None:
                    return_reft = RefinedType(m.return_type, pred)
            else:
                self.error(
                    m.return_annotation.span,
                    "return refinements apply to int or boolean methods",
                )
        if param_refts or return_reft is not None:
            self.index.contracts[(self.cls.name, key_name)] = MethodContract(
                param_names, param_refts, return_reft
            )

    def _collect_locals(self, block: ast.Block) -> None:
        for s in _walk_stmts(block):
            if isinstance(s, ast.LocalDecl) and s.annotation is not None:
                payload = s.annotation.payload()
                if payload is None:
                    self.error(s.annotation.span, "@Refinement needs a predicate payload")
                    continue
                if s.base_type not in ("int", "boolean"):
                    self.error(
                        s.annotation.span,
                        "value refinements apply to int or boolean variables",
                    )
                    continue
                # Scope validation happens at the declaration site during
                # method checking, where the environment is known.
                try:
                    pred = parse_predicate(payload.text)
                    pred = expand_aliases(pred, self.table, self.state_names)
                except (PredicateError, AliasError) as e:
                    span = payload.abs_span(e.span) if e.span != Span(0, 0) else payload.full_span()
                    self.error(span, e.message)
                    continue
                if _has_app(pred):
                    self.error(
                        payload.full_span(),
                        "state predicates are not allowed in value refinements",
                    )
                    continue
                pred = substitute(pred, {s.name: AnonValue()})
                self.index.local_refts[id(s)] = RefinedType(s.base_type, pred)


def _walk_stmts(s: ast.Stmt):
    yield s
    if isinstance(s, ast.Block):
        for inner in s.stmts:
            yield from _walk_stmts(inner)
    elif isinstance(s, ast.If):
        yield from _walk_stmts(s.then_branch)
        if s.else_branch is not None:
            yield from _walk_stmts(s.else_branch)
    elif isinstance(s, ast.While):
        yield from _walk_stmts(s.body)


def _has_app(p: Predicate) -> bool:
    if isinstance(p, App):
        return True
    for attr in ("operand", "left", "right"):
        child = getattr(p, attr, None)
        if child is not None and _has_app(child):
            return True
    return False
