"""Typed program representation for the annotated Java subset.

Spans never participate in equality, so two parses of the same text
compare equal structurally.  Resolution results (base types, callee
links) are attached by the base typechecker after parsing; a Program
is immutable once that pass finishes and can be shared across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from ..spans import NO_SPAN, Span, SourceMap

REFINEMENT = "Refinement"
STATE_SET = "StateSet"
STATE_REFINEMENT = "StateRefinement"
EXTERNAL_FOR = "ExternalRefinementsFor"
REFINEMENT_ALIAS = "RefinementAlias"

ANNOTATION_KINDS = {
    REFINEMENT,
    STATE_SET,
    STATE_REFINEMENT,
    EXTERNAL_FOR,
    REFINEMENT_ALIAS,
}


@dataclass(frozen=True)
class Payload:
    """One string argument of an annotation, with per-character file
    offsets so errors inside the payload point at the exact source."""

    text: str
    offsets: tuple[int, ...] = field(compare=False)  # len(text) + 1 entries
    name: Optional[str] = None  # named argument (from= / to=)

    def abs_span(self, rel: Span) -> Span:
        start = self.offsets[min(rel.start, len(self.text))]
        end = self.offsets[min(rel.end, len(self.text))]
        return Span(start, end)

    def full_span(self) -> Span:
        return Span(self.offsets[0], self.offsets[-1])


@dataclass
class RawAnnotation:
    kind: str
    payloads: list[Payload]
    span: Span = field(compare=False)

    def payload(self, name: Optional[str] = None) -> Optional[Payload]:
        for p in self.payloads:
            if p.name == name:
                return p
        return None


# --- expressions -----------------------------------------------------------


@dataclass
class Expr:
    pass


@dataclass
class IntLitE(Expr):
    value: int
    span: Span = field(compare=False)
    base_type: Optional[str] = field(default=None, compare=False, repr=False)


@dataclass
class BoolLitE(Expr):
    value: bool
    span: Span = field(compare=False)
    base_type: Optional[str] = field(default=None, compare=False, repr=False)


@dataclass
class VarRef(Expr):
    name: str
    span: Span = field(compare=False)
    base_type: Optional[str] = field(default=None, compare=False, repr=False)
    # Set when the bare name resolves to a field of the enclosing class.
    field_of: Optional[str] = field(default=None, compare=False, repr=False)


@dataclass
class ThisLit(Expr):
    span: Span = field(compare=False)
    base_type: Optional[str] = field(default=None, compare=False, repr=False)


@dataclass
class FieldRef(Expr):
    target: Expr
    name: str
    span: Span = field(compare=False)
    base_type: Optional[str] = field(default=None, compare=False, repr=False)
    target_class: Optional[str] = field(default=None, compare=False, repr=False)


@dataclass
class Unary(Expr):
    op: str  # "-" or "!"
    operand: Expr
    span: Span = field(compare=False)
    base_type: Optional[str] = field(default=None, compare=False, repr=False)


@dataclass
class Binary(Expr):
    op: str
    left: Expr
    right: Expr
    span: Span = field(compare=False)
    base_type: Optional[str] = field(default=None, compare=False, repr=False)


@dataclass
class Call(Expr):
    receiver: Optional[Expr]  # None for same-class calls
    name: str
    args: list[Expr]
    span: Span = field(compare=False)
    base_type: Optional[str] = field(default=None, compare=False, repr=False)
    resolved_class: Optional[str] = field(default=None, compare=False, repr=False)


@dataclass
class New(Expr):
    class_name: str
    args: list[Expr]
    span: Span = field(compare=False)
    base_type: Optional[str] = field(default=None, compare=False, repr=False)


# --- statements ------------------------------------------------------------


@dataclass
class Stmt:
    pass


@dataclass
class LocalDecl(Stmt):
    annotation: Optional[RawAnnotation]
    base_type: str
    name: str
    init: Optional[Expr]
    span: Span = field(compare=False)


@dataclass
class Assign(Stmt):
    target: Expr  # VarRef or FieldRef
    value: Expr
    span: Span = field(compare=False)


@dataclass
class If(Stmt):
    cond: Expr
    then_branch: Stmt
    else_branch: Optional[Stmt]
    span: Span = field(compare=False)


@dataclass
class While(Stmt):
    cond: Expr
    body: Stmt
    span: Span = field(compare=False)


@dataclass
class Return(Stmt):
    value: Optional[Expr]
    span: Span = field(compare=False)


@dataclass
class ExprStmt(Stmt):
    expr: Expr
    span: Span = field(compare=False)


@dataclass
class Block(Stmt):
    stmts: list[Stmt]
    span: Span = field(compare=False)


# --- declarations ----------------------------------------------------------


@dataclass
class Param:
    name: str
    base_type: str
    annotation: Optional[RawAnnotation]
    span: Span = field(compare=False)


@dataclass
class FieldDecl:
    name: str
    base_type: str
    annotation: Optional[RawAnnotation]
    init: Optional[Expr]
    span: Span = field(compare=False)


@dataclass
class MethodDecl:
    name: str
    params: list[Param]
    return_base_type: str
    return_annotation: Optional[RawAnnotation]
    state_annotations: list[RawAnnotation]
    body: Optional[Block]
    is_static: bool
    is_constructor: bool
    span: Span = field(compare=False)
    name_span: Span = field(default=NO_SPAN, compare=False)


@dataclass
class ClassDecl:
    name: str
    annotations: list[RawAnnotation]
    fields: list[FieldDecl]
    methods: list[MethodDecl]
    constructors: list[MethodDecl]
    span: Span = field(compare=False)
    name_span: Span = field(default=NO_SPAN, compare=False)


@dataclass
class InterfaceDecl:
    name: str
    annotations: list[RawAnnotation]
    methods: list[MethodDecl]
    span: Span = field(compare=False)
    name_span: Span = field(default=NO_SPAN, compare=False)


TypeDecl = Union[ClassDecl, InterfaceDecl]


@dataclass
class CompilationUnit:
    path: str
    decls: list[TypeDecl]


@dataclass
class Program:
    compilation_units: list[CompilationUnit]
    source_map: SourceMap = field(compare=False)

    def decls(self):
        for unit in self.compilation_units:
            for d in unit.decls:
                yield unit.path, d
