from .ast import (
    Assign,
    Binary,
    Block,
    BoolLitE,
    Call,
    ClassDecl,
    Expr,
    FieldDecl,
    FieldRef,
    If,
    IntLitE,
    InterfaceDecl,
    LocalDecl,
    MethodDecl,
    New,
    Param,
    Payload,
    Program,
    RawAnnotation,
    Return,
    Stmt,
    ThisLit,
    Unary,
    VarRef,
    While,
    ExprStmt,
)
from .parser import parse_program
from .printer import program_to_source
from .typecheck import ProgramInfo, base_typecheck

__all__ = [
    "Assign",
    "Binary",
    "Block",
    "BoolLitE",
    "Call",
    "ClassDecl",
    "Expr",
    "ExprStmt",
    "FieldDecl",
    "FieldRef",
    "If",
    "IntLitE",
    "InterfaceDecl",
    "LocalDecl",
    "MethodDecl",
    "New",
    "Param",
    "Payload",
    "Program",
    "ProgramInfo",
    "RawAnnotation",
    "Return",
    "Stmt",
    "ThisLit",
    "Unary",
    "VarRef",
    "While",
    "base_typecheck",
    "parse_program",
    "program_to_source",
]
