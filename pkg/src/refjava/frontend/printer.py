"""Pretty-printer for parsed programs.

Reparsing printed output yields a structurally identical Program,
which the round-trip tests rely on.
"""

from __future__ import annotations

from . import ast

_PREC = {
    "||": 1, "&&": 2, "==": 3, "!=": 3,
    "<": 4, "<=": 4, ">": 4, ">=": 4,
    "+": 5, "-": 5, "*": 6, "/": 6, "%": 6,
}


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _annotation(a: ast.RawAnnotation) -> str:
    if not a.payloads:
        return f"@{a.kind}"
    parts = []
    named = any(p.name for p in a.payloads)
    braced = a.kind == ast.STATE_SET
    for p in a.payloads:
        lit = f'"{_escape(p.text)}"'
        parts.append(f"{p.name}={lit}" if p.name else lit)
    inner = ", ".join(parts)
    if braced:
        inner = "{" + inner + "}"
    return f"@{a.kind}({inner})"


def expr_to_source(e: ast.Expr) -> str:
    if isinstance(e, ast.IntLitE):
        return str(e.value)
    if isinstance(e, ast.BoolLitE):
        return "true" if e.value else "false"
    if isinstance(e, ast.VarRef):
        return e.name
    if isinstance(e, ast.ThisLit):
        return "this"
    if isinstance(e, ast.FieldRef):
        return f"{_postfix_operand(e.target)}.{e.name}"
    if isinstance(e, ast.Unary):
        inner = expr_to_source(e.operand)
        if isinstance(e.operand, ast.Binary):
            inner = f"({inner})"
        return e.op + inner
    if isinstance(e, ast.Binary):
        me = _PREC[e.op]
        lhs = expr_to_source(e.left)
        rhs = expr_to_source(e.right)
        if isinstance(e.left, ast.Binary) and _PREC[e.left.op] < me:
            lhs = f"({lhs})"
        if isinstance(e.right, ast.Binary) and _PREC[e.right.op] <= me:
            rhs = f"({rhs})"
        return f"{lhs} {e.op} {rhs}"
    if isinstance(e, ast.Call):
        args = ", ".join(expr_to_source(a) for a in e.args)
        if e.receiver is None:
            return f"{e.name}({args})"
        return f"{_postfix_operand(e.receiver)}.{e.name}({args})"
    if isinstance(e, ast.New):
        args = ", ".join(expr_to_source(a) for a in e.args)
        return f"new {e.class_name}({args})"
    raise TypeError(f"not an expression: {e!r}")


def _postfix_operand(e: ast.Expr) -> str:
    text = expr_to_source(e)
    if isinstance(e, (ast.Binary, ast.Unary)):
        return f"({text})"
    return text


def _stmt(s: ast.Stmt, indent: int, out: list[str]) -> None:
    pad = "    " * indent
    if isinstance(s, ast.Block):
        out.append(pad + "{")
        for inner in s.stmts:
            _stmt(inner, indent + 1, out)
        out.append(pad + "}")
    elif isinstance(s, ast.LocalDecl):
        if s.annotation is not None:
            out.append(pad + _annotation(s.annotation))
        init = f" = {expr_to_source(s.init)}" if s.init is not None else ""
        out.append(f"{pad}{s.base_type} {s.name}{init};")
    elif isinstance(s, ast.Assign):
        out.append(f"{pad}{expr_to_source(s.target)} = {expr_to_source(s.value)};")
    elif isinstance(s, ast.If):
        out.append(f"{pad}if ({expr_to_source(s.cond)})")
        _branch(s.then_branch, indent, out)
        if s.else_branch is not None:
            out.append(pad + "else")
            _branch(s.else_branch, indent, out)
    elif isinstance(s, ast.While):
        out.append(f"{pad}while ({expr_to_source(s.cond)})")
        _branch(s.body, indent, out)
    elif isinstance(s, ast.Return):
        value = f" {expr_to_source(s.value)}" if s.value is not None else ""
        out.append(f"{pad}return{value};")
    elif isinstance(s, ast.ExprStmt):
        out.append(f"{pad}{expr_to_source(s.expr)};")
    else:
        raise TypeError(f"not a statement: {s!r}")


def _branch(s: ast.Stmt, indent: int, out: list[str]) -> None:
    # Blocks keep the parent indent; bare branch statements indent once,
    # preserving the parsed structure (no implicit block insertion).
    _stmt(s, indent if isinstance(s, ast.Block) else indent + 1, out)


def _method(m: ast.MethodDecl, indent: int, out: list[str]) -> None:
    pad = "    " * indent
    for a in m.state_annotations:
        out.append(pad + _annotation(a))
    if m.return_annotation is not None:
        out.append(pad + _annotation(m.return_annotation))
    params = []
    for p in m.params:
        ann = f"{_annotation(p.annotation)} " if p.annotation is not None else ""
        params.append(f"{ann}{p.base_type} {p.name}")
    static = "static " if m.is_static else ""
    ret = "" if m.is_constructor else f"{m.return_base_type} "
    head = f"{pad}{static}{ret}{m.name}({', '.join(params)})"
    if m.body is None:
        out.append(head + ";")
    else:
        out.append(head)
        _stmt(m.body, indent, out)


def program_to_source(program: ast.Program) -> dict[str, str]:
    """Printed text per compilation-unit path."""
    result = {}
    for unit in program.compilation_units:
        out: list[str] = []
        for decl in unit.decls:
            for a in decl.annotations:
                out.append(_annotation(a))
            if isinstance(decl, ast.ClassDecl):
                out.append(f"class {decl.name}")
                out.append("{")
                for f in decl.fields:
                    if f.annotation is not None:
                        out.append("    " + _annotation(f.annotation))
                    init = f" = {expr_to_source(f.init)}" if f.init is not None else ""
                    out.append(f"    {f.base_type} {f.name}{init};")
                for c in decl.constructors:
                    _method(c, 1, out)
                for m in decl.methods:
                    _method(m, 1, out)
                out.append("}")
            else:
                out.append(f"interface {decl.name}")
                out.append("{")
                for m in decl.methods:
                    _method(m, 1, out)
                out.append("}")
        result[unit.path] = "\n".join(out) + "\n"
    return result
