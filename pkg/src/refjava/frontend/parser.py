"""Recursive-descent parser producing a Program or syntax diagnostics.

One parse error aborts the file it occurs in; files are independent,
so a multi-file input reports one syntax diagnostic per broken file.
Annotations are captured verbatim as raw payload strings; their
contents are parsed later by the refinement-language parser.
"""

from __future__ import annotations

from typing import Union

from ..diagnostics import SYNTAX, Diagnostic
from ..spans import SourceMap, Span
from . import ast
from .lexer import LexError, Token, tokenize


class ParseError(Exception):
    def __init__(self, message: str, span: Span):
        super().__init__(message)
        self.message = message
        self.span = span


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.pos = 0

    # -- token plumbing ----------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> Token:
        tok = self.toks[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, kind: str, text: str | None = None) -> bool:
        tok = self.peek()
        return tok.kind == kind and (text is None or tok.text == text)

    def accept(self, kind: str, text: str | None = None) -> Token | None:
        if self.at(kind, text):
            return self.next()
        return None

    def expect(self, kind: str, text: str | None = None) -> Token:
        tok = self.peek()
        if not self.at(kind, text):
            want = text if text is not None else kind
            raise ParseError(f"expected {want!r}, found {tok.text or tok.kind!r}", tok.span)
        return self.next()

    def expect_ident(self, what: str) -> Token:
        tok = self.peek()
        if tok.kind != "ident":
            raise ParseError(f"expected {what}", tok.span)
        return self.next()

    # -- declarations --------------------------------------------------------

    def compilation_unit(self, path: str) -> ast.CompilationUnit:
        decls: list[ast.TypeDecl] = []
        seen: set[str] = set()
        while not self.at("eof"):
            anns = self.annotations()
            self.modifiers()
            if self.at("keyword", "class"):
                decl = self.class_decl(anns)
            elif self.at("keyword", "interface"):
                decl = self.interface_decl(anns)
            else:
                raise ParseError("expected a class or interface declaration", self.peek().span)
            if decl.name in seen:
                raise ParseError(f"duplicate definition of {decl.name}", decl.name_span)
            seen.add(decl.name)
            decls.append(decl)
        return ast.CompilationUnit(path, decls)

    def annotations(self) -> list[ast.RawAnnotation]:
        anns = []
        while self.at("punct", "@"):
            anns.append(self.annotation())
        return anns

    def annotation(self) -> ast.RawAnnotation:
        start = self.expect("punct", "@").span
        name_tok = self.expect_ident("an annotation name")
        payloads: list[ast.Payload] = []
        end = name_tok.span
        if self.accept("punct", "("):
            if self.at("string"):
                payloads.append(self.string_payload(None))
            elif self.at("punct", "{"):
                self.next()
                payloads.append(self.string_payload(None))
                while self.accept("punct", ","):
                    payloads.append(self.string_payload(None))
                self.expect("punct", "}")
            elif self.at("ident"):
                while True:
                    arg = self.expect_ident("an argument name")
                    self.expect("punct", "=")
                    payloads.append(self.string_payload(arg.text))
                    if not self.accept("punct", ","):
                        break
            end = self.expect("punct", ")").span
        kind = name_tok.text if name_tok.text in ast.ANNOTATION_KINDS else name_tok.text
        return ast.RawAnnotation(kind, payloads, start.cover(end))

    def string_payload(self, name: str | None) -> ast.Payload:
        tok = self.expect("string")
        return ast.Payload(tok.value, tok.offsets, name)

    def modifiers(self) -> dict:
        flags = {"static": False}
        while True:
            if self.at("keyword", "public") or self.at("keyword", "private") or self.at(
                "keyword", "protected"
            ):
                self.next()
            elif self.at("keyword", "static"):
                self.next()
                flags["static"] = True
            else:
                return flags

    def class_decl(self, anns: list[ast.RawAnnotation]) -> ast.ClassDecl:
        start = self.expect("keyword", "class").span
        name = self.expect_ident("a class name")
        self.expect("punct", "{")
        fields: list[ast.FieldDecl] = []
        methods: list[ast.MethodDecl] = []
        ctors: list[ast.MethodDecl] = []
        method_names: set[str] = set()
        while not self.at("punct", "}"):
            member_anns = self.annotations()
            flags = self.modifiers()
            if self.at("ident", name.text) and self.peek(1).text == "(":
                ctor = self.method_rest("void", self.next(), member_anns, flags, name.text)
                if ctors:
                    raise ParseError(
                        f"duplicate constructor for {name.text}", ctor.name_span
                    )
                ctors.append(ctor)
                continue
            base = self.base_type()
            member_name = self.expect_ident("a member name")
            if self.at("punct", "("):
                m = self.method_rest(base, member_name, member_anns, flags, None)
                if m.name in method_names:
                    raise ParseError(f"duplicate definition of {m.name}", m.name_span)
                method_names.add(m.name)
                methods.append(m)
            else:
                fields.append(self.field_rest(base, member_name, member_anns))
        end = self.expect("punct", "}").span
        return ast.ClassDecl(
            name.text, anns, fields, methods, ctors, start.cover(end), name.span
        )

    def interface_decl(self, anns: list[ast.RawAnnotation]) -> ast.InterfaceDecl:
        start = self.expect("keyword", "interface").span
        name = self.expect_ident("an interface name")
        self.expect("punct", "{")
        methods: list[ast.MethodDecl] = []
        names: set[str] = set()
        while not self.at("punct", "}"):
            member_anns = self.annotations()
            flags = self.modifiers()
            base = self.base_type()
            m_name = self.expect_ident("a method name")
            m = self.method_rest(base, m_name, member_anns, flags, None, signature_only=True)
            if m.name in names:
                raise ParseError(f"duplicate definition of {m.name}", m.name_span)
            names.add(m.name)
            methods.append(m)
        end = self.expect("punct", "}").span
        return ast.InterfaceDecl(name.text, anns, methods, start.cover(end), name.span)

    def base_type(self) -> str:
        tok = self.peek()
        if tok.kind == "keyword" and tok.text in ("int", "boolean", "void"):
            self.next()
            return tok.text
        if tok.kind == "ident":
            self.next()
            return tok.text
        raise ParseError("expected a type", tok.span)

    def field_rest(self, base, name_tok, anns) -> ast.FieldDecl:
        if base == "void":
            raise ParseError("fields cannot have type void", name_tok.span)
        refinement = self.single_refinement(anns, "field")
        init = None
        if self.accept("punct", "="):
            init = self.expression()
        end = self.expect("punct", ";").span
        return ast.FieldDecl(name_tok.text, base, refinement, init, name_tok.span.cover(end))

    def single_refinement(self, anns, what) -> ast.RawAnnotation | None:
        refinements = [a for a in anns if a.kind == ast.REFINEMENT]
        if len(refinements) > 1:
            raise ParseError(f"{what} carries more than one refinement", anns[1].span)
        unknown = [
            a
            for a in anns
            if a.kind in ast.ANNOTATION_KINDS and a.kind != ast.REFINEMENT
        ]
        if unknown:
            raise ParseError(
                f"annotation @{unknown[0].kind} is not allowed on a {what}",
                unknown[0].span,
            )
        return refinements[0] if refinements else None

    def method_rest(
        self, base, name_tok, anns, flags, ctor_of, signature_only=False
    ) -> ast.MethodDecl:
        self.expect("punct", "(")
        params: list[ast.Param] = []
        seen: set[str] = set()
        if not self.at("punct", ")"):
            while True:
                p_anns = self.annotations()
                p_base = self.base_type()
                if p_base == "void":
                    raise ParseError("parameters cannot have type void", self.peek().span)
                p_name = self.expect_ident("a parameter name")
                if p_name.text in seen:
                    raise ParseError(f"duplicate parameter {p_name.text}", p_name.span)
                seen.add(p_name.text)
                ann = None
                if p_anns:
                    if len(p_anns) > 1:
                        raise ParseError(
                            "parameters carry exactly one refinement annotation",
                            p_anns[1].span,
                        )
                    ann = p_anns[0]
                    if ann.kind not in (ast.REFINEMENT, ast.STATE_REFINEMENT):
                        raise ParseError(
                            f"annotation @{ann.kind} is not allowed on a parameter",
                            ann.span,
                        )
                params.append(
                    ast.Param(p_name.text, p_base, ann, p_name.span)
                )
                if not self.accept("punct", ","):
                    break
        self.expect("punct", ")")

        return_ann = None
        state_anns = []
        for a in anns:
            if a.kind == ast.REFINEMENT:
                if return_ann is not None:
                    raise ParseError("method carries more than one refinement", a.span)
                return_ann = a
            elif a.kind == ast.STATE_REFINEMENT:
                state_anns.append(a)
            elif a.kind in ast.ANNOTATION_KINDS:
                raise ParseError(
                    f"annotation @{a.kind} is not allowed on a method", a.span
                )

        body = None
        if self.at("punct", ";"):
            end = self.next().span
            if not signature_only and ctor_of is not None:
                raise ParseError("constructors need a body", end)
        elif signature_only:
            raise ParseError("interface methods cannot have bodies", self.peek().span)
        else:
            body = self.block()
            end = body.span
        return ast.MethodDecl(
            name_tok.text,
            params,
            base,
            return_ann,
            state_anns,
            body,
            flags["static"],
            ctor_of is not None,
            name_tok.span.cover(end),
            name_tok.span,
        )

    # -- statements ----------------------------------------------------------

    def block(self) -> ast.Block:
        start = self.expect("punct", "{").span
        stmts = []
        while not self.at("punct", "}"):
            stmts.append(self.statement())
        end = self.expect("punct", "}").span
        return ast.Block(stmts, start.cover(end))

    def statement(self) -> ast.Stmt:
        anns = self.annotations()
        tok = self.peek()
        if anns and not self._local_decl_ahead():
            raise ParseError(
                "annotations are only allowed on local variable declarations", tok.span
            )
        if self.at("punct", "{"):
            return self.block()
        if self.at("keyword", "if"):
            return self.if_stmt()
        if self.at("keyword", "while"):
            return self.while_stmt()
        if self.at("keyword", "return"):
            start = self.next().span
            value = None if self.at("punct", ";") else self.expression()
            end = self.expect("punct", ";").span
            return ast.Return(value, start.cover(end))
        if self._local_decl_ahead():
            return self.local_decl(anns)
        expr = self.expression()
        if self.accept("punct", "="):
            if not isinstance(expr, (ast.VarRef, ast.FieldRef)):
                raise ParseError("target of assignment must be a variable or field", expr.span)
            value = self.expression()
            end = self.expect("punct", ";").span
            return ast.Assign(expr, value, expr.span.cover(end))
        end = self.expect("punct", ";").span
        if not isinstance(expr, (ast.Call, ast.New)):
            raise ParseError("not a statement", expr.span)
        return ast.ExprStmt(expr, expr.span.cover(end))

    def _local_decl_ahead(self) -> bool:
        tok = self.peek()
        if tok.kind == "keyword" and tok.text in ("int", "boolean"):
            return True
        return tok.kind == "ident" and self.peek(1).kind == "ident"

    def local_decl(self, anns) -> ast.LocalDecl:
        annotation = None
        if anns:
            if len(anns) > 1:
                raise ParseError(
                    "local declarations carry exactly one refinement annotation",
                    anns[1].span,
                )
            annotation = anns[0]
            if annotation.kind != ast.REFINEMENT:
                raise ParseError(
                    f"annotation @{annotation.kind} is not allowed on a local variable",
                    annotation.span,
                )
        base = self.base_type()
        name = self.expect_ident("a variable name")
        init = None
        if self.accept("punct", "="):
            init = self.expression()
        end = self.expect("punct", ";").span
        start = anns[0].span if anns else name.span
        return ast.LocalDecl(annotation, base, name.text, init, start.cover(end))

    def if_stmt(self) -> ast.If:
        start = self.expect("keyword", "if").span
        self.expect("punct", "(")
        cond = self.expression()
        self.expect("punct", ")")
        then_branch = self.statement()
        else_branch = None
        if self.accept("keyword", "else"):
            else_branch = self.statement()
        end = else_branch.span if else_branch is not None else then_branch.span
        return ast.If(cond, then_branch, else_branch, start.cover(end))

    def while_stmt(self) -> ast.While:
        start = self.expect("keyword", "while").span
        self.expect("punct", "(")
        cond = self.expression()
        self.expect("punct", ")")
        body = self.statement()
        return ast.While(cond, body, start.cover(body.span))

    # -- expressions -----------------------------------------------------------

    def expression(self) -> ast.Expr:
        return self.or_expr()

    def _binary_level(self, sub, ops):
        left = sub()
        while self.peek().kind == "punct" and self.peek().text in ops:
            op = self.next().text
            right = sub()
            left = ast.Binary(op, left, right, left.span.cover(right.span))
        return left

    def or_expr(self):
        return self._binary_level(self.and_expr, ("||",))

    def and_expr(self):
        return self._binary_level(self.equality, ("&&",))

    def equality(self):
        return self._binary_level(self.relational, ("==", "!="))

    def relational(self):
        return self._binary_level(self.additive, ("<", "<=", ">", ">="))

    def additive(self):
        return self._binary_level(self.multiplicative, ("+", "-"))

    def multiplicative(self):
        return self._binary_level(self.unary, ("*", "/", "%"))

    def unary(self) -> ast.Expr:
        tok = self.peek()
        if tok.kind == "punct" and tok.text in ("-", "!"):
            self.next()
            operand = self.unary()
            return ast.Unary(tok.text, operand, tok.span.cover(operand.span))
        return self.postfix()

    def postfix(self) -> ast.Expr:
        expr = self.primary()
        while self.at("punct", "."):
            self.next()
            name = self.expect_ident("a member name")
            if self.at("punct", "("):
                args, end = self.arguments()
                expr = ast.Call(expr, name.text, args, expr.span.cover(end))
            else:
                expr = ast.FieldRef(expr, name.text, expr.span.cover(name.span))
        return expr

    def arguments(self) -> tuple[list[ast.Expr], Span]:
        self.expect("punct", "(")
        args = []
        if not self.at("punct", ")"):
            args.append(self.expression())
            while self.accept("punct", ","):
                args.append(self.expression())
        end = self.expect("punct", ")").span
        return args, end

    def primary(self) -> ast.Expr:
        tok = self.peek()
        if tok.kind == "int":
            self.next()
            return ast.IntLitE(int(tok.text), tok.span)
        if tok.kind == "keyword" and tok.text in ("true", "false"):
            self.next()
            return ast.BoolLitE(tok.text == "true", tok.span)
        if tok.kind == "keyword" and tok.text == "this":
            self.next()
            return ast.ThisLit(tok.span)
        if tok.kind == "keyword" and tok.text == "new":
            self.next()
            cls = self.expect_ident("a class name")
            args, end = self.arguments()
            return ast.New(cls.text, args, tok.span.cover(end))
        if tok.kind == "ident":
            self.next()
            if self.at("punct", "("):
                args, end = self.arguments()
                return ast.Call(None, tok.text, args, tok.span.cover(end))
            return ast.VarRef(tok.text, tok.span)
        if self.accept("punct", "("):
            inner = self.expression()
            self.expect("punct", ")")
            return inner
        raise ParseError("expected an expression", tok.span)


def parse_program(
    sources: list[tuple[str, str]]
) -> Union[ast.Program, list[Diagnostic]]:
    """Parse source files into one Program, or return syntax diagnostics."""
    source_map = SourceMap()
    units: list[ast.CompilationUnit] = []
    diagnostics: list[Diagnostic] = []
    class_names: dict[str, str] = {}
    for path, text in sources:
        source_map.add_file(path, text)
        try:
            parser = _Parser(tokenize(text))
            unit = parser.compilation_unit(path)
        except (LexError, ParseError) as e:
            diagnostics.append(_syntax_diag(path, e.message, e.span, source_map))
            continue
        for decl in unit.decls:
            if decl.name in class_names:
                diagnostics.append(
                    _syntax_diag(
                        path,
                        f"duplicate definition of {decl.name}"
                        f" (also defined in {class_names[decl.name]})",
                        decl.name_span,
                        source_map,
                    )
                )
            else:
                class_names[decl.name] = path
        units.append(unit)
    if diagnostics:
        return diagnostics
    return ast.Program(units, source_map)


def _syntax_diag(path, message, span, source_map) -> Diagnostic:
    sl, sc, el, ec = source_map.position(path, span)
    return Diagnostic(
        file=path,
        span=span,
        kind=SYNTAX,
        message=message,
        start_line=sl,
        start_col=sc,
        end_line=el,
        end_col=ec,
    )
