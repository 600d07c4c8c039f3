"""Base (non-refinement) type checking and name resolution.

Establishes standard Java-style typing of the subset before any
refinement reasoning happens: every expression node gets a base type,
calls and field accesses are resolved, and external-refinement
interfaces are materialized as callable external classes.

Errors never abort the pass; all base-type diagnostics for a program
are reported together.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional

from ..diagnostics import BASETYPE, Diagnostic
from ..spans import Span
from . import ast

INT = "int"
BOOLEAN = "boolean"
VOID = "void"
_PRIMITIVES = {INT, BOOLEAN, VOID}


@dataclass
class FieldInfo:
    name: str
    base_type: str
    annotation: Optional[ast.RawAnnotation]
    decl: Optional[ast.FieldDecl]


@dataclass
class MethodInfo:
    name: str
    params: list[ast.Param]
    return_type: str
    return_annotation: Optional[ast.RawAnnotation]
    state_annotations: list[ast.RawAnnotation]
    is_static: bool
    decl: Optional[ast.MethodDecl]
    owner: str = ""


@dataclass
class ClassInfo:
    name: str
    fields: dict[str, FieldInfo] = dc_field(default_factory=dict)
    methods: dict[str, MethodInfo] = dc_field(default_factory=dict)
    constructor: Optional[MethodInfo] = None
    external: bool = False
    # Declaration carrying @StateSet / @RefinementAlias / @StateRefinement
    # annotations for this class (the class itself, or the mirroring
    # @ExternalRefinementsFor interface).
    annotation_source: Optional[ast.TypeDecl] = None
    qualified_name: Optional[str] = None
    decl: Optional[ast.ClassDecl] = None
    file: str = ""


@dataclass
class ProgramInfo:
    classes: dict[str, ClassInfo]
    program: ast.Program
    # Class name -> path of the compilation unit whose aliases apply.
    class_file: dict[str, str]


def base_typecheck(program: ast.Program) -> tuple[Optional[ProgramInfo], list[Diagnostic]]:
    checker = _Checker(program)
    checker.collect()
    if not checker.diagnostics:
        checker.check_bodies()
    info = ProgramInfo(checker.classes, program, checker.class_file)
    return (info if not checker.diagnostics else None), checker.diagnostics


class _Checker:
    def __init__(self, program: ast.Program):
        self.program = program
        self.classes: dict[str, ClassInfo] = {}
        self.class_file: dict[str, str] = {}
        self.diagnostics: list[Diagnostic] = []

    def error(self, path: str, span: Span, message: str) -> None:
        sl, sc, el, ec = self.program.source_map.position(path, span)
        self.diagnostics.append(
            Diagnostic(
                file=path, span=span, kind=BASETYPE, message=message,
                start_line=sl, start_col=sc, end_line=el, end_col=ec,
            )
        )

    # -- signature collection ------------------------------------------------

    def collect(self) -> None:
        interfaces: list[tuple[str, ast.InterfaceDecl]] = []
        for path, decl in self.program.decls():
            if isinstance(decl, ast.ClassDecl):
                self._register_class(path, decl)
            else:
                interfaces.append((path, decl))
        for path, decl in interfaces:
            self._register_interface(path, decl)
        self._register_opaque_types()

    def _register_class(self, path: str, decl: ast.ClassDecl) -> None:
        info = ClassInfo(decl.name, decl=decl, annotation_source=decl, file=path)
        for f in decl.fields:
            if f.name in info.fields:
                self.error(path, f.span, f"duplicate field {f.name}")
                continue
            info.fields[f.name] = FieldInfo(f.name, f.base_type, f.annotation, f)
        for m in decl.methods:
            info.methods[m.name] = MethodInfo(
                m.name, m.params, m.return_base_type, m.return_annotation,
                m.state_annotations, m.is_static, m, decl.name,
            )
        if decl.constructors:
            c = decl.constructors[0]
            info.constructor = MethodInfo(
                c.name, c.params, VOID, c.return_annotation,
                c.state_annotations, False, c, decl.name,
            )
        self.classes[decl.name] = info
        self.class_file[decl.name] = path

    def _register_interface(self, path: str, decl: ast.InterfaceDecl) -> None:
        external = [a for a in decl.annotations if a.kind == ast.EXTERNAL_FOR]
        if not external:
            return  # plain interfaces only host external refinements
        payload = external[0].payload()
        if payload is None or not payload.text:
            self.error(path, external[0].span, "@ExternalRefinementsFor needs a class name")
            return
        qualified = payload.text
        simple = qualified.rsplit(".", 1)[-1]
        if simple in self.classes and not self.classes[simple].external:
            # Retrofit annotations onto an in-program class.
            target = self.classes[simple]
            target.annotation_source = decl
            self._merge_interface_methods(target, decl, declare=False)
            return
        info = self.classes.get(simple)
        if info is None:
            info = ClassInfo(simple, external=True, qualified_name=qualified, file=path)
            info.annotation_source = decl
            self.classes[simple] = info
            self.class_file[simple] = path
        self._merge_interface_methods(info, decl, declare=True)

    def _merge_interface_methods(self, info: ClassInfo, decl: ast.InterfaceDecl, declare: bool) -> None:
        for m in decl.methods:
            mi = MethodInfo(
                m.name, m.params, m.return_base_type, m.return_annotation,
                m.state_annotations, m.is_static, m, info.name,
            )
            if m.name == info.name:
                # A signature named like the class mirrors its constructor.
                if declare or info.constructor is None:
                    info.constructor = mi
                elif info.constructor is not None:
                    info.constructor.return_annotation = m.return_annotation
                    info.constructor.state_annotations = m.state_annotations
            elif declare:
                info.methods[m.name] = mi
            elif m.name in info.methods:
                existing = info.methods[m.name]
                existing.return_annotation = m.return_annotation or existing.return_annotation
                existing.state_annotations = m.state_annotations or existing.state_annotations
                for ext_p, own_p in zip(m.params, existing.params):
                    if ext_p.annotation is not None and own_p.annotation is None:
                        own_p.annotation = ext_p.annotation
            else:
                info.methods[m.name] = mi

    def _register_opaque_types(self) -> None:
        """Class types mentioned in external signatures but never declared
        become opaque external classes with a default constructor."""
        mentioned: set[str] = set()
        for info in list(self.classes.values()):
            if not info.external:
                continue
            sigs = list(info.methods.values())
            if info.constructor:
                sigs.append(info.constructor)
            for sig in sigs:
                for p in sig.params:
                    if p.base_type not in _PRIMITIVES:
                        mentioned.add(p.base_type)
                if sig.return_type not in _PRIMITIVES:
                    mentioned.add(sig.return_type)
        for name in sorted(mentioned):
            if name not in self.classes:
                self.classes[name] = ClassInfo(name, external=True, qualified_name=name)
                self.class_file[name] = ""

    # -- body checking ---------------------------------------------------------

    def check_bodies(self) -> None:
        for path, decl in self.program.decls():
            if not isinstance(decl, ast.ClassDecl):
                continue
            info = self.classes[decl.name]
            for f in decl.fields:
                self._check_field(path, info, f)
            for m in decl.methods + decl.constructors:
                self._check_method(path, info, m)

    def _known_type(self, path: str, name: str, span: Span) -> bool:
        if name in _PRIMITIVES or name in self.classes:
            return True
        self.error(path, span, f"unknown type {name}")
        return False

    def _check_field(self, path: str, info: ClassInfo, f: ast.FieldDecl) -> None:
        self._known_type(path, f.base_type, f.span)
        if f.init is not None:
            t = self._expr(path, info, None, {}, f.init)
            if t is not None and t != f.base_type:
                self.error(
                    path, f.init.span,
                    f"cannot assign {t} to field {f.name} of type {f.base_type}",
                )

    def _check_method(self, path: str, info: ClassInfo, m: ast.MethodDecl) -> None:
        self._known_type(path, m.return_base_type, m.span)
        scope: dict[str, str] = {}
        for p in m.params:
            self._known_type(path, p.base_type, p.span)
            scope[p.name] = p.base_type
        if m.body is not None:
            self._block(path, info, m, dict(scope), m.body)

    def _block(self, path, info, method, scope: dict[str, str], block: ast.Block) -> None:
        local = dict(scope)
        for s in block.stmts:
            self._stmt(path, info, method, local, s)

    def _stmt(self, path, info, method, scope, s: ast.Stmt) -> None:
        if isinstance(s, ast.Block):
            self._block(path, info, method, scope, s)
        elif isinstance(s, ast.LocalDecl):
            self._known_type(path, s.base_type, s.span)
            if s.name in scope:
                self.error(path, s.span, f"variable {s.name} is already defined")
            if s.init is not None:
                t = self._expr(path, info, method, scope, s.init)
                if t is not None and t != s.base_type:
                    self.error(
                        path, s.init.span,
                        f"cannot assign {t} to {s.name} of type {s.base_type}",
                    )
            scope[s.name] = s.base_type
        elif isinstance(s, ast.Assign):
            target_t = self._expr(path, info, method, scope, s.target)
            value_t = self._expr(path, info, method, scope, s.value)
            if target_t is not None and value_t is not None and target_t != value_t:
                self.error(
                    path, s.span, f"cannot assign {value_t} to target of type {target_t}"
                )
        elif isinstance(s, ast.If):
            self._condition(path, info, method, scope, s.cond)
            self._stmt(path, info, method, dict(scope), s.then_branch)
            if s.else_branch is not None:
                self._stmt(path, info, method, dict(scope), s.else_branch)
        elif isinstance(s, ast.While):
            self._condition(path, info, method, scope, s.cond)
            self._stmt(path, info, method, dict(scope), s.body)
        elif isinstance(s, ast.Return):
            want = method.return_base_type if not method.is_constructor else VOID
            if s.value is None:
                if want != VOID:
                    self.error(path, s.span, f"missing return value of type {want}")
            else:
                got = self._expr(path, info, method, scope, s.value)
                if want == VOID:
                    self.error(path, s.span, "void method cannot return a value")
                elif got is not None and got != want:
                    self.error(path, s.span, f"cannot return {got} from a {want} method")
        elif isinstance(s, ast.ExprStmt):
            self._expr(path, info, method, scope, s.expr, allow_void=True)
        else:
            raise TypeError(f"unexpected statement {s!r}")

    def _condition(self, path, info, method, scope, e: ast.Expr) -> None:
        t = self._expr(path, info, method, scope, e)
        if t is not None and t != BOOLEAN:
            self.error(path, e.span, f"condition must be boolean, found {t}")

    # -- expressions -------------------------------------------------------------

    def _expr(self, path, info, method, scope, e: ast.Expr, allow_void=False) -> Optional[str]:
        t = self._expr_inner(path, info, method, scope, e)
        e.base_type = t
        if t == VOID and not allow_void:
            self.error(path, e.span, "void value not allowed here")
            return None
        return t

    def _expr_inner(self, path, info, method, scope, e: ast.Expr) -> Optional[str]:
        if isinstance(e, ast.IntLitE):
            return INT
        if isinstance(e, ast.BoolLitE):
            return BOOLEAN
        if isinstance(e, ast.ThisLit):
            if method is not None and method.is_static:
                self.error(path, e.span, "this is not available in a static method")
                return None
            return info.name
        if isinstance(e, ast.VarRef):
            if e.name in scope:
                return scope[e.name]
            fi = info.fields.get(e.name)
            if fi is not None:
                if method is not None and method.is_static:
                    self.error(
                        path, e.span,
                        f"field {e.name} is not available in a static method",
                    )
                    return None
                e.field_of = info.name
                return fi.base_type
            self.error(path, e.span, f"unknown name {e.name}")
            return None
        if isinstance(e, ast.FieldRef):
            target_t = self._expr(path, info, method, scope, e.target)
            if target_t is None:
                return None
            cls = self.classes.get(target_t)
            if cls is None:
                self.error(path, e.span, f"type {target_t} has no fields")
                return None
            fi = cls.fields.get(e.name)
            if fi is None:
                self.error(path, e.span, f"{target_t} has no field {e.name}")
                return None
            e.target_class = target_t
            return fi.base_type
        if isinstance(e, ast.Unary):
            t = self._expr(path, info, method, scope, e.operand)
            want = INT if e.op == "-" else BOOLEAN
            if t is not None and t != want:
                self.error(path, e.span, f"operator {e.op} needs {want}, found {t}")
                return None
            return want
        if isinstance(e, ast.Binary):
            lt = self._expr(path, info, method, scope, e.left)
            rt = self._expr(path, info, method, scope, e.right)
            if e.op in ("+", "-", "*", "/", "%"):
                ok = (lt in (None, INT)) and (rt in (None, INT))
                if not ok:
                    self.error(path, e.span, f"operator {e.op} needs int operands")
                return INT
            if e.op in ("<", "<=", ">", ">="):
                if (lt not in (None, INT)) or (rt not in (None, INT)):
                    self.error(path, e.span, f"operator {e.op} needs int operands")
                return BOOLEAN
            if e.op in ("==", "!="):
                if lt is not None and rt is not None and lt != rt:
                    self.error(path, e.span, f"cannot compare {lt} with {rt}")
                return BOOLEAN
            if (lt not in (None, BOOLEAN)) or (rt not in (None, BOOLEAN)):
                self.error(path, e.span, f"operator {e.op} needs boolean operands")
            return BOOLEAN
        if isinstance(e, ast.Call):
            return self._call(path, info, method, scope, e)
        if isinstance(e, ast.New):
            cls = self.classes.get(e.class_name)
            if cls is None:
                self.error(path, e.span, f"unknown class {e.class_name}")
                return None
            ctor = cls.constructor
            params = ctor.params if ctor is not None else []
            self._check_args(path, info, method, scope, e, params, f"constructor of {e.class_name}")
            return e.class_name
        raise TypeError(f"unexpected expression {e!r}")

    def _call(self, path, info, method, scope, e: ast.Call) -> Optional[str]:
        if e.receiver is None:
            target = info.methods.get(e.name)
            if target is None:
                self.error(path, e.span, f"unknown method {e.name}")
                for a in e.args:
                    self._expr(path, info, method, scope, a)
                return None
            if method is not None and method.is_static and not target.is_static:
                self.error(
                    path, e.span,
                    f"instance method {e.name} cannot be called from a static method",
                )
            e.resolved_class = info.name
        else:
            recv_t = self._expr(path, info, method, scope, e.receiver)
            if recv_t is None:
                for a in e.args:
                    self._expr(path, info, method, scope, a)
                return None
            cls = self.classes.get(recv_t)
            target = cls.methods.get(e.name) if cls is not None else None
            if target is None:
                self.error(path, e.span, f"{recv_t} has no method {e.name}")
                for a in e.args:
                    self._expr(path, info, method, scope, a)
                return None
            e.resolved_class = recv_t
        self._check_args(path, info, method, scope, e, target.params, f"method {e.name}")
        return target.return_type


    def _check_args(self, path, info, method, scope, e, params, what) -> None:
        if len(e.args) != len(params):
            self.error(
                path, e.span,
                f"{what} expects {len(params)} argument(s), got {len(e.args)}",
            )
        for arg, p in zip(e.args, params):
            t = self._expr(path, info, method, scope, arg)
            if t is not None and t != p.base_type:
                self.error(
                    path, arg.span,
                    f"argument {p.name} of {what} expects {p.base_type}, found {t}",
                )
