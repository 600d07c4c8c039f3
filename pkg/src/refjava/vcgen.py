"""Verification-condition generation over method bodies.

Walks statements threading a TypingEnv: declarations and assignments
are checked against declared refinements and then recorded as equality
facts, branches are merged under guarded disjunctions, loop bodies are
checked from a havocked environment (declared refinements are the
implicit invariant), and call sites are checked parameter by parameter
with the callee's formals bound to the actuals.

Checking always continues past a failure: the failed variable falls
back to its declared refinement, so one broken assignment does not
hide later errors.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

from .annotations import CONSTRUCTOR, AnnotationIndex
from .diagnostics import ANNOTATION, Diagnostic
from .frontend import ast
from .frontend.typecheck import ClassInfo, ProgramInfo
from .predicates import (
    BoolOp,
    Cmp,
    Predicate,
    TRUE,
    Unary,
    Var,
    free_vars,
    substitute,
)
from .typing_core import (
    ContractOracle,
    DiagnosticFactory,
    RefinedType,
    TypingEnv,
    check_subtype,
    display_group,
    strongest_refinement,
    translate_term,
)


class _Oracle(ContractOracle):
    def __init__(self, info: ProgramInfo, index: AnnotationIndex):
        self.info = info
        self.index = index

    def call_summary(self, call: ast.Call):
        if call.resolved_class is None:
            return None
        contract = self.index.contract(call.resolved_class, call.name)
        if contract is None:
            return None
        return contract.param_names, contract.return_reft

    def field_refinement(self, class_name, field_name):
        return self.index.field_refinement(class_name, field_name)


@dataclass
class _Ctx:
    info: ProgramInfo
    index: AnnotationIndex
    factory: DiagnosticFactory
    oracle: _Oracle
    vc_sink: Optional[list]
    diagnostics: list[Diagnostic]
    return_reft: Optional[RefinedType]

    def subtype(self, env, found, expected, span, **kw) -> bool:
        d = check_subtype(
            env, found, expected, span, self.factory, vc_sink=self.vc_sink, **kw
        )
        if d is not None:
            self.diagnostics.append(d)
            return False
        return True


def check_class(
    path: str,
    cls: ClassInfo,
    info: ProgramInfo,
    index: AnnotationIndex,
    vc_sink: Optional[list] = None,
) -> list[Diagnostic]:
    """Refinement-check field initializers and every method body."""
    decl = cls.decl
    if decl is None:
        return []
    diagnostics: list[Diagnostic] = []
    factory = DiagnosticFactory(path, info.program.source_map)
    oracle = _Oracle(info, index)
    for f in decl.fields:
        if f.init is None:
            continue
        ctx = _Ctx(info, index, factory, oracle, vc_sink, [], None)
        env = TypingEnv()
        ctx.diagnostics.extend(_expr_obligations(ctx, env, f.init))
        reft = index.field_refinement(cls.name, f.name)
        if reft is not None and not reft.is_trivial():
            found = substitute(
                strongest_refinement(env, f.init, oracle), {"_": Var(f.name)}
            )
            ctx.subtype(
                env, found, reft.instantiate(f.name), f.span,
                expected_display=display_group(reft.instantiate(f.name)),
            )
        diagnostics.extend(ctx.diagnostics)
    for m in decl.methods + decl.constructors:
        diagnostics.extend(check_method(path, cls, m, info, index, vc_sink))
    return diagnostics


def check_method(
    path: str,
    cls: ClassInfo,
    m: ast.MethodDecl,
    info: ProgramInfo,
    index: AnnotationIndex,
    vc_sink: Optional[list] = None,
) -> list[Diagnostic]:
    if m.body is None:
        return []
    factory = DiagnosticFactory(path, info.program.source_map)
    contract = index.contract(cls.name, CONSTRUCTOR if m.is_constructor else m.name)
    ctx = _Ctx(
        info, index, factory, _Oracle(info, index), vc_sink, [],
        contract.return_reft if contract else None,
    )
    env = TypingEnv()
    for p in m.params:
        reft = contract.param_refts.get(p.name) if contract else None
        fact = reft.instantiate(p.name) if reft is not None else TRUE
        env = env.bind(p.name, p.base_type, fact, declared=reft)
    _check_stmt(ctx, env, m.body)
    return ctx.diagnostics


# -- statements ---------------------------------------------------------------


def _check_stmt(ctx: _Ctx, env: TypingEnv, s: ast.Stmt) -> TypingEnv:
    if isinstance(s, ast.Block):
        return _check_block(ctx, env, s)
    if isinstance(s, ast.LocalDecl):
        return _check_local(ctx, env, s)
    if isinstance(s, ast.Assign):
        return _check_assign(ctx, env, s)
    if isinstance(s, ast.If):
        return _check_if(ctx, env, s)
    if isinstance(s, ast.While):
        return _check_while(ctx, env, s)
    if isinstance(s, ast.Return):
        return _check_return(ctx, env, s)
    if isinstance(s, ast.ExprStmt):
        ctx.diagnostics.extend(_expr_obligations(ctx, env, s.expr))
        return env
    raise TypeError(f"unexpected statement {s!r}")


def _check_block(ctx, env, block: ast.Block) -> TypingEnv:
    before = env.names()
    for inner in block.stmts:
        env = _check_stmt(ctx, env, inner)
    # Locals going out of scope become anonymous ghosts: their facts may
    # still support facts about surviving variables.
    for name in sorted(env.names() - before):
        _, env = env.rename_away(name)
    return env


def _check_local(ctx, env, s: ast.LocalDecl) -> TypingEnv:
    reft = ctx.index.local_refinement(s)
    if reft is not None:
        loose = free_vars(reft.refinement) - {"_"} - env.names()
        if loose:
            ctx.diagnostics.append(
                ctx.factory.make(
                    ANNOTATION, s.span,
                    message=f"unknown name {sorted(loose)[0]} in refinement of {s.name}",
                )
            )
            reft = None
    if s.init is not None:
        ctx.diagnostics.extend(_expr_obligations(ctx, env, s.init))
        found = substitute(
            strongest_refinement(env, s.init, ctx.oracle), {"_": Var(s.name)}
        )
        if reft is not None and not reft.is_trivial():
            expected = reft.instantiate(s.name)
            ok = ctx.subtype(
                env, found, expected, s.span,
                expected_display=display_group(expected),
            )
            fact = found if ok else expected
        else:
            fact = found
    else:
        fact = reft.instantiate(s.name) if reft is not None else TRUE
    return env.bind(s.name, s.base_type, fact, declared=reft)


def _check_assign(ctx, env, s: ast.Assign) -> TypingEnv:
    ctx.diagnostics.extend(_expr_obligations(ctx, env, s.value))
    target = s.target
    if isinstance(target, ast.VarRef) and target.field_of is None:
        return _assign_var(ctx, env, s, target.name)
    return _assign_field(ctx, env, s)


def _assign_var(ctx, env, s: ast.Assign, name: str) -> TypingEnv:
    binding = env.lookup(name)
    found0 = strongest_refinement(env, s.value, ctx.oracle)
    referenced = name in free_vars(found0) or any(
        name in free_vars(b.fact) for b in env.bindings if b.name != name
    ) or any(name in free_vars(p) for p in env.path_condition)
    if binding.fact != TRUE or referenced:
        ghost, env = env.rename_away(name)
        found0 = substitute(found0, {name: Var(ghost)})
    fact = substitute(found0, {"_": Var(name)})
    declared = binding.declared
    if declared is not None and not declared.is_trivial():
        expected = declared.instantiate(name)
        ok = ctx.subtype(
            env, fact, expected, s.span, expected_display=display_group(expected)
        )
        if not ok:
            fact = expected  # error recovery: trust the declaration
    return env.bind(name, binding.base, fact, declared=declared)


def _assign_field(ctx, env, s: ast.Assign) -> TypingEnv:
    target = s.target
    if isinstance(target, ast.FieldRef):
        ctx.diagnostics.extend(_expr_obligations(ctx, env, target.target))
        cls, fname = target.target_class, target.name
    else:
        cls, fname = target.field_of, target.name
    reft = ctx.index.field_refinement(cls, fname) if cls else None
    if reft is None or reft.is_trivial():
        return env
    if env.lookup(fname) is None:
        v = fname
    else:
        v, env = env.fresh(fname)
    found = substitute(
        strongest_refinement(env, s.value, ctx.oracle), {"_": Var(v)}
    )
    expected = reft.instantiate(v)
    ctx.subtype(
        env, found, expected, s.span,
        expected_display=display_group(reft.instantiate(fname)),
        found_display=display_group(substitute(found, {v: Var(fname)})),
    )
    return env


def _check_if(ctx, env, s: ast.If) -> TypingEnv:
    ctx.diagnostics.extend(_expr_obligations(ctx, env, s.cond))
    pc = translate_term(s.cond)
    pre_names = env.names()

    env_then = env.assume(pc) if pc is not None else env
    env1 = _check_stmt(ctx, env_then, s.then_branch)

    env_else = env if pc is None else env.assume(Unary("!", pc))
    env_else = replace(env_else, fresh_counter=env1.fresh_counter)
    env2 = (
        _check_stmt(ctx, env_else, s.else_branch)
        if s.else_branch is not None
        else env_else
    )

    merged = replace(env, fresh_counter=env2.fresh_counter)
    for b in env.bindings:
        f1 = env1.lookup(b.name).fact
        f2 = env2.lookup(b.name).fact
        if f1 == f2:
            fact = f1
        elif pc is not None:
            fact = BoolOp(
                "||", BoolOp("&&", pc, f1), BoolOp("&&", Unary("!", pc), f2)
            )
        else:
            fact = BoolOp("||", f1, f2)
        merged = merged.bind(b.name, b.base, fact, declared=b.declared)
    # Ghosts introduced inside a branch hold only along it.
    for branch_env, guard in ((env1, pc), (env2, _negate(pc))):
        for b in branch_env.bindings:
            if b.name in pre_names or merged.lookup(b.name) is not None:
                continue
            if guard is None or b.fact == TRUE:
                fact = TRUE
            else:
                fact = BoolOp("||", BoolOp("&&", guard, b.fact), _negate(guard))
            merged = merged.bind(b.name, b.base, fact)
    return merged


def _negate(p: Optional[Predicate]) -> Optional[Predicate]:
    if p is None:
        return None
    return p.operand if isinstance(p, Unary) and p.op == "!" else Unary("!", p)


def _check_while(ctx, env, s: ast.While) -> TypingEnv:
    assigned = _assigned_vars(s.body) & env.names()
    env_h = env.havoc(assigned)
    ctx.diagnostics.extend(_expr_obligations(ctx, env_h, s.cond))
    pc = translate_term(s.cond)

    env_body = env_h.assume(pc) if pc is not None else env_h
    env_after = _check_stmt(ctx, env_body, s.body)

    out = replace(env_h, fresh_counter=env_after.fresh_counter)
    if pc is not None:
        out = out.assume(_negate(pc))
    return out


def _check_return(ctx, env, s: ast.Return) -> TypingEnv:
    if s.value is None:
        return env
    ctx.diagnostics.extend(_expr_obligations(ctx, env, s.value))
    reft = ctx.return_reft
    if reft is None or reft.is_trivial():
        return env
    found = strongest_refinement(env, s.value, ctx.oracle)
    # `_` stays the value variable in return position.
    ctx.subtype(
        env, found, reft.refinement, s.span,
        expected_display=display_group(reft.refinement),
    )
    return env


def _assigned_vars(s: ast.Stmt) -> set[str]:
    out: set[str] = set()
    stack = [s]
    while stack:
        cur = stack.pop()
        if isinstance(cur, ast.Assign):
            if isinstance(cur.target, ast.VarRef) and cur.target.field_of is None:
                out.add(cur.target.name)
        elif isinstance(cur, ast.Block):
            stack.extend(cur.stmts)
        elif isinstance(cur, ast.If):
            stack.append(cur.then_branch)
            if cur.else_branch is not None:
                stack.append(cur.else_branch)
        elif isinstance(cur, ast.While):
            stack.append(cur.body)
    return out


# -- call obligations -----------------------------------------------------------


def _expr_obligations(ctx, env, e: ast.Expr) -> list[Diagnostic]:
    """Check every call site inside e, arguments before the call itself."""
    out: list[Diagnostic] = []
    if isinstance(e, ast.Unary):
        out += _expr_obligations(ctx, env, e.operand)
    elif isinstance(e, ast.Binary):
        out += _expr_obligations(ctx, env, e.left)
        out += _expr_obligations(ctx, env, e.right)
    elif isinstance(e, ast.FieldRef):
        out += _expr_obligations(ctx, env, e.target)
    elif isinstance(e, ast.Call):
        if e.receiver is not None:
            out += _expr_obligations(ctx, env, e.receiver)
        for a in e.args:
            out += _expr_obligations(ctx, env, a)
        if e.resolved_class is not None:
            contract = ctx.index.contract(e.resolved_class, e.name)
            out += _check_call_args(ctx, env, e, contract)
    elif isinstance(e, ast.New):
        for a in e.args:
            out += _expr_obligations(ctx, env, a)
        contract = ctx.index.contract(e.class_name, CONSTRUCTOR)
        out += _check_call_args(ctx, env, e, contract)
    return out


def _check_call_args(ctx, env, call, contract) -> list[Diagnostic]:
    """One check per refined parameter, formals bound to actuals.

    The hypothesis accumulates the earlier parameters' equality facts,
    so the report for a failing parameter shows, verbatim, `(b == 2) &&
    (a == 10)` against the declared `(b > a)`.
    """
    if contract is None or not contract.param_refts:
        return []
    out: list[Diagnostic] = []
    args = call.args
    # Fresh stand-ins when a formal name collides with a caller binding;
    # displays always use the declared names.
    vc_names: dict[str, Predicate] = {}
    env_c = env
    for p in contract.param_names:
        if env.lookup(p) is not None:
            fresh, env_c = env_c.fresh(p)
            vc_names[p] = Var(fresh)
    display_facts: list[Predicate] = []
    for i, p in enumerate(contract.param_names):
        if i >= len(args):
            break
        arg = args[i]
        at = translate_term(arg)
        if at is not None:
            fact_display = Cmp("==", Var(p), at)
        else:
            fact_display = substitute(
                strongest_refinement(env, arg, ctx.oracle), {"_": Var(p)}
            )
        fact_vc = substitute(fact_display, vc_names)
        base = "int" if arg.base_type is None else arg.base_type
        vc_p = vc_names.get(p, Var(p))
        if env_c.lookup(vc_p.name) is None:
            env_c = env_c.bind(vc_p.name, base, TRUE)
        reft = contract.param_refts.get(p)
        if reft is not None and not reft.is_trivial():
            expected_disp = reft.instantiate(p)
            expected_vc = substitute(expected_disp, vc_names)
            parts = [display_group(fact_display)]
            parts += [display_group(f) for f in reversed(display_facts)]
            d = check_subtype(
                env_c, fact_vc, expected_vc, call.span, ctx.factory,
                expected_display=display_group(expected_disp),
                found_display=" && ".join(parts),
                vc_sink=ctx.vc_sink,
            )
            if d is not None:
                out.append(d)
        if fact_vc != TRUE:
            env_c = env_c.assume(fact_vc)
            display_facts.append(fact_display)
    return out

