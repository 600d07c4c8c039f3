"""Object-state protocol checking.

A class annotated with @StateSet declares disjoint abstract states;
each method's @StateRefinement(from=..., to=...) narrows where it may
be called and which single state it leaves the object in.  Checking is
finite-state and solver-free: each tracked local carries the set of
states it may currently be in, merges take unions, loops iterate to a
fixpoint over the powerset lattice, and a call is legal only if every
possible current state satisfies the `from` formula.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .diagnostics import ANNOTATION, PROTOCOL, Diagnostic
from .frontend import ast
from .frontend.typecheck import ClassInfo, ProgramInfo
from .predicates import (
    App,
    BoolOp,
    Predicate,
    PredicateError,
    This,
    parse_predicate,
)
from .typing_core import DiagnosticFactory

UNTRACKED = None  # sentinel possible-state set


@dataclass(frozen=True)
class Transition:
    from_states: Optional[frozenset[str]]  # None: callable in any state
    to_state: Optional[str]  # None: state preserved
    from_display: Optional[str] = None


@dataclass
class ClassProtocol:
    class_name: str
    states: list[str]
    transitions: dict[str, Transition] = field(default_factory=dict)
    constructor_to: Optional[str] = None

    def all_states(self) -> frozenset[str]:
        return frozenset(self.states)


def parse_state_formula(
    payload: ast.Payload, states: list[str]
) -> Union[frozenset[str], str]:
    """Parse a from/to payload into the set of satisfying states.

    Returns an error message string when the payload is not a
    disjunction of `state(this)` atoms over declared states.
    """
    try:
        pred = parse_predicate(payload.text)
    except PredicateError as e:
        return f"bad state formula: {e.message}"
    atoms: list[Predicate] = []
    stack = [pred]
    while stack:
        node = stack.pop()
        if isinstance(node, BoolOp) and node.op == "||":
            stack.append(node.left)
            stack.append(node.right)
        elif isinstance(node, App):
            atoms.append(node)
        else:
            return "state formulas must be disjunctions of state(this) atoms"
    names = []
    for atom in atoms:
        if len(atom.args) != 1 or not isinstance(atom.args[0], This):
            return f"state predicate {atom.name} must be applied to 'this'"
        if atom.name not in states:
            return f"unknown state {atom.name}"
        names.append(atom.name)
    return frozenset(names)


def build_protocol(
    cls: ClassInfo, factory: DiagnosticFactory
) -> tuple[Optional[ClassProtocol], list[Diagnostic]]:
    """The class's DFA, or None when it declares no @StateSet."""
    source = cls.annotation_source
    if source is None:
        return None, []
    state_sets = [a for a in source.annotations if a.kind == ast.STATE_SET]
    diagnostics: list[Diagnostic] = []
    if not state_sets:
        return None, []
    if len(state_sets) > 1:
        diagnostics.append(
            factory.make(ANNOTATION, state_sets[1].span, message="duplicate @StateSet")
        )
    states: list[str] = []
    for payload in state_sets[0].payloads:
        if payload.text in states:
            diagnostics.append(
                factory.make(
                    ANNOTATION, payload.full_span(),
                    message=f"duplicate state {payload.text}",
                )
            )
        else:
            states.append(payload.text)
    protocol = ClassProtocol(cls.name, states)

    members = list(cls.methods.values())
    if cls.constructor is not None:
        members.append(cls.constructor)
    for m in members:
        anns = m.state_annotations
        if not anns:
            continue
        if len(anns) > 1:
            diagnostics.append(
                factory.make(
                    ANNOTATION, anns[1].span,
                    message=f"method {m.name} carries more than one @StateRefinement",
                )
            )
        ann = anns[0]
        span = ann.span
        from_states = None
        from_display = None
        to_state = None
        fp = ann.payload("from")
        if fp is not None:
            parsed = parse_state_formula(fp, states)
            if isinstance(parsed, str):
                diagnostics.append(factory.make(ANNOTATION, fp.full_span(), message=parsed))
            else:
                from_states = parsed
                from_display = fp.text
        tp = ann.payload("to")
        if tp is not None:
            parsed = parse_state_formula(tp, states)
            if isinstance(parsed, str):
                diagnostics.append(factory.make(ANNOTATION, tp.full_span(), message=parsed))
            elif len(parsed) != 1:
                diagnostics.append(
                    factory.make(
                        ANNOTATION, tp.full_span(),
                        message="'to' must denote exactly one state",
                    )
                )
            else:
                (to_state,) = parsed
        if fp is None and tp is None:
            diagnostics.append(
                factory.make(ANNOTATION, span, message="@StateRefinement needs from= or to=")
            )
        if m is cls.constructor:
            protocol.constructor_to = to_state
        else:
            protocol.transitions[m.name] = Transition(from_states, to_state, from_display)
    return protocol, diagnostics


def build_protocols(
    info: ProgramInfo,
) -> tuple[dict[str, ClassProtocol], list[Diagnostic]]:
    protocols: dict[str, ClassProtocol] = {}
    diagnostics: list[Diagnostic] = []
    for name in sorted(info.classes):
        cls = info.classes[name]
        factory = DiagnosticFactory(cls.file or "<external>", info.program.source_map)
        if cls.file == "" and cls.annotation_source is None:
            continue  # opaque auxiliary class
        protocol, diags = build_protocol(cls, factory)
        diagnostics.extend(diags)
        if protocol is not None:
            protocols[name] = protocol
    return protocols, diagnostics


def state_names(info: ProgramInfo) -> frozenset[str]:
    names: set[str] = set()
    for cls in info.classes.values():
        source = cls.annotation_source
        if source is None:
            continue
        for a in source.annotations:
            if a.kind == ast.STATE_SET:
                names.update(p.text for p in a.payloads)
    return frozenset(names)


# -- usage checking ------------------------------------------------------------


StateSet = Optional[frozenset[str]]  # None = untracked


@dataclass
class _PEnv:
    states: dict[str, StateSet] = field(default_factory=dict)

    def copy(self) -> "_PEnv":
        return _PEnv(dict(self.states))

    def merge(self, other: "_PEnv") -> "_PEnv":
        out: dict[str, StateSet] = {}
        for name in set(self.states) | set(other.states):
            a = self.states.get(name, UNTRACKED)
            b = other.states.get(name, UNTRACKED)
            out[name] = a | b if (a is not None and b is not None) else UNTRACKED
        return _PEnv(out)


def check_protocol_usage(
    path: str,
    m: ast.MethodDecl,
    info: ProgramInfo,
    protocols: dict[str, ClassProtocol],
) -> list[Diagnostic]:
    if m.body is None or not protocols:
        return []
    factory = DiagnosticFactory(path, info.program.source_map)
    checker = _UsageChecker(info, protocols, factory)
    env = _PEnv()
    for p in m.params:
        protocol = protocols.get(p.base_type)
        if protocol is None:
            continue
        start: StateSet = protocol.all_states()
        if p.annotation is not None and p.annotation.kind == ast.STATE_REFINEMENT:
            fp = p.annotation.payload("from")
            if fp is not None:
                parsed = parse_state_formula(fp, protocol.states)
                if isinstance(parsed, str):
                    checker.diagnostics.append(
                        factory.make(ANNOTATION, fp.full_span(), message=parsed)
                    )
                else:
                    start = frozenset(parsed)
        env.states[p.name] = start
    checker.stmt(env, m.body, emit=True)
    return checker.diagnostics


class _UsageChecker:
    def __init__(self, info, protocols, factory):
        self.info = info
        self.protocols = protocols
        self.factory = factory
        self.diagnostics: list[Diagnostic] = []

    # -- statements -------------------------------------------------------

    def stmt(self, env: _PEnv, s: ast.Stmt, emit: bool) -> _PEnv:
        if isinstance(s, ast.Block):
            for inner in s.stmts:
                env = self.stmt(env, inner, emit)
            return env
        if isinstance(s, ast.LocalDecl):
            if s.init is not None:
                env = self.expr(env, s.init, emit)
                env.states[s.name] = self.value_states(env, s.init, consume=True)
            elif s.base_type in self.protocols:
                env.states[s.name] = UNTRACKED
            return env
        if isinstance(s, ast.Assign):
            env = self.expr(env, s.value, emit)
            if isinstance(s.target, ast.VarRef) and s.target.field_of is None:
                if s.target.name in env.states or s.value.base_type in self.protocols:
                    env.states[s.target.name] = self.value_states(
                        env, s.value, consume=True
                    )
            else:
                # Fields are not tracked; storing a tracked object
                # publishes it.
                self.consume(env, s.value)
            return env
        if isinstance(s, ast.If):
            env = self.expr(env, s.cond, emit)
            e1 = self.stmt(env.copy(), s.then_branch, emit)
            e2 = (
                self.stmt(env.copy(), s.else_branch, emit)
                if s.else_branch is not None
                else env.copy()
            )
            return e1.merge(e2)
        if isinstance(s, ast.While):
            head = env.copy()
            while True:
                after = self.stmt(head.copy(), s.body, emit=False)
                after = self.expr_quiet(after, s.cond)
                merged = head.merge(after)
                if merged == head:
                    break
                head = merged
            head2 = self.expr(head.copy(), s.cond, emit)
            final = self.stmt(head2, s.body, emit)
            final = head.merge(final)
            return final
        if isinstance(s, ast.Return):
            if s.value is not None:
                env = self.expr(env, s.value, emit)
                self.consume(env, s.value)
            return env
        if isinstance(s, ast.ExprStmt):
            return self.expr(env, s.expr, emit)
        raise TypeError(f"unexpected statement {s!r}")

    def expr_quiet(self, env: _PEnv, e: ast.Expr) -> _PEnv:
        return self.expr(env, e, emit=False)

    # -- expressions -------------------------------------------------------

    def expr(self, env: _PEnv, e: ast.Expr, emit: bool) -> _PEnv:
        if isinstance(e, ast.Unary):
            return self.expr(env, e.operand, emit)
        if isinstance(e, ast.Binary):
            env = self.expr(env, e.left, emit)
            return self.expr(env, e.right, emit)
        if isinstance(e, ast.FieldRef):
            return self.expr(env, e.target, emit)
        if isinstance(e, ast.New):
            for a in e.args:
                env = self.expr(env, a, emit)
                self.consume(env, a)
            return env
        if isinstance(e, ast.Call):
            if e.receiver is not None:
                env = self.expr(env, e.receiver, emit)
            for a in e.args:
                env = self.expr(env, a, emit)
            for a in e.args:
                self.consume(env, a)
            return self.apply_call(env, e, emit)
        return env

    def value_states(self, env: _PEnv, e: ast.Expr, consume: bool) -> StateSet:
        """Possible states of the value of e, transferring tracking."""
        if isinstance(e, ast.New):
            protocol = self.protocols.get(e.class_name)
            if protocol is None:
                return UNTRACKED
            if protocol.constructor_to is not None:
                return frozenset({protocol.constructor_to})
            return protocol.all_states()
        if isinstance(e, ast.VarRef) and e.field_of is None:
            states = env.states.get(e.name, UNTRACKED)
            if consume and e.name in env.states:
                env.states[e.name] = UNTRACKED
            return states
        return UNTRACKED  # calls, field reads: unknown provenance

    def consume(self, env: _PEnv, e: ast.Expr) -> None:
        """An object escaping through a call loses tracking."""
        if isinstance(e, ast.VarRef) and e.field_of is None and e.name in env.states:
            if e.base_type in self.protocols:
                env.states[e.name] = UNTRACKED

    def apply_call(self, env: _PEnv, e: ast.Call, emit: bool) -> _PEnv:
        recv = e.receiver
        if not isinstance(recv, ast.VarRef) or recv.field_of is not None:
            return env
        states = env.states.get(recv.name, UNTRACKED)
        protocol = self.protocols.get(e.resolved_class or "")
        if protocol is None or states is UNTRACKED:
            return env
        transition = protocol.transitions.get(e.name)
        if transition is None:
            return env
        if transition.from_states is not None:
            offending = sorted(
                s for s in states if s not in transition.from_states
            )
            if offending and emit:
                found = " || ".join(f"({s}(this))" for s in offending)
                expected = f"({transition.from_display})"
                to_part = (
                    f"to {transition.to_state}(this)"
                    if transition.to_state is not None
                    else "state preserved"
                )
                self.diagnostics.append(
                    self.factory.make(
                        PROTOCOL, e.span,
                        message=(
                            f"expected {expected}, found {found}; "
                            f"transition {e.name}: from {transition.from_display}, {to_part}"
                        ),
                        expected=expected,
                        found=found,
                    )
                )
            # Error recovery and narrowing: the call happened, so the
            # object must have been in an accepted state.
            narrowed = states & transition.from_states
            states = narrowed if narrowed else transition.from_states
        env.states[recv.name] = (
            frozenset({transition.to_state})
            if transition.to_state is not None
            else states
        )
        return env
