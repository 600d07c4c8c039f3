"""Refined types, typing environments, and subtyping-as-implication.

The environment is a persistent value: every operation returns a new
env, so checking different methods (or branches) can share prefixes
freely.  Facts are predicates over the bound variable's own name;
reassignment renames the old incarnation to a ghost (`x$1`) so earlier
facts keep talking about the value they described.

A subtype check `found <: expected` is the implication

    env facts  &&  path condition  &&  found   =>   expected

decided by the solver over unbounded integers.  Failures carry the VC
plus the two display strings the renderer prints verbatim.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

from . import diagnostics as diag
from .frontend import ast
from .predicates import (
    AnonValue,
    Arith,
    BoolLit,
    BoolOp,
    Cmp,
    IntLit,
    Predicate,
    TRUE,
    Unary,
    Var,
    conj,
    free_vars,
    substitute,
    to_source,
)
from .solver import check_validity
from .spans import Span


class UnboundVariable(Exception):
    def __init__(self, name: str):
        super().__init__(name)
        self.name = name


@dataclass(frozen=True)
class RefinedType:
    """A base type constrained by a predicate over the anonymous value."""

    base: str
    refinement: Predicate  # alias-free, over `_`

    def instantiate(self, name: str) -> Predicate:
        return substitute(self.refinement, {"_": Var(name)})

    def is_trivial(self) -> bool:
        return self.refinement == TRUE


@dataclass(frozen=True)
class Binding:
    name: str
    base: str
    fact: Predicate  # over the binding's own name
    declared: Optional[RefinedType] = None


@dataclass(frozen=True)
class TypingEnv:
    bindings: tuple[Binding, ...] = ()
    path_condition: tuple[Predicate, ...] = ()
    fresh_counter: int = 0

    # -- construction --------------------------------------------------------

    def bind(self, name, base, fact, declared=None) -> "TypingEnv":
        new = Binding(name, base, fact, declared)
        for i, b in enumerate(self.bindings):
            if b.name == name:
                return replace(
                    self, bindings=self.bindings[:i] + (new,) + self.bindings[i + 1:]
                )
        return replace(self, bindings=self.bindings + (new,))

    def assume(self, p: Predicate) -> "TypingEnv":
        if p == TRUE:
            return self
        for v in free_vars(p):
            if v != "_" and self.lookup(v) is None:
                raise UnboundVariable(v)
        return replace(self, path_condition=self.path_condition + (p,))

    def havoc(self, names) -> "TypingEnv":
        """Drop flow facts, keeping only declared refinements."""
        out = []
        for b in self.bindings:
            if b.name in names:
                fact = b.declared.instantiate(b.name) if b.declared else TRUE
                out.append(replace(b, fact=fact))
            else:
                out.append(b)
        return replace(self, bindings=tuple(out))

    def fresh(self, prefix: str) -> tuple[str, "TypingEnv"]:
        n = self.fresh_counter + 1
        return f"{prefix}${n}", replace(self, fresh_counter=n)

    def rename_away(self, name: str) -> tuple[str, "TypingEnv"]:
        """Turn the current incarnation of `name` into a ghost binding.

        Every fact and path conjunct that referred to `name` now refers
        to the ghost; the caller rebinds `name` for the new value.
        """
        ghost, env = self.fresh(name)
        mapping = {name: Var(ghost)}
        out = []
        for b in env.bindings:
            fact = substitute(b.fact, mapping)
            if b.name == name:
                out.append(Binding(ghost, b.base, fact, None))
            else:
                out.append(replace(b, fact=fact))
        path = tuple(substitute(p, mapping) for p in env.path_condition)
        return ghost, replace(env, bindings=tuple(out), path_condition=path)

    def drop(self, names) -> "TypingEnv":
        return replace(
            self, bindings=tuple(b for b in self.bindings if b.name not in names)
        )

    # -- queries ---------------------------------------------------------------

    def lookup(self, name: str) -> Optional[Binding]:
        for b in self.bindings:
            if b.name == name:
                return b
        return None

    def names(self) -> set[str]:
        return {b.name for b in self.bindings}

    def facts(self) -> list[Predicate]:
        return [b.fact for b in self.bindings if b.fact != TRUE]

    def hypothesis(self, found: Predicate) -> Predicate:
        return conj(self.facts() + list(self.path_condition) + [found])


@dataclass(frozen=True)
class VC:
    """One verification condition: hypothesis entails goal."""

    hypothesis: Predicate
    goal: Predicate
    origin: Span
    expected_display: str
    found_display: str

    def hypothesis_text(self) -> str:
        return to_source(self._relevant_hypothesis())

    def goal_text(self) -> str:
        return to_source(self.goal)

    def render(self) -> str:
        return f"{self.hypothesis_text()} ⊢ {self.goal_text()}"

    def _relevant_hypothesis(self) -> Predicate:
        """Hypothesis restricted to conjuncts sharing variables with the
        goal (transitively).  Solving always uses the full hypothesis;
        this only keeps hover output readable."""
        parts = _conjuncts(self.hypothesis)
        vars_of = [free_vars(p) for p in parts]
        reached = set(free_vars(self.goal))
        included = [False] * len(parts)
        changed = True
        while changed:
            changed = False
            for i, vs in enumerate(vars_of):
                if not included[i] and vs & reached:
                    included[i] = True
                    reached |= vs
                    changed = True
        chosen = [p for p, inc in zip(parts, included) if inc]
        return conj(chosen) if chosen else self.hypothesis


def _conjuncts(p: Predicate) -> list[Predicate]:
    if isinstance(p, BoolOp) and p.op == "&&":
        return _conjuncts(p.left) + _conjuncts(p.right)
    return [p]


def display_group(p: Predicate) -> str:
    return f"({to_source(p)})"


def found_display_of(found: Predicate, env: TypingEnv) -> str:
    parts = [display_group(found)]
    parts += [display_group(p) for p in env.path_condition]
    return " && ".join(parts)


class DiagnosticFactory:
    """Mints positioned diagnostics for one checked file."""

    def __init__(self, file: str, source_map):
        self.file = file
        self.source_map = source_map

    def make(self, kind, span, message="", expected=None, found=None, vc=None):
        sl, sc, el, ec = self.source_map.position(self.file, span)
        return diag.Diagnostic(
            file=self.file, span=span, kind=kind, message=message,
            expected_display=expected, found_display=found, vc=vc,
            start_line=sl, start_col=sc, end_line=el, end_col=ec,
        )


def check_subtype(
    env: TypingEnv,
    found: Predicate,
    expected: Predicate,
    origin: Span,
    factory: DiagnosticFactory,
    expected_display: Optional[str] = None,
    found_display: Optional[str] = None,
    kind: str = diag.REFINEMENT,
    vc_sink: Optional[list] = None,
) -> Optional[diag.Diagnostic]:
    """ok (None) iff env ∧ found ⇒ expected holds over the integers."""
    expected_display = expected_display or display_group(expected)
    found_display = found_display or found_display_of(found, env)
    hypothesis = env.hypothesis(found)
    vc = VC(hypothesis, expected, origin, expected_display, found_display)
    if vc_sink is not None:
        vc_sink.append(vc)
    result = check_validity(hypothesis, expected)
    if result.status == "valid":
        return None
    message = f"expected {expected_display}, found {found_display}"
    if result.status == "unsupported":
        message += f" (not decidable in the refinement fragment: {result.reason})"
    return factory.make(
        kind, origin, message=message,
        expected=expected_display, found=found_display, vc=vc,
    )


# -- strongest refinements ----------------------------------------------------


class ContractOracle:
    """What strongest_refinement needs to know about the wider program."""

    def call_summary(self, call: ast.Call) -> Optional[tuple[list[str], Optional[RefinedType]]]:
        raise NotImplementedError

    def field_refinement(self, class_name: str, field_name: str) -> Optional[RefinedType]:
        raise NotImplementedError


def translate_term(e: ast.Expr) -> Optional[Predicate]:
    """Linear-fragment translation of a program expression, or None.

    Only locals/params become variables; field reads, calls, division,
    modulo, and reference comparisons are out of fragment.
    """
    if isinstance(e, ast.IntLitE):
        return IntLit(e.value)
    if isinstance(e, ast.BoolLitE):
        return BoolLit(e.value)
    if isinstance(e, ast.VarRef):
        return None if e.field_of is not None else Var(e.name)
    if isinstance(e, ast.Unary):
        t = translate_term(e.operand)
        return None if t is None else Unary(e.op, t)
    if isinstance(e, ast.Binary):
        if e.op in ("/", "%"):
            return None
        if e.op in ("==", "!=") and e.left.base_type not in ("int", "boolean"):
            return None
        l = translate_term(e.left)
        r = translate_term(e.right)
        if l is None or r is None:
            return None
        if e.op in ("+", "-"):
            return Arith(e.op, l, r)
        if e.op == "*":
            if free_vars(l) and free_vars(r):
                return None
            return Arith("*", l, r)
        if e.op in ("==", "!=", "<", "<=", ">", ">="):
            return Cmp(e.op, l, r)
        return BoolOp(e.op, l, r)
    return None


def strongest_refinement(
    env: TypingEnv, e: ast.Expr, oracle: ContractOracle
) -> Predicate:
    """Most precise predicate over `_` the checker can claim for e."""
    t = translate_term(e)
    if t is not None:
        return Cmp("==", AnonValue(), t)
    if isinstance(e, ast.Call):
        summary = oracle.call_summary(e)
        if summary is None:
            return TRUE
        params, ret = summary
        if ret is None or ret.is_trivial():
            return TRUE
        mapping: dict[str, Predicate] = {}
        for p, arg in zip(params, e.args):
            at = translate_term(arg)
            if at is not None:
                mapping[p] = at
        needed = free_vars(ret.refinement) - {"_"}
        if any(n in needed and n not in mapping for n in params):
            return TRUE  # an actual escaped the fragment
        return substitute(ret.refinement, mapping)
    if isinstance(e, ast.FieldRef) or (
        isinstance(e, ast.VarRef) and e.field_of is not None
    ):
        cls = e.target_class if isinstance(e, ast.FieldRef) else e.field_of
        name = e.name
        reft = oracle.field_refinement(cls, name) if cls else None
        if reft is None or reft.is_trivial():
            return TRUE
        if free_vars(reft.refinement) - {"_"}:
            return TRUE  # heap facts about other fields are not tracked
        return reft.refinement
    return TRUE
