"""Validity and satisfiability for quantifier-free bool + linear-int
formulas.

Architecture: the boolean skeleton is decided by the DPLL core in
`sat`; each full skeleton model asserts a conjunction of inequality
literals that is checked for integer feasibility by `lia`; theory
conflicts are shrunk to minimal cores and come back as blocking
clauses over the inequality atoms until the loop converges.
Equalities are split into inequality pairs up front, disequalities
into strict-inequality disjunctions, so every theory literal is
convex.

SAT verdicts always return a model that has been re-checked by
`evaluate`; `check_validity` re-checks counterexamples the same way.
Verdicts are never guessed: if branch and bound gives up, the result
is Unsupported.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..predicates import (
    AnonValue,
    App,
    Arith,
    BoolLit,
    BoolOp,
    Cmp,
    IntLit,
    Predicate,
    This,
    Unary,
    Var,
    free_vars,
)
from . import sat
from .linear import LeAtom, NonLinear, le_atom, negate_le
from .lia import _Blowup as _LiaBlowup
from .lia import feasible_integer, relaxation_model


class MissingAssignment(Exception):
    pass


class _Unsupported(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


@dataclass(frozen=True)
class SatResult:
    status: str  # "sat" | "unsat" | "unknown"
    model: dict[str, int | bool] | None = None
    reason: str | None = None


@dataclass(frozen=True)
class SolverResult:
    status: str  # "valid" | "invalid" | "unsupported"
    counterexample: dict[str, int | bool] | None = None
    reason: str | None = None

    @property
    def is_valid(self) -> bool:
        return self.status == "valid"


INT = "int"
BOOL = "bool"


def infer_sorts(formulas: list[Predicate]) -> dict[str, str]:
    """Assign int/bool sorts to every free name, or raise _Unsupported."""
    sorts: dict[str, str] = {}
    pending_eqs: list[tuple[Predicate, Predicate]] = []

    def assign(name: str, sort: str):
        old = sorts.get(name)
        if old is None:
            sorts[name] = sort
        elif old != sort:
            raise _Unsupported(f"variable {name} used as both int and bool")

    def walk(p: Predicate, expected: str):
        name = _var_name(p)
        if name is not None:
            assign(name, expected)
            return
        if isinstance(p, IntLit):
            if expected != INT:
                raise _Unsupported("integer literal in boolean position")
            return
        if isinstance(p, BoolLit):
            if expected != BOOL:
                raise _Unsupported("boolean literal in integer position")
            return
        if isinstance(p, Unary):
            inner = INT if p.op == "-" else BOOL
            if expected != inner:
                raise _Unsupported(f"operator {p.op} in {expected} position")
            walk(p.operand, inner)
            return
        if isinstance(p, Arith):
            if expected != INT:
                raise _Unsupported("arithmetic in boolean position")
            walk(p.left, INT)
            walk(p.right, INT)
            return
        if isinstance(p, BoolOp):
            if expected != BOOL:
                raise _Unsupported("boolean operator in integer position")
            walk(p.left, BOOL)
            walk(p.right, BOOL)
            return
        if isinstance(p, Cmp):
            if expected != BOOL:
                raise _Unsupported("comparison in integer position")
            if p.op in ("==", "!="):
                pending_eqs.append((p.left, p.right))
            else:
                walk(p.left, INT)
                walk(p.right, INT)
            return
        if isinstance(p, App):
            raise _Unsupported(f"uninterpreted predicate {p.name}(...)")
        raise _Unsupported(f"unknown node {type(p).__name__}")

    for f in formulas:
        walk(f, BOOL)

    # (In)equality operands share an unknown sort; settle them after the
    # definite contexts, defaulting leftovers to int.
    changed = True
    while changed:
        changed = False
        for l, r in pending_eqs:
            sort = _definite_sort(l, sorts) or _definite_sort(r, sorts)
            for side in (l, r):
                name = _var_name(side)
                if name is not None and name not in sorts and sort is not None:
                    sorts[name] = sort
                    changed = True
    for l, r in pending_eqs:
        sort = _definite_sort(l, sorts) or _definite_sort(r, sorts) or INT
        for side in (l, r):
            name = _var_name(side)
            if name is not None and name not in sorts:
                sorts[name] = sort
        ls = _definite_sort(l, sorts) or sort
        rs = _definite_sort(r, sorts) or sort
        if ls != rs:
            raise _Unsupported("equality between int and bool operands")
        walk_sort = ls
        for side in (l, r):
            if _var_name(side) is None:
                walk(side, walk_sort)
    return sorts


def _var_name(p: Predicate) -> str | None:
    if isinstance(p, Var):
        return p.name
    if isinstance(p, AnonValue):
        return "_"
    if isinstance(p, This):
        return "this"
    return None


def _definite_sort(p: Predicate, sorts: dict[str, str]) -> str | None:
    name = _var_name(p)
    if name is not None:
        return sorts.get(name)
    if isinstance(p, (Arith, IntLit)):
        return INT
    if isinstance(p, Unary):
        return INT if p.op == "-" else BOOL
    if isinstance(p, (BoolLit, BoolOp, Cmp)):
        return BOOL
    return None


def _rewrite(p: Predicate, sorts: dict[str, str]) -> Predicate:
    """Split ==/!= so every remaining comparison is a convex inequality."""
    if isinstance(p, BoolOp):
        return BoolOp(p.op, _rewrite(p.left, sorts), _rewrite(p.right, sorts))
    if isinstance(p, Unary) and p.op == "!":
        return Unary("!", _rewrite(p.operand, sorts))
    if isinstance(p, Cmp) and p.op in ("==", "!="):
        sort = _definite_sort(p.left, sorts) or _definite_sort(p.right, sorts) or INT
        if sort == INT:
            if p.op == "==":
                return BoolOp("&&", Cmp("<=", p.left, p.right), Cmp(">=", p.left, p.right))
            return BoolOp("||", Cmp("<", p.left, p.right), Cmp(">", p.left, p.right))
        l = _rewrite(p.left, sorts)
        r = _rewrite(p.right, sorts)
        both = BoolOp("&&", l, r)
        neither = BoolOp("&&", Unary("!", l), Unary("!", r))
        mixed_a = BoolOp("&&", l, Unary("!", r))
        mixed_b = BoolOp("&&", Unary("!", l), r)
        return BoolOp("||", both, neither) if p.op == "==" else BoolOp("||", mixed_a, mixed_b)
    return p


@dataclass
class _Skeleton:
    nvars: int = 0
    clauses: list[list[int]] = field(default_factory=list)
    atom_ids: dict[object, int] = field(default_factory=dict)
    le_of_id: dict[int, LeAtom] = field(default_factory=dict)
    bool_of_id: dict[int, str] = field(default_factory=dict)

    def new_var(self) -> int:
        self.nvars += 1
        return self.nvars

    def atom(self, key: object) -> int:
        if key not in self.atom_ids:
            self.atom_ids[key] = self.new_var()
        return self.atom_ids[key]


def _tseitin(p: Predicate, sk: _Skeleton) -> int | bool:
    """Return a literal for p, or a constant bool when p is constant."""
    if isinstance(p, BoolLit):
        return p.value
    name = _var_name(p)
    if name is not None:
        var = sk.atom(("bvar", name))
        sk.bool_of_id[var] = name
        return var
    if isinstance(p, Unary) and p.op == "!":
        inner = _tseitin(p.operand, sk)
        return (not inner) if isinstance(inner, bool) else -inner
    if isinstance(p, Cmp):
        atom = le_atom(p)
        if isinstance(atom, bool):
            return atom
        var = sk.atom(("le", atom))
        sk.le_of_id[var] = atom
        return var
    if isinstance(p, BoolOp):
        l = _tseitin(p.left, sk)
        r = _tseitin(p.right, sk)
        if p.op == "&&":
            if l is False or r is False:
                return False
            if l is True:
                return r
            if r is True:
                return l
            v = sk.new_var()
            sk.clauses.append([-v, l])
            sk.clauses.append([-v, r])
            sk.clauses.append([v, -l, -r])
            return v
        if l is True or r is True:
            return True
        if l is False:
            return r
        if r is False:
            return l
        v = sk.new_var()
        sk.clauses.append([-v, l, r])
        sk.clauses.append([v, -l])
        sk.clauses.append([v, -r])
        return v
    raise _Unsupported(f"node {type(p).__name__} after rewriting")


def check_sat(formula: Predicate) -> SatResult:
    """Integer/boolean satisfiability of one in-fragment formula."""
    try:
        sorts = infer_sorts([formula])
        rewritten = _rewrite(formula, sorts)
        sk = _Skeleton()
        root = _tseitin(rewritten, sk)
    except (_Unsupported, NonLinear) as e:
        return SatResult("unknown", reason=str(e))

    names = free_vars(formula)
    if isinstance(root, bool):
        if not root:
            return SatResult("unsat")
        model = _default_model(names, sorts)
        _assert_model(formula, model)
        return SatResult("sat", model)

    sk.clauses.append([root])
    while True:
        assignment = sat.solve(sk.clauses, sk.nvars)
        if assignment is None:
            return SatResult("unsat")
        lits: list[tuple[int, LeAtom]] = []
        for var, le in sk.le_of_id.items():
            if assignment[var]:
                lits.append((var, le))
            else:
                lits.append((-var, negate_le(le)))
        status, int_model = feasible_integer(_as_constraints(lits))
        if status == "unknown":
            return SatResult("unknown", reason="branch-and-bound node cap exceeded")
        if status == "sat":
            model: dict[str, int | bool] = {}
            for name in names:
                if sorts.get(name) == BOOL:
                    bid = sk.atom_ids.get(("bvar", name))
                    model[name] = assignment[bid] if bid is not None else False
                else:
                    model[name] = int_model.get(name, 0) if int_model else 0
            _assert_model(formula, model)
            return SatResult("sat", model)
        if not lits:
            return SatResult("unsat")
        core = _minimize_conflict(lits)
        sk.clauses.append([-lit for lit, _ in core])


def _as_constraints(lits: list[tuple[int, LeAtom]]):
    return [(dict(items), bound) for _, (items, bound) in lits]


def _minimize_conflict(lits: list[tuple[int, LeAtom]]) -> list[tuple[int, LeAtom]]:
    """Deletion-based shrink of an infeasible literal set.

    Blocking a minimal core prunes exponentially more skeleton models
    than blocking the full assignment, which keeps the lazy loop from
    enumerating boolean models one by one.  A literal is dropped only
    when the remainder is still provably integer-infeasible (rational
    infeasibility is checked first as the cheap sufficient test).
    """
    core = list(lits)
    i = 0
    while i < len(core) and len(core) > 1:
        trial = core[:i] + core[i + 1:]
        cons = _as_constraints(trial)
        try:
            if relaxation_model(cons) is None:
                core = trial
                continue
        except _LiaBlowup:
            i += 1
            continue
        status, _ = feasible_integer(cons, node_cap=500)
        if status == "unsat":
            core = trial
        else:
            i += 1
    return core


def _default_model(names, sorts) -> dict[str, int | bool]:
    return {n: False if sorts.get(n) == BOOL else 0 for n in names}


def _assert_model(formula: Predicate, model: dict[str, int | bool]) -> None:
    if evaluate(formula, model) is not True:
        raise RuntimeError(f"solver produced a bad model {model!r}")


def check_validity(hypothesis: Predicate, goal: Predicate) -> SolverResult:
    """Valid iff hypothesis && !goal has no integer/boolean model."""
    query = BoolOp("&&", hypothesis, Unary("!", goal))
    res = check_sat(query)
    if res.status == "unsat":
        return SolverResult("valid")
    if res.status == "unknown":
        return SolverResult("unsupported", reason=res.reason)
    relevant = free_vars(hypothesis) | free_vars(goal)
    cex = {n: v for n, v in res.model.items() if n in relevant}
    if evaluate(hypothesis, _fill(cex, hypothesis)) is not True:
        raise RuntimeError("counterexample does not satisfy the hypothesis")
    if evaluate(goal, _fill(cex, goal)) is not False:
        raise RuntimeError("counterexample does not falsify the goal")
    return SolverResult("invalid", counterexample=cex)


def _fill(model: dict, p: Predicate) -> dict:
    # Restriction never drops names; this guards evaluate against
    # variables that occur in only one side.
    out = dict(model)
    for n in free_vars(p):
        out.setdefault(n, 0)
    return out


def evaluate(p: Predicate, model: dict[str, int | bool]):
    """Standard evaluation; the independent oracle for solver models."""
    name = _var_name(p)
    if name is not None:
        if name not in model:
            raise MissingAssignment(name)
        return model[name]
    if isinstance(p, (IntLit, BoolLit)):
        return p.value
    if isinstance(p, Unary):
        v = evaluate(p.operand, model)
        return -v if p.op == "-" else not v
    if isinstance(p, Arith):
        l = evaluate(p.left, model)
        r = evaluate(p.right, model)
        return l + r if p.op == "+" else l - r if p.op == "-" else l * r
    if isinstance(p, Cmp):
        l = evaluate(p.left, model)
        r = evaluate(p.right, model)
        if p.op in ("==", "!="):
            same = l == r and isinstance(l, bool) == isinstance(r, bool)
            return same if p.op == "==" else not same
        if p.op == "<":
            return l < r
        if p.op == "<=":
            return l <= r
        if p.op == ">":
            return l > r
        return l >= r
    if isinstance(p, BoolOp):
        l = evaluate(p.left, model)
        return (l and evaluate(p.right, model)) if p.op == "&&" else (
            l or evaluate(p.right, model)
        )
    raise ValueError(f"cannot evaluate {type(p).__name__}")
