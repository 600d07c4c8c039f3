"""Shared generators and independent oracles for the test suite.

Everything here is deliberately decoupled from the checker's own code
paths: enumeration oracles evaluate with numpy over boxed domains, the
formula generator builds predicate trees directly, and the tiny
interpreter executes frontend ASTs concretely.
"""

from __future__ import annotations

import itertools
import random

import numpy as np

from refjava.predicates import (
    AnonValue,
    Arith,
    BoolLit,
    BoolOp,
    Cmp,
    IntLit,
    Predicate,
    Unary,
    Var,
)

INT_POOL = ["a", "b", "c", "d"]
BOOL_POOL = ["p", "q"]


def gen_term(rng: random.Random, names: list[str], depth: int = 2) -> Predicate:
    """Random linear integer term over `names` with constants in [-8, 8]."""
    if depth == 0 or rng.random() < 0.35:
        if names and rng.random() < 0.6:
            return Var(rng.choice(names))
        k = rng.randint(0, 8)
        return IntLit(k) if rng.random() < 0.7 or k == 0 else Unary("-", IntLit(k))
    roll = rng.random()
    if roll < 0.4:
        return Arith("+", gen_term(rng, names, depth - 1), gen_term(rng, names, depth - 1))
    if roll < 0.7:
        return Arith("-", gen_term(rng, names, depth - 1), gen_term(rng, names, depth - 1))
    if roll < 0.85 and names:
        coeff = IntLit(rng.randint(1, 8))
        return Arith("*", coeff, Var(rng.choice(names)))
    return Unary("-", gen_term(rng, names, depth - 1))


def gen_formula(
    rng: random.Random,
    max_int_vars: int = 4,
    max_bool_vars: int = 0,
    depth: int = 3,
) -> Predicate:
    ints = INT_POOL[: rng.randint(1, max_int_vars)]
    bools = BOOL_POOL[: rng.randint(0, max_bool_vars)]

    def go(d: int) -> Predicate:
        if d == 0 or rng.random() < 0.3:
            if bools and rng.random() < 0.25:
                return Var(rng.choice(bools))
            op = rng.choice(["==", "!=", "<", "<=", ">", ">="])
            return Cmp(op, gen_term(rng, ints), gen_term(rng, ints))
        roll = rng.random()
        if roll < 0.4:
            return BoolOp("&&", go(d - 1), go(d - 1))
        if roll < 0.8:
            return BoolOp("||", go(d - 1), go(d - 1))
        return Unary("!", go(d - 1))

    return go(depth)


def _np_eval(p: Predicate, env: dict[str, np.ndarray]):
    if isinstance(p, BoolLit):
        return p.value
    if isinstance(p, IntLit):
        return p.value
    if isinstance(p, Var):
        return env[p.name]
    if isinstance(p, AnonValue):
        return env["_"]
    if isinstance(p, Unary):
        v = _np_eval(p.operand, env)
        return -v if p.op == "-" else np.logical_not(v)
    if isinstance(p, Arith):
        l, r = _np_eval(p.left, env), _np_eval(p.right, env)
        return l + r if p.op == "+" else l - r if p.op == "-" else l * r
    if isinstance(p, Cmp):
        l, r = _np_eval(p.left, env), _np_eval(p.right, env)
        return {
            "==": lambda: np.equal(l, r),
            "!=": lambda: np.not_equal(l, r),
            "<": lambda: np.less(l, r),
            "<=": lambda: np.less_equal(l, r),
            ">": lambda: np.greater(l, r),
            ">=": lambda: np.greater_equal(l, r),
        }[p.op]()
    if isinstance(p, BoolOp):
        l, r = _np_eval(p.left, env), _np_eval(p.right, env)
        return np.logical_and(l, r) if p.op == "&&" else np.logical_or(l, r)
    raise ValueError(type(p).__name__)


def _magnitude_order(lo: int, hi: int) -> list[int]:
    return sorted(range(lo, hi + 1), key=lambda v: (abs(v), v < 0))


def enumerate_model(
    formula: Predicate,
    int_names: list[str],
    bool_names: list[str],
    lo: int = -32,
    hi: int = 32,
) -> dict[str, int | bool] | None:
    """First model in the box, searched in order of increasing magnitude.

    Vectorizes the three innermost integer dimensions with numpy and
    walks outer dimensions value by value, so satisfiable formulas exit
    early while exhaustive scans stay fast.
    """
    int_names = sorted(int_names)
    vals = _magnitude_order(lo, hi)
    if len(int_names) > 3:
        outer, inner = int_names[:-3], int_names[-3:]
    else:
        outer, inner = [], int_names

    # int32 is safe: terms here stay within +-few-thousand, and it halves
    # the memory traffic of exhaustive scans.
    grids = np.meshgrid(*(np.array(vals, dtype=np.int32) for _ in inner), indexing="ij")
    flat = {name: g.ravel() for name, g in zip(inner, grids)}
    bool_combos = list(itertools.product([False, True], repeat=len(bool_names)))

    outer_iter = itertools.product(vals, repeat=len(outer)) if outer else [()]
    for outer_vals in outer_iter:
        env_base = {n: np.int32(v) for n, v in zip(outer, outer_vals)}
        for combo in bool_combos:
            env = dict(env_base)
            env.update({n: np.bool_(v) for n, v in zip(bool_names, combo)})
            env.update(flat)
            result = _np_eval(formula, env)
            result = np.asarray(result)
            if result.ndim == 0:
                if bool(result):
                    model: dict[str, int | bool] = {
                        n: int(v) for n, v in zip(outer, outer_vals)
                    }
                    model.update({n: bool(v) for n, v in zip(bool_names, combo)})
                    model.update({n: int(flat[n][0]) for n in inner})
                    return model
                continue
            hits = np.flatnonzero(result)
            if hits.size:
                idx = int(hits[0])
                model = {n: int(v) for n, v in zip(outer, outer_vals)}
                model.update({n: bool(v) for n, v in zip(bool_names, combo)})
                model.update({n: int(flat[n][idx]) for n in inner})
                return model
    return None


# ---------------------------------------------------------------------------
# Socket protocol: independent DFA oracle and program builder

SOCKET_INTERFACE = '''\
@ExternalRefinementsFor("java.net.Socket")
@StateSet({"unconnected", "bound", "connected", "closed"})
interface SocketRefinements {
    @StateRefinement(to="unconnected(this)")
    void Socket();

    @StateRefinement(from="unconnected(this)", to="bound(this)")
    void bind(SocketAddress add);

    @StateRefinement(from="bound(this)", to="connected(this)")
    void connect(SocketAddress add, int timeout);

    @StateRefinement(from="connected(this)")
    void sendUrgentData(int n);

    @StateRefinement(to="closed(this)")
    void close();
}
'''

SOCKET_TRANSITIONS = {
    "bind": (frozenset({"unconnected"}), "bound"),
    "connect": (frozenset({"bound"}), "connected"),
    "sendUrgentData": (frozenset({"connected"}), None),
    "close": (None, "closed"),
}

SOCKET_CALLS = {
    "bind": "s.bind(address);",
    "connect": "s.connect(address, 1000);",
    "sendUrgentData": "s.sendUrgentData(1);",
    "close": "s.close();",
}


def socket_dfa_accepts(sequence: list[str]) -> bool:
    """Explicit DFA simulation, the oracle for protocol acceptance."""
    state = "unconnected"
    for method in sequence:
        from_states, to_state = SOCKET_TRANSITIONS[method]
        if from_states is not None and state not in from_states:
            return False
        if to_state is not None:
            state = to_state
    return True


def socket_program(sequence: list[str]) -> str:
    calls = "\n        ".join(SOCKET_CALLS[m] for m in sequence)
    return (
        SOCKET_INTERFACE
        + "\nclass Main {\n    void run() {\n"
        + "        SocketAddress address = new SocketAddress();\n"
        + "        Socket s = new Socket();\n"
        + ("        " + calls + "\n" if sequence else "")
        + "    }\n}\n"
    )


# ---------------------------------------------------------------------------
# Straight-line annotated methods: generator + concrete interpreter

from refjava.solver import evaluate as _pred_eval
from refjava.frontend import ast as _fst


def _lin_expr_text(rng: random.Random, scope: list[str], depth: int = 2) -> str:
    """Random linear int expression over in-scope variables."""
    if depth == 0 or (rng.random() < 0.4):
        if scope and rng.random() < 0.7:
            return rng.choice(scope)
        return str(rng.randint(-8, 8))
    roll = rng.random()
    a = _lin_expr_text(rng, scope, depth - 1)
    b = _lin_expr_text(rng, scope, depth - 1)
    if roll < 0.45:
        return f"{a} + {b}"
    if roll < 0.8:
        return f"{a} - {b}"
    if scope and roll < 0.95:
        return f"{rng.randint(1, 3)} * {rng.choice(scope)}"
    return f"-({a})"


def _refinement_text(rng: random.Random, own: str, scope: list[str]) -> str:
    """Random refinement over `own` (spelled with its name) and scope."""
    conjuncts = []
    for _ in range(rng.randint(1, 2)):
        op = rng.choice([">=", "<=", ">", "<", "==", "!="])
        rhs = _lin_expr_text(rng, scope, 1)
        conjuncts.append(f"{own} {op} {rhs}")
    return " && ".join(conjuncts)


def gen_straightline_method(rng: random.Random) -> str:
    """One static int method: boxed params, annotated locals, return."""
    nparams = rng.randint(1, 2)
    params = []
    names = []
    for i in range(nparams):
        name = "ab"[i]
        bound = f"{name} >= -8 && {name} <= 8"
        if rng.random() < 0.4:
            bound += f" && {name} {rng.choice(['>', '<', '>=', '<='])} {rng.randint(-4, 4)}"
        params.append(f'@Refinement("{bound}") int {name}')
        names.append(name)
    body = []
    scope = list(names)
    for i in range(rng.randint(1, 4)):
        if scope and rng.random() < 0.3:
            target = rng.choice(scope)
            body.append(f"{target} = {_lin_expr_text(rng, scope)};")
        else:
            local = f"v{i}"
            expr = _lin_expr_text(rng, scope)
            if rng.random() < 0.6:
                ref = _refinement_text(rng, local, scope)
                body.append(f'@Refinement("{ref}")')
            body.append(f"int {local} = {expr};")
            scope.append(local)
    ret = _lin_expr_text(rng, scope)
    ret_ref = _refinement_text(rng, "_", names)
    lines = [f'    @Refinement("{ret_ref}")',
             f"    static int compute({', '.join(params)}) {{"]
    lines += [f"        {line}" for line in body]
    lines += [f"        return {ret};", "    }"]
    return "class Gen {\n" + "\n".join(lines) + "\n}\n"


class ConcreteViolation(Exception):
    pass


def _eval_expr(e, env: dict[str, int]):
    if isinstance(e, _fst.IntLitE):
        return e.value
    if isinstance(e, _fst.BoolLitE):
        return e.value
    if isinstance(e, _fst.VarRef):
        return env[e.name]
    if isinstance(e, _fst.Unary):
        v = _eval_expr(e.operand, env)
        return -v if e.op == "-" else not v
    if isinstance(e, _fst.Binary):
        l = _eval_expr(e.left, env)
        r = _eval_expr(e.right, env)
        return {
            "+": lambda: l + r, "-": lambda: l - r, "*": lambda: l * r,
            "==": lambda: l == r, "!=": lambda: l != r,
            "<": lambda: l < r, "<=": lambda: l <= r,
            ">": lambda: l > r, ">=": lambda: l >= r,
            "&&": lambda: l and r, "||": lambda: l or r,
        }[e.op]()
    raise ValueError(f"interpreter does not support {type(e).__name__}")


def _check_concrete(pred_text: str, own: str, value, env: dict[str, int]) -> None:
    from refjava.predicates import parse_predicate, substitute, Var

    pred = parse_predicate(pred_text)
    pred = substitute(pred, {"_": Var(own)} if own != "_" else {})
    model = dict(env)
    model[own] = value
    if _pred_eval(pred, model) is not True:
        raise ConcreteViolation(pred_text)


def run_method_concretely(method: _fst.MethodDecl, args: dict[str, int]) -> bool:
    """Execute one generated method; True = no refinement violated."""
    env = dict(args)
    try:
        for s in method.body.stmts:
            if isinstance(s, _fst.LocalDecl):
                value = _eval_expr(s.init, env)
                if s.annotation is not None:
                    _check_concrete(s.annotation.payload().text, s.name, value, env)
                env[s.name] = value
            elif isinstance(s, _fst.Assign):
                name = s.target.name
                value = _eval_expr(s.value, env)
                declared = _declared_refinement(method, name)
                if declared is not None:
                    probe = dict(env)
                    probe.pop(name, None)
                    _check_concrete(declared, name, value, probe)
                env[name] = value
            elif isinstance(s, _fst.Return):
                value = _eval_expr(s.value, env)
                if method.return_annotation is not None:
                    _check_concrete(
                        method.return_annotation.payload().text, "_", value, env
                    )
                return True
        return True
    except ConcreteViolation:
        return False


def _declared_refinement(method: _fst.MethodDecl, name: str):
    for p in method.params:
        if p.name == name and p.annotation is not None:
            return p.annotation.payload().text
    decl = None
    for s in method.body.stmts:
        if isinstance(s, _fst.LocalDecl) and s.name == name:
            decl = s
    if decl is not None and decl.annotation is not None:
        return decl.annotation.payload().text
    return None


def param_box_models(method: _fst.MethodDecl, lo: int = -8, hi: int = 8):
    """All param valuations in the box satisfying the param refinements."""
    from refjava.predicates import parse_predicate

    names = [p.name for p in method.params]
    refs = {
        p.name: parse_predicate(p.annotation.payload().text)
        for p in method.params
        if p.annotation is not None
    }
    for combo in itertools.product(range(lo, hi + 1), repeat=len(names)):
        env = dict(zip(names, combo))
        ok = True
        for name, pred in refs.items():
            if _pred_eval(pred, env) is not True:
                ok = False
                break
        if ok:
            yield env


# ---------------------------------------------------------------------------
# Annotation-free base-typed program generator (optionality property)


def gen_plain_program(rng: random.Random) -> str:
    """A random annotation-free program that base-typechecks by
    construction: typed expression generation over tracked scopes."""

    def int_expr(scope_ints, depth):
        if depth == 0 or rng.random() < 0.35:
            if scope_ints and rng.random() < 0.6:
                return rng.choice(scope_ints)
            return str(rng.randint(-9, 9))
        op = rng.choice(["+", "-", "*", "/", "%"])
        l = int_expr(scope_ints, depth - 1)
        r = int_expr(scope_ints, depth - 1)
        if op in ("/", "%"):
            r = str(rng.randint(1, 9))  # syntactically nonzero divisor
        return f"({l} {op} {r})"

    def bool_expr(scope_ints, scope_bools, depth):
        if depth == 0 or rng.random() < 0.3:
            if scope_bools and rng.random() < 0.4:
                return rng.choice(scope_bools)
            if rng.random() < 0.15:
                return rng.choice(["true", "false"])
            op = rng.choice(["==", "!=", "<", "<=", ">", ">="])
            return f"({int_expr(scope_ints, 1)} {op} {int_expr(scope_ints, 1)})"
        op = rng.choice(["&&", "||"])
        return f"({bool_expr(scope_ints, scope_bools, depth - 1)} {op} {bool_expr(scope_ints, scope_bools, depth - 1)})"

    counter = [0]

    def fresh(prefix):
        counter[0] += 1
        return f"{prefix}{counter[0]}"

    def gen_stmts(scope_ints, scope_bools, callables, depth, indent):
        pad = "    " * indent
        lines = []
        for _ in range(rng.randint(1, 4)):
            roll = rng.random()
            if roll < 0.3:
                name = fresh("i")
                lines.append(f"{pad}int {name} = {int_expr(scope_ints, 2)};")
                scope_ints = scope_ints + [name]
            elif roll < 0.45:
                name = fresh("b")
                lines.append(
                    f"{pad}boolean {name} = {bool_expr(scope_ints, scope_bools, 1)};"
                )
                scope_bools = scope_bools + [name]
            elif roll < 0.6 and scope_ints:
                lines.append(
                    f"{pad}{rng.choice(scope_ints)} = {int_expr(scope_ints, 2)};"
                )
            elif roll < 0.75 and depth > 0:
                cond = bool_expr(scope_ints, scope_bools, 1)
                inner = gen_stmts(scope_ints, scope_bools, callables, depth - 1, indent + 1)
                lines.append(f"{pad}if ({cond}) {{")
                lines.extend(inner)
                if rng.random() < 0.5:
                    lines.append(f"{pad}}} else {{")
                    lines.extend(
                        gen_stmts(scope_ints, scope_bools, callables, depth - 1, indent + 1)
                    )
                lines.append(f"{pad}}}")
            elif roll < 0.85 and depth > 0 and scope_ints:
                guard_var = rng.choice(scope_ints)
                inner = gen_stmts(scope_ints, scope_bools, callables, depth - 1, indent + 1)
                lines.append(f"{pad}while ({guard_var} > 0) {{")
                lines.extend(inner)
                lines.append(f"{pad}{guard_var} = {guard_var} - 1;")
                lines.append(f"{pad}}}")
            elif callables:
                callee, arity = rng.choice(callables)
                args = ", ".join(int_expr(scope_ints, 1) for _ in range(arity))
                lines.append(f"{pad}{callee}({args});")
            else:
                name = fresh("i")
                lines.append(f"{pad}int {name} = {int_expr(scope_ints, 1)};")
                scope_ints = scope_ints + [name]
        return lines

    methods = []
    callables: list[tuple[str, int]] = []
    for mi in range(rng.randint(1, 3)):
        name = f"m{mi}"
        arity = rng.randint(0, 2)
        params = ", ".join(f"int p{j}" for j in range(arity))
        scope = [f"p{j}" for j in range(arity)]
        body = gen_stmts(scope, [], list(callables), rng.randint(0, 2), 2)
        ret = [f"        return {int_expr(scope, 1)};"] if rng.random() < 0.5 else []
        rtype = "int" if ret else "void"
        methods.append(
            f"    static {rtype} {name}({params}) {{\n"
            + "\n".join(body + ret)
            + "\n    }"
        )
        callables.append((name, arity))
    return "class P {\n" + "\n\n".join(methods) + "\n}\n"
