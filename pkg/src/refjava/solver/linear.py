"""Linear normal form for integer terms and comparison atoms."""

from __future__ import annotations

from math import gcd

from ..predicates import AnonValue, Arith, Cmp, IntLit, Predicate, This, Unary, Var


class NonLinear(Exception):
    """Term escapes linear integer arithmetic."""


# A linear term is (coefficients by variable, constant).
LinTerm = tuple[dict[str, int], int]

# An atom in less-or-equal normal form: sum(coeff * var) <= bound.
# Coefficient items are sorted by variable name and gcd-reduced, so
# syntactically different spellings of one inequality share a key.
LeAtom = tuple[tuple[tuple[str, int], ...], int]


def linearize(term: Predicate) -> LinTerm:
    if isinstance(term, IntLit):
        return {}, term.value
    if isinstance(term, Var):
        return {term.name: 1}, 0
    if isinstance(term, AnonValue):
        return {"_": 1}, 0
    if isinstance(term, This):
        return {"this": 1}, 0
    if isinstance(term, Unary) and term.op == "-":
        coeffs, const = linearize(term.operand)
        return {v: -c for v, c in coeffs.items()}, -const
    if isinstance(term, Arith):
        lc, lk = linearize(term.left)
        rc, rk = linearize(term.right)
        if term.op == "+":
            return _add(lc, rc), lk + rk
        if term.op == "-":
            return _add(lc, {v: -c for v, c in rc.items()}), lk - rk
        if term.op == "*":
            if not lc:
                return {v: lk * c for v, c in rc.items()}, lk * rk
            if not rc:
                return {v: rk * c for v, c in lc.items()}, lk * rk
            raise NonLinear("product of two non-constant terms")
    raise NonLinear(f"not an integer term: {type(term).__name__}")


def _add(a: dict[str, int], b: dict[str, int]) -> dict[str, int]:
    out = dict(a)
    for v, c in b.items():
        out[v] = out.get(v, 0) + c
    return {v: c for v, c in out.items() if c != 0}


def le_atom(cmp: Cmp) -> LeAtom | bool:
    """Normalize a strict/non-strict inequality to `sum <= bound`.

    Equality operators must be split before calling this.  Strict
    bounds are tightened to integers (`t < k` becomes `t <= k - 1`).
    Constant comparisons collapse to a boolean.
    """
    lc, lk = linearize(cmp.left)
    rc, rk = linearize(cmp.right)
    diff = _add(lc, {v: -c for v, c in rc.items()})
    const = lk - rk
    if cmp.op == "<=":
        bound = -const
    elif cmp.op == "<":
        bound = -const - 1
    elif cmp.op == ">=":
        diff = {v: -c for v, c in diff.items()}
        bound = const
    elif cmp.op == ">":
        diff = {v: -c for v, c in diff.items()}
        bound = const - 1
    else:
        raise NonLinear(f"not an inequality: {cmp.op}")
    if not diff:
        return 0 <= bound
    g = gcd(*(abs(c) for c in diff.values()))
    if g > 1:
        # Over the integers sum(c/g * x) <= floor(k/g) is equivalent,
        # and Python's // already floors toward negative infinity.
        diff = {v: c // g for v, c in diff.items()}
        bound = bound // g
    return tuple(sorted(diff.items())), bound


def negate_le(atom: LeAtom) -> LeAtom:
    """Integer complement: not(t <= k)  <=>  -t <= -k - 1."""
    items, bound = atom
    return tuple(sorted((v, -c) for v, c in items)), -bound - 1
