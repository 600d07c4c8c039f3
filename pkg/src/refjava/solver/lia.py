"""Integer feasibility of conjunctions of linear inequalities.

Rows are kept as exact integer vectors; every row is gcd-reduced with
its bound floored, which is sound for integer feasibility and makes
thin slabs (3x - 3y == 1) collapse to contradictions outright.  The
relaxation is decided by Fourier-Motzkin elimination; a rational
sample point is recovered by back-substitution that prefers integer
values, and residual fractional coordinates are resolved by branch
and bound.  On cap exhaustion the result is "unknown", never a guess.

Systems arriving here are tiny (one row per asserted literal plus a
few branch bounds), which is why elimination beats iterative methods:
all arithmetic stays in machine integers.
"""

from __future__ import annotations

from fractions import Fraction
from math import ceil, floor, gcd

# One constraint: sum(coeff * var) <= bound, exact integer data.
Constraint = tuple[dict[str, int], int]

NODE_CAP = 10_000
_ROW_CAP = 20_000


class _Blowup(Exception):
    pass


def _normalize(coeffs: dict[str, int], bound: int) -> tuple[tuple, int]:
    g = gcd(*(abs(c) for c in coeffs.values()))
    if g > 1:
        coeffs = {v: c // g for v, c in coeffs.items()}
        bound = bound // g  # floor: keeps every integer point
    return tuple(sorted(coeffs.items())), bound


class _System:
    """Deduplicated rows keyed by coefficient vector, tightest bound kept."""

    def __init__(self):
        self.rows: dict[tuple, int] = {}
        self.infeasible = False

    def add(self, coeffs: dict[str, int], bound: int) -> None:
        coeffs = {v: c for v, c in coeffs.items() if c != 0}
        if not coeffs:
            if bound < 0:
                self.infeasible = True
            return
        key, b = _normalize(coeffs, bound)
        old = self.rows.get(key)
        if old is None or b < old:
            self.rows[key] = b

    def items(self):
        return [(dict(k), b) for k, b in self.rows.items()]


def relaxation_model(constraints: list[Constraint]) -> dict[str, Fraction] | None:
    """Rational point satisfying the gcd-tightened system, or None.

    The tightened relaxation contains exactly the integer points of the
    original system, so None here proves integer infeasibility.
    """
    sys0 = _System()
    for coeffs, bound in constraints:
        sys0.add(coeffs, bound)
    if sys0.infeasible:
        return None

    current = sys0.items()
    names = sorted({v for coeffs, _ in current for v in coeffs})
    stages: list[tuple[str, list, list]] = []
    for v in names:
        lowers, uppers = [], []
        nxt = _System()
        for coeffs, b in current:
            a = coeffs.get(v, 0)
            if a > 0:
                uppers.append((coeffs, b))
            elif a < 0:
                lowers.append((coeffs, b))
            else:
                nxt.add(coeffs, b)
        stages.append((v, lowers, uppers))
        for cl, bl in lowers:
            al = -cl[v]
            for cu, bu in uppers:
                au = cu[v]
                comb: dict[str, int] = {}
                for x, y in cl.items():
                    comb[x] = comb.get(x, 0) + au * y
                for x, y in cu.items():
                    comb[x] = comb.get(x, 0) + al * y
                nxt.add(comb, au * bl + al * bu)
                if nxt.infeasible:
                    return None
        if len(nxt.rows) > _ROW_CAP:
            raise _Blowup
        current = nxt.items()

    model: dict[str, Fraction] = {}
    for v, lowers, uppers in reversed(stages):
        lo = hi = None
        for coeffs, b in lowers:
            rest = sum(Fraction(c) * model[x] for x, c in coeffs.items() if x != v)
            bnd = (Fraction(b) - rest) / coeffs[v]  # negative coeff flips <=
            if lo is None or bnd > lo:
                lo = bnd
        for coeffs, b in uppers:
            rest = sum(Fraction(c) * model[x] for x, c in coeffs.items() if x != v)
            bnd = (Fraction(b) - rest) / coeffs[v]
            if hi is None or bnd < hi:
                hi = bnd
        if lo is not None and hi is not None and lo > hi:
            raise RuntimeError("elimination invariant broken")
        model[v] = _pick(lo, hi)
    return model


def _pick(lo: Fraction | None, hi: Fraction | None) -> Fraction:
    """A value in [lo, hi], integral when possible and near zero."""
    if lo is None and hi is None:
        return Fraction(0)
    if lo is None:
        return Fraction(min(0, floor(hi)))
    if hi is None:
        return Fraction(max(0, ceil(lo)))
    ilo, ihi = ceil(lo), floor(hi)
    if ilo <= ihi:
        return Fraction(min(max(0, ilo), ihi))
    return (lo + hi) / 2


def _eliminate_equalities(
    constraints: list[Constraint],
) -> tuple[list[Constraint], list[tuple[str, dict[str, int], int, int]]] | None:
    """Substitute away implied equalities with a unit-coefficient term.

    Two opposing rows t <= k and -t <= -k pin t == k; when t has some
    variable with coefficient +-1 that variable is expressed in the
    others and removed from the system.  This keeps branch and bound
    from diverging on parity wedges (2b + c - 2d == 0 forces c even,
    which no sequence of single-variable branches can discover).

    Returns (reduced rows, substitutions) or None if contradictory.
    Substitutions are (var, rest-coefficients, bound, own-coefficient),
    to be replayed in reverse when rebuilding a model.
    """
    sys0 = _System()
    for coeffs, bound in constraints:
        sys0.add(coeffs, bound)
    if sys0.infeasible:
        return None
    rows = sys0.rows
    subs: list[tuple[str, dict[str, int], int, int]] = []
    while True:
        found = None
        for key, k in rows.items():
            neg = tuple(sorted((v, -c) for v, c in key))
            if rows.get(neg) == -k:
                unit = next((v for v, c in key if abs(c) == 1), None)
                if unit is not None:
                    found = (key, k, neg, unit)
                    break
        if found is None:
            break
        key, k, neg, unit = found
        coeffs = dict(key)
        own = coeffs.pop(unit)
        subs.append((unit, coeffs, k, own))
        nxt = _System()
        for key2, k2 in rows.items():
            if key2 in (key, neg):
                continue
            c2 = dict(key2)
            a = c2.pop(unit, 0)
            if a:
                # unit == own_inv * (k - rest), own in {1, -1}.
                factor = a * own
                for x, cc in coeffs.items():
                    c2[x] = c2.get(x, 0) - factor * cc
                k2 = k2 - factor * k
            nxt.add(c2, k2)
        if nxt.infeasible:
            return None
        rows = nxt.rows
    return [(dict(key), k) for key, k in rows.items()], subs


def feasible_integer(
    constraints: list[Constraint], node_cap: int = NODE_CAP
) -> tuple[str, dict[str, int] | None]:
    """("sat", model) | ("unsat", None) | ("unknown", None)."""
    names = sorted({v for coeffs, _ in constraints for v in coeffs})
    try:
        reduced = _eliminate_equalities(constraints)
    except _Blowup:
        return "unknown", None
    if reduced is None:
        return "unsat", None
    base, subs = reduced

    nodes = 0
    stack = [list(base)]
    while stack:
        nodes += 1
        if nodes > node_cap:
            return "unknown", None
        cons = stack.pop()
        try:
            sol = relaxation_model(cons)
        except _Blowup:
            return "unknown", None
        if sol is None:
            continue
        frac_var = None
        for v in sorted(sol):
            if sol[v].denominator != 1:
                frac_var = v
                break
        if frac_var is None:
            model = {v: int(val) for v, val in sol.items()}
            for v in names:
                model.setdefault(v, 0)
            for unit, rest, k, own in reversed(subs):
                model[unit] = own * (k - sum(c * model[x] for x, c in rest.items()))
            return "sat", model
        lo = floor(sol[frac_var])
        # Explore x <= floor first; push the complement branch.
        stack.append(cons + [({frac_var: -1}, -(lo + 1))])
        stack.append(cons + [({frac_var: 1}, lo)])
    return "unsat", None
