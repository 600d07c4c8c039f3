"""Minimal DPLL core used beneath the lazy theory loop.

Clauses are lists of nonzero ints, variables 1..nvars, negative
literal = negated variable.  Plain recursive search with unit
propagation; problem sizes here are a handful of atoms per check, so
watched literals and learning would be dead weight.
"""

from __future__ import annotations


def solve(clauses: list[list[int]], nvars: int) -> dict[int, bool] | None:
    assign: dict[int, bool] = {}

    def value(lit: int) -> bool | None:
        v = assign.get(abs(lit))
        if v is None:
            return None
        return v if lit > 0 else not v

    def propagate() -> bool:
        changed = True
        while changed:
            changed = False
            for clause in clauses:
                unassigned = None
                satisfied = False
                count = 0
                for lit in clause:
                    val = value(lit)
                    if val is True:
                        satisfied = True
                        break
                    if val is None:
                        unassigned = lit
                        count += 1
                if satisfied:
                    continue
                if count == 0:
                    return False
                if count == 1:
                    assign[abs(unassigned)] = unassigned > 0
                    changed = True
        return True

    def search() -> bool:
        snapshot = dict(assign)
        if not propagate():
            assign.clear()
            assign.update(snapshot)
            return False
        var = next((v for v in range(1, nvars + 1) if v not in assign), None)
        if var is None:
            return True
        after_prop = dict(assign)
        for choice in (True, False):
            assign[var] = choice
            if search():
                return True
            assign.clear()
            assign.update(after_prop)
        assign.clear()
        assign.update(snapshot)
        return False

    if search():
        return {v: assign.get(v, False) for v in range(1, nvars + 1)}
    return None
