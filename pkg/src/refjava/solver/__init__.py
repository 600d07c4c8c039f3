from .core import (
    MissingAssignment,
    SatResult,
    SolverResult,
    check_sat,
    check_validity,
    evaluate,
)
from .smtlib import export_smtlib

__all__ = [
    "MissingAssignment",
    "SatResult",
    "SolverResult",
    "check_sat",
    "check_validity",
    "evaluate",
    "export_smtlib",
]
