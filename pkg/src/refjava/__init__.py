"""refjava: refinement-type and object-protocol checker for a Java subset."""

from .checker import CheckOptions, CheckResult, check_sources
from .diagnostics import Diagnostic, from_json, render_text, to_json

__version__ = "0.1.0"

__all__ = [
    "CheckOptions",
    "CheckResult",
    "Diagnostic",
    "check_sources",
    "from_json",
    "render_text",
    "to_json",
    "__version__",
]
