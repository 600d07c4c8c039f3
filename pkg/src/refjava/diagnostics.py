"""Diagnostic data model, text rendering, and JSON round-tripping."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Optional

from .spans import Span

if TYPE_CHECKING:  # pragma: no cover
    from .typing_core import VC

SYNTAX = "syntax"
BASETYPE = "basetype"
REFINEMENT = "refinement"
PROTOCOL = "protocol"
ANNOTATION = "annotation"
INTERNAL = "internal"

_KIND_ORDER = {SYNTAX: 0, BASETYPE: 1, ANNOTATION: 2, REFINEMENT: 3, PROTOCOL: 4, INTERNAL: 5}

_HEADERS = {
    SYNTAX: "Syntax Error",
    BASETYPE: "Type Error",
    ANNOTATION: "Annotation Error",
    INTERNAL: "Internal Error",
}


@dataclass(frozen=True)
class Diagnostic:
    file: str
    span: Span
    kind: str
    message: str = ""
    expected_display: Optional[str] = None
    found_display: Optional[str] = None
    vc: Optional["VC"] = field(default=None, compare=False)
    # 1-based positions filled in by the checker once a SourceMap exists.
    start_line: int = 0
    start_col: int = 0
    end_line: int = 0
    end_col: int = 0

    def sort_key(self):
        return (self.file, self.span.start, _KIND_ORDER.get(self.kind, 9), self.span.end)


def render_text(d: Diagnostic) -> str:
    """The checker's user-facing message.

    Refinement and protocol failures use the two-clause shape

        file:line:col: Refinement Type Error
        Type expected: (<expected>);
        Refinement found: (<found>)

    and every other kind renders as one `file:line:col: Header: message`
    line.
    """
    prefix = f"{d.file}:{d.start_line}:{d.start_col}"
    if d.kind in (REFINEMENT, PROTOCOL):
        return (
            f"{prefix}: Refinement Type Error\n"
            f"Type expected: {d.expected_display};\n"
            f"Refinement found: {d.found_display}"
        )
    header = _HEADERS.get(d.kind, "Error")
    return f"{prefix}: {header}: {d.message}"


def to_json_obj(d: Diagnostic) -> dict:
    obj = {
        "file": d.file,
        "kind": d.kind,
        "start": {"line": d.start_line, "col": d.start_col, "offset": d.span.start},
        "end": {"line": d.end_line, "col": d.end_col, "offset": d.span.end},
        "message": d.message,
    }
    if d.expected_display is not None:
        obj["expected"] = d.expected_display
    if d.found_display is not None:
        obj["found"] = d.found_display
    if d.vc is not None:
        obj["vc"] = {"hypothesis": d.vc.hypothesis_text(), "goal": d.vc.goal_text()}
    return obj


def to_json(diagnostics: list[Diagnostic]) -> str:
    return json.dumps([to_json_obj(d) for d in diagnostics], indent=2) + "\n"


def from_json(text: str) -> list[Diagnostic]:
    """Inverse of to_json up to the VC field (kept as rendered text)."""
    out = []
    for obj in json.loads(text):
        out.append(
            Diagnostic(
                file=obj["file"],
                span=Span(obj["start"]["offset"], obj["end"]["offset"]),
                kind=obj["kind"],
                message=obj.get("message", ""),
                expected_display=obj.get("expected"),
                found_display=obj.get("found"),
                start_line=obj["start"]["line"],
                start_col=obj["start"]["col"],
                end_line=obj["end"]["line"],
                end_col=obj["end"]["col"],
            )
        )
    return out
