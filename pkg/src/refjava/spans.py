"""Source positions shared by every stage of the pipeline."""

from __future__ import annotations

import bisect
from dataclasses import dataclass


@dataclass(frozen=True)
class Span:
    """Half-open character range [start, end) into one source text."""

    start: int
    end: int

    def contains(self, offset: int) -> bool:
        return self.start <= offset < max(self.end, self.start + 1)

    def cover(self, other: "Span") -> "Span":
        return Span(min(self.start, other.start), max(self.end, other.end))


NO_SPAN = Span(0, 0)


class SourceMap:
    """Resolves spans to file / line / column for diagnostics."""

    def __init__(self):
        self._texts: dict[str, str] = {}
        self._line_starts: dict[str, list[int]] = {}

    def add_file(self, path: str, text: str) -> None:
        starts = [0]
        for i, ch in enumerate(text):
            if ch == "\n":
                starts.append(i + 1)
        self._texts[path] = text
        self._line_starts[path] = starts

    def files(self) -> list[str]:
        return list(self._texts)

    def text(self, path: str) -> str:
        return self._texts[path]

    def line_col(self, path: str, offset: int) -> tuple[int, int]:
        """1-based (line, column) of a character offset."""
        starts = self._line_starts[path]
        line = bisect.bisect_right(starts, offset) - 1
        return line + 1, offset - starts[line] + 1

    def position(self, path: str, span: Span) -> tuple[int, int, int, int]:
        """(start_line, start_col, end_line, end_col), all 1-based."""
        sl, sc = self.line_col(path, span.start)
        el, ec = self.line_col(path, span.end)
        return sl, sc, el, ec
