"""Checked-in example programs and their golden CLI outputs.

Each entry pairs a self-contained program with the exact text-format
diagnostics the checker must produce for it (empty file = checks
clean).  The suite re-checks every pair byte-for-byte.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

_ENTRIES = [
    ("listing1.java", "listing1.txt"),
    ("listing1_ok.java", "listing1_ok.txt"),
    ("listing2_ok.java", "listing2_ok.txt"),
    ("listing2_bad.java", "listing2_bad.txt"),
    ("socket_ok.java", "socket_ok.txt"),
    ("socket_bad.java", "socket_bad.txt"),
    ("socket_double_close.java", "socket_double_close.txt"),
    ("arraydeque_bad.java", "arraydeque_bad.txt"),
]


def corpus_dir() -> Path:
    return Path(str(resources.files(__package__)))


def corpus_manifest() -> list[tuple[Path, Path]]:
    """(program file, expected diagnostics file) pairs; both must exist."""
    base = corpus_dir()
    out = []
    for program, golden in _ENTRIES:
        p = base / program
        g = base / "golden" / golden
        if not p.is_file() or not g.is_file():
            raise FileNotFoundError(f"corpus entry missing: {program} / {golden}")
        out.append((p, g))
    return out
