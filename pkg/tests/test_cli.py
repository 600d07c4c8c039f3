import json
import subprocess
import sys

from refjava.cli import main
from refjava.corpus import corpus_dir, corpus_manifest
from refjava.diagnostics import from_json, to_json
from refjava.checker import check_sources


def run_cli(*args, cwd=None):
    proc = subprocess.run(
        [sys.executable, "-m", "refjava.cli", *args],
        capture_output=True,
        text=True,
        cwd=cwd,
        timeout=120,
    )
    return proc


def test_check_listing1_exits_one(tmp_path):
    src = corpus_dir() / "listing1.java"
    proc = run_cli("check", str(src))
    assert proc.returncode == 1
    assert "Type expected: (r >= 0 && r <= 255);" in proc.stdout
    assert "Refinement found: (r == 200 + 60)" in proc.stdout
    assert "1 files checked" in proc.stderr


def test_check_clean_file_exits_zero():
    src = corpus_dir() / "listing1_ok.java"
    proc = run_cli("check", str(src))
    assert proc.returncode == 0
    assert proc.stdout == ""


def test_check_empty_directory(tmp_path):
    empty = tmp_path / "empty_dir"
    empty.mkdir()
    proc = run_cli("check", str(empty))
    assert proc.returncode == 0
    assert "0 files checked" in proc.stderr


def test_unreadable_file_exits_two(tmp_path):
    proc = run_cli("check", str(tmp_path / "missing.java"))
    assert proc.returncode == 2
    assert "cannot read" in proc.stderr


def test_usage_error_exits_two():
    proc = run_cli("frobnicate")
    assert proc.returncode == 2


def test_json_format_protocol_diagnostic():
    src = corpus_dir() / "socket_bad.java"
    proc = run_cli("check", "--format", "json", str(src))
    assert proc.returncode == 1
    payload = json.loads(proc.stdout)
    assert len(payload) == 1
    assert payload[0]["kind"] == "protocol"
    assert payload[0]["expected"] == "(bound(this))"
    assert payload[0]["found"] == "(unconnected(this))"


def test_json_round_trip():
    src = corpus_dir() / "listing2_bad.java"
    result = check_sources([("listing2_bad.java", src.read_text())])
    text = to_json(result.diagnostics)
    parsed = from_json(text)
    assert len(parsed) == len(result.diagnostics)
    for a, b in zip(parsed, result.diagnostics):
        assert (a.file, a.span, a.kind, a.message) == (b.file, b.span, b.kind, b.message)
        assert (a.expected_display, a.found_display) == (
            b.expected_display, b.found_display,
        )
        assert (a.start_line, a.start_col, a.end_line, a.end_col) == (
            b.start_line, b.start_col, b.end_line, b.end_col,
        )


def test_smtlib_dump_writes_scripts(tmp_path):
    src = corpus_dir() / "listing1.java"
    dump = tmp_path / "vcs"
    proc = run_cli("check", "--smtlib-dump", str(dump), str(src))
    assert proc.returncode == 1
    scripts = sorted(dump.glob("*.smt2"))
    assert scripts, "no VCs dumped"
    text = scripts[0].read_text()
    assert text.startswith("(set-logic QF_LIA)\n")
    assert text.rstrip().endswith("(check-sat)")


def test_feature_isolation_flags():
    src = corpus_dir() / "socket_bad.java"
    assert run_cli("check", "--no-protocol", str(src)).returncode == 0
    src2 = corpus_dir() / "listing1.java"
    assert run_cli("check", "--no-refinements", str(src2)).returncode == 0


def test_worker_counts_do_not_change_output():
    corpus = str(corpus_dir())
    one = run_cli("check", "--jobs", "1", corpus)
    four = run_cli("check", "--jobs", "4", corpus)
    assert one.returncode == four.returncode == 1
    assert one.stdout == four.stdout


def test_main_function_returns_exit_code(capsys):
    src = corpus_dir() / "listing1.java"
    assert main(["check", str(src)]) == 1
    captured = capsys.readouterr()
    assert "Refinement Type Error" in captured.out


# ---------------------------------------------------------------------------
# corpus goldens


def test_corpus_matches_goldens():
    for program, golden in corpus_manifest():
        result = check_sources([(program.name, program.read_text())])
        rendered = "".join(
            _normalize(d) for d in result.diagnostics
        )
        expected = golden.read_text().replace("\r\n", "\n")
        assert rendered == expected, f"golden mismatch for {program.name}"


def _normalize(d):
    from refjava.diagnostics import render_text

    return render_text(d).replace("\\", "/") + "\n"


def test_ljava_extension_parsed_identically(tmp_path):
    src = corpus_dir() / "listing1.java"
    alt = tmp_path / "listing1.ljava"
    alt.write_text(src.read_text())
    java = run_cli("check", str(src))
    ljava = run_cli("check", str(alt))
    assert ljava.returncode == java.returncode == 1

    def body(out: str) -> str:
        # Drop the file-path prefix of the first line; the rest must match.
        first, _, rest = out.partition("\n")
        return first.split(": ", 1)[1] + "\n" + rest

    assert body(java.stdout) == body(ljava.stdout)


def test_render_text_formats_for_non_refinement_kinds():
    import re

    syntax = check_sources([("bad.java", "class A { void f( { } }")])
    line = _render(syntax)
    assert re.match(r"^bad\.java:\d+:\d+: Syntax Error: ", line)

    basetype = check_sources([("bad.java", "class A { void f() { x = 1; } }")])
    assert re.match(r"^bad\.java:\d+:\d+: Type Error: unknown name x", _render(basetype))


def _render(result):
    from refjava.diagnostics import render_text

    assert result.diagnostics
    return render_text(result.diagnostics[0])
