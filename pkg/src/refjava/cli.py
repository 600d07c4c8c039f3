"""Command-line interface.

    refjava check [--format text|json] [--jobs N] [--smtlib-dump DIR]
                  [--no-protocol] [--no-refinements] <paths...>
    refjava serve [--debounce-ms N]

Exit codes: 0 clean, 1 diagnostics reported, 2 usage or I/O error.
Diagnostics go to stdout; the files-checked summary goes to stderr so
golden output stays machine-comparable.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .checker import CheckOptions, check_sources
from .diagnostics import render_text, to_json
from .solver import export_smtlib

EXTENSIONS = (".java", ".ljava")


def collect_files(paths: list[str]) -> list[Path]:
    files: list[Path] = []
    for raw in paths:
        p = Path(raw)
        if p.is_dir():
            files.extend(sorted(q for q in p.rglob("*") if q.suffix in EXTENSIONS))
        else:
            files.append(p)
    return files


def run_check(args) -> int:
    files = collect_files(args.paths)
    sources = []
    for f in files:
        try:
            sources.append((str(f), f.read_text(encoding="utf-8")))
        except OSError as e:
            print(f"refjava: cannot read {f}: {e.strerror or e}", file=sys.stderr)
            return 2
    options = CheckOptions(
        refinements=not args.no_refinements,
        protocols=not args.no_protocol,
        jobs=args.jobs,
        collect_vcs=args.smtlib_dump is not None,
    )
    result = check_sources(sources, options)

    if args.smtlib_dump is not None:
        dump_dir = Path(args.smtlib_dump)
        dump_dir.mkdir(parents=True, exist_ok=True)
        for i, vc in enumerate(result.vcs, start=1):
            script = export_smtlib(vc.hypothesis, vc.goal)
            (dump_dir / f"vc_{i:04d}.smt2").write_text(script, encoding="utf-8")

    if args.format == "json":
        sys.stdout.write(to_json(result.diagnostics))
    else:
        for d in result.diagnostics:
            print(render_text(d))
    print(f"{result.files_checked} files checked", file=sys.stderr)
    return 1 if result.diagnostics else 0


def run_serve(args) -> int:
    from .lsp import Server

    return Server(debounce_s=args.debounce_ms / 1000.0).run()


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="refjava",
        description="Refinement-type and object-protocol checker for a Java subset",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="check source files or directories")
    check.add_argument("paths", nargs="+", help=".java/.ljava files or directories")
    check.add_argument("--format", choices=("text", "json"), default="text")
    check.add_argument("--jobs", type=int, default=1, help="parallel method checking")
    check.add_argument(
        "--smtlib-dump", metavar="DIR",
        help="write every verification condition as SMT-LIB2 into DIR",
    )
    check.add_argument("--no-protocol", action="store_true", help="skip protocol checks")
    check.add_argument(
        "--no-refinements", action="store_true", help="skip value-refinement checks"
    )

    serve = sub.add_parser("serve", help="run the language server on stdio")
    serve.add_argument("--debounce-ms", type=int, default=200)

    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        if args.command == "check":
            return run_check(args)
        return run_serve(args)
    except BrokenPipeError:
        return 2
    except Exception as e:  # internal error: report, do not traceback-spam
        print(f"refjava: internal error: {e!r}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
