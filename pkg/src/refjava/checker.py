"""Whole-program checking pipeline shared by the CLI and the server.

parse -> base typecheck -> annotation index / protocols -> per-method
refinement and protocol checks.  Method checks are independent, so a
worker pool may run them concurrently; results are merged in a fixed
order and sorted, making output identical for any worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from . import protocol as proto
from . import vcgen
from .annotations import build_annotation_index
from .diagnostics import Diagnostic
from .frontend import base_typecheck, parse_program
from .frontend import ast
from .typing_core import VC


@dataclass
class CheckOptions:
    refinements: bool = True
    protocols: bool = True
    jobs: int = 1
    collect_vcs: bool = False


@dataclass
class CheckResult:
    diagnostics: list[Diagnostic]
    files_checked: int
    vcs: list[VC] = field(default_factory=list)
    program: Optional[ast.Program] = None


def check_sources(
    sources: list[tuple[str, str]], options: CheckOptions | None = None
) -> CheckResult:
    options = options or CheckOptions()
    nfiles = len(sources)

    parsed = parse_program(sources)
    if isinstance(parsed, list):
        return CheckResult(_sorted(parsed), nfiles)
    info, diags = base_typecheck(parsed)
    if info is None:
        return CheckResult(_sorted(diags), nfiles, program=parsed)

    states = proto.state_names(info)
    index = build_annotation_index(info, states)
    protocols, proto_diags = proto.build_protocols(info)

    diagnostics = list(index.diagnostics) + proto_diags

    tasks = []
    for unit in parsed.compilation_units:
        for decl in unit.decls:
            if isinstance(decl, ast.ClassDecl):
                tasks.append((unit.path, decl))

    def run_task(task):
        path, decl = task
        cls = info.classes[decl.name]
        out: list[Diagnostic] = []
        vcs: list[VC] = []
        sink = vcs if options.collect_vcs else None
        if options.refinements:
            out.extend(vcgen.check_class(path, cls, info, index, sink))
        if options.protocols and protocols:
            for m in decl.methods + decl.constructors:
                out.extend(proto.check_protocol_usage(path, m, info, protocols))
        return out, vcs

    all_vcs: list[VC] = []
    if options.jobs > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=options.jobs) as pool:
            results = list(pool.map(run_task, tasks))
    else:
        results = [run_task(t) for t in tasks]
    for out, vcs in results:
        diagnostics.extend(out)
        all_vcs.extend(vcs)

    return CheckResult(_sorted(diagnostics), nfiles, all_vcs, parsed)


def _sorted(diagnostics: list[Diagnostic]) -> list[Diagnostic]:
    return sorted(diagnostics, key=lambda d: d.sort_key())
