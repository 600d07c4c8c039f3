"""Language server: live diagnostics and VC hovers over stdio.

Implements the standard JSON-RPC framing (Content-Length headers) and
the small protocol surface the editor client needs: initialize /
shutdown / exit, didOpen / didChange / didClose with full-text sync,
publishDiagnostics, and hover.

Checking runs on one background worker with a debounce: every change
records the target document versions, the worker re-checks the whole
open-document set once the edits settle, and results are published
only if no newer edit arrived meanwhile, so stale diagnostics are
never shown.  A checker crash on one document set is isolated: the
server stays up and reports an internal-error diagnostic instead.
"""

from __future__ import annotations

import json
import sys
import threading
import traceback

from .checker import CheckOptions, check_sources
from .diagnostics import Diagnostic, INTERNAL, PROTOCOL, REFINEMENT, SYNTAX
from .spans import Span

_SEVERITY_ERROR = 1


def _message_body(d: Diagnostic) -> str:
    if d.kind in (REFINEMENT, PROTOCOL):
        return (
            "Refinement Type Error\n"
            f"Type expected: {d.expected_display};\n"
            f"Refinement found: {d.found_display}"
        )
    headers = {SYNTAX: "Syntax Error", "basetype": "Type Error",
               "annotation": "Annotation Error", INTERNAL: "Internal Error"}
    return f"{headers.get(d.kind, 'Error')}: {d.message}"


def _hover_text(d: Diagnostic) -> str:
    text = _message_body(d)
    if d.vc is not None:
        text += f"\n\nVC: {d.vc.render()}"
    elif d.kind == PROTOCOL and d.message:
        text += f"\n\n{d.message}"
    return text


class Server:
    def __init__(self, debounce_s: float = 0.2, stdin=None, stdout=None):
        self._in = stdin if stdin is not None else sys.stdin.buffer
        self._out = stdout if stdout is not None else sys.stdout.buffer
        self._write_lock = threading.Lock()
        self._state_lock = threading.Lock()
        self._docs: dict[str, tuple[int, str]] = {}
        self._published: dict[str, list[Diagnostic]] = {}
        self._wakeup = threading.Condition()
        self._check_due: float | None = None
        self._running = True
        self._saw_shutdown = False
        self._debounce = debounce_s
        self._worker = threading.Thread(target=self._check_loop, daemon=True)

    # -- transport -----------------------------------------------------------

    def _read_message(self):
        length = None
        while True:
            line = self._in.readline()
            if not line:
                return None
            line = line.strip()
            if not line:
                break
            if line.lower().startswith(b"content-length:"):
                length = int(line.split(b":", 1)[1])
        if length is None:
            return None
        body = self._in.read(length)
        if not body:
            return None
        return json.loads(body.decode("utf-8"))

    def _send(self, payload: dict) -> None:
        body = json.dumps(payload).encode("utf-8")
        with self._write_lock:
            self._out.write(b"Content-Length: %d\r\n\r\n" % len(body))
            self._out.write(body)
            self._out.flush()

    def _reply(self, msg_id, result=None, error=None) -> None:
        payload = {"jsonrpc": "2.0", "id": msg_id}
        if error is not None:
            payload["error"] = error
        else:
            payload["result"] = result
        self._send(payload)

    def _notify(self, method: str, params: dict) -> None:
        self._send({"jsonrpc": "2.0", "method": method, "params": params})

    # -- main loop ----------------------------------------------------------

    def run(self) -> int:
        self._worker.start()
        while self._running:
            try:
                msg = self._read_message()
            except (ValueError, json.JSONDecodeError):
                self._reply(None, error={"code": -32700, "message": "parse error"})
                continue
            if msg is None:
                break
            try:
                self._dispatch(msg)
            except Exception as e:
                if "id" in msg:
                    self._reply(
                        msg["id"],
                        error={"code": -32603, "message": f"internal error: {e!r}"},
                    )
        with self._wakeup:
            self._wakeup.notify_all()
        return 0 if self._saw_shutdown else 1

    def _dispatch(self, msg: dict) -> None:
        method = msg.get("method")
        params = msg.get("params") or {}
        msg_id = msg.get("id")
        if method == "initialize":
            self._reply(msg_id, {
                "capabilities": {
                    "textDocumentSync": {"openClose": True, "change": 1},
                    "hoverProvider": True,
                },
                "serverInfo": {"name": "refjava", "version": "0.1.0"},
            })
        elif method == "shutdown":
            self._saw_shutdown = True
            self._reply(msg_id, None)
        elif method == "exit":
            self._running = False
        elif method == "initialized":
            pass
        elif method == "textDocument/didOpen":
            doc = params["textDocument"]
            self._update_doc(doc["uri"], doc.get("version", 0), doc["text"])
        elif method == "textDocument/didChange":
            doc = params["textDocument"]
            changes = params.get("contentChanges") or []
            if changes:
                self._update_doc(doc["uri"], doc.get("version", 0), changes[-1]["text"])
        elif method == "textDocument/didClose":
            uri = params["textDocument"]["uri"]
            with self._state_lock:
                self._docs.pop(uri, None)
                self._published.pop(uri, None)
            self._notify(
                "textDocument/publishDiagnostics", {"uri": uri, "diagnostics": []}
            )
            self._schedule_check()
        elif method == "textDocument/hover":
            self._reply(msg_id, self._hover(params))
        elif msg_id is not None:
            self._reply(
                msg_id, error={"code": -32601, "message": f"unknown method {method}"}
            )

    def _update_doc(self, uri: str, version: int, text: str) -> None:
        with self._state_lock:
            self._docs[uri] = (version, text)
        self._schedule_check()

    def _schedule_check(self) -> None:
        import time

        with self._wakeup:
            self._check_due = time.monotonic() + self._debounce
            self._wakeup.notify_all()

    # -- background checking ---------------------------------------------------

    def _check_loop(self) -> None:
        import time

        while True:
            with self._wakeup:
                while self._running and self._check_due is None:
                    self._wakeup.wait()
                if not self._running:
                    return
                now = time.monotonic()
                if now < self._check_due:
                    self._wakeup.wait(self._check_due - now)
                    continue
                self._check_due = None
            try:
                self._check_once()
            except Exception:
                traceback.print_exc(file=sys.stderr)

    def _check_once(self) -> None:
        with self._state_lock:
            snapshot = dict(self._docs)
        if not snapshot:
            return
        sources = [(uri, text) for uri, (_, text) in sorted(snapshot.items())]
        by_uri: dict[str, list[Diagnostic]] = {uri: [] for uri in snapshot}
        try:
            result = check_sources(sources, CheckOptions(collect_vcs=True))
            for d in result.diagnostics:
                by_uri.setdefault(d.file, []).append(d)
        except Exception:
            # Isolate the failure per document so one bad file cannot
            # take down diagnostics for the rest.
            for uri, (_, text) in snapshot.items():
                try:
                    result = check_sources([(uri, text)], CheckOptions(collect_vcs=True))
                    by_uri[uri] = list(result.diagnostics)
                except Exception as e:
                    by_uri[uri] = [
                        Diagnostic(
                            file=uri, span=Span(0, 1), kind=INTERNAL,
                            message=f"checker failed: {e!r}",
                            start_line=1, start_col=1, end_line=1, end_col=1,
                        )
                    ]
        with self._state_lock:
            stale = any(
                uri not in self._docs or self._docs[uri][0] != snapshot[uri][0]
                for uri in snapshot
            )
            if stale:
                return  # a newer edit exists; its check is already scheduled
            self._published = by_uri
            versions = {uri: snapshot[uri][0] for uri in snapshot}
        for uri in sorted(by_uri):
            self._notify(
                "textDocument/publishDiagnostics",
                {
                    "uri": uri,
                    "version": versions[uri],
                    "diagnostics": [self._to_lsp(d) for d in by_uri[uri]],
                },
            )

    @staticmethod
    def _to_lsp(d: Diagnostic) -> dict:
        return {
            "range": {
                "start": {"line": d.start_line - 1, "character": d.start_col - 1},
                "end": {"line": d.end_line - 1, "character": d.end_col - 1},
            },
            "severity": _SEVERITY_ERROR,
            "code": d.kind,
            "source": "refjava",
            "message": _message_body(d),
        }

    # -- hover --------------------------------------------------------------------

    def _hover(self, params: dict):
        uri = params["textDocument"]["uri"]
        pos = params["position"]
        with self._state_lock:
            doc = self._docs.get(uri)
            published = list(self._published.get(uri, ()))
        if doc is None:
            return None
        _, text = doc
        offset = _offset_at(text, pos["line"], pos["character"])
        for d in published:
            if d.span.contains(offset):
                return {
                    "contents": {"kind": "plaintext", "value": _hover_text(d)},
                    "range": {
                        "start": {"line": d.start_line - 1, "character": d.start_col - 1},
                        "end": {"line": d.end_line - 1, "character": d.end_col - 1},
                    },
                }
        return None


def _offset_at(text: str, line: int, character: int) -> int:
    current = 0
    for _ in range(line):
        nl = text.find("\n", current)
        if nl < 0:
            return len(text)
        current = nl + 1
    return min(current + character, len(text))


def main() -> int:
    import argparse

    parser = argparse.ArgumentParser(prog="refjava-lsp")
    parser.add_argument("--debounce-ms", type=int, default=200)
    args = parser.parse_args()
    return Server(debounce_s=args.debounce_ms / 1000.0).run()


if __name__ == "__main__":
    sys.exit(main())
