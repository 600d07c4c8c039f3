// Launch configuration for the refjava language server.  Kept free of
// any 'vscode' import so it can be unit-tested outside the editor.

import type { DocumentSelector } from "vscode-languageclient";
import type { Executable, ServerOptions } from "vscode-languageclient/node";

export const documentSelector: DocumentSelector = [
  { scheme: "file", language: "java" },
  { scheme: "file", language: "ljava" },
];

export function serverOptionsFor(serverPath: string): ServerOptions {
  const run: Executable = {
    command: serverPath,
    args: ["serve"],
  };
  return { run, debug: run };
}

export function missingServerHint(serverPath: string): string {
  return (
    `refjava language server not found (tried '${serverPath}'). ` +
    "Install it with 'pip install refjava' or point the " +
    "'refjava.serverPath' setting at the executable."
  );
}
