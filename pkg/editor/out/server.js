"use strict";
// Launch configuration for the refjava language server.  Kept free of
// any 'vscode' import so it can be unit-tested outside the editor.
Object.defineProperty(exports, "__esModule", { value: true });
exports.documentSelector = void 0;
exports.serverOptionsFor = serverOptionsFor;
exports.missingServerHint = missingServerHint;
exports.documentSelector = [
    { scheme: "file", language: "java" },
    { scheme: "file", language: "ljava" },
];
function serverOptionsFor(serverPath) {
    const run = {
        command: serverPath,
        args: ["serve"],
    };
    return { run, debug: run };
}
function missingServerHint(serverPath) {
    return (`refjava language server not found (tried '${serverPath}'). ` +
        "Install it with 'pip install refjava' or point the " +
        "'refjava.serverPath' setting at the executable.");
}
//# sourceMappingURL=server.js.map