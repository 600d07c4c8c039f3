"use strict";
Object.defineProperty(exports, "__esModule", { value: true });
exports.activate = activate;
exports.deactivate = deactivate;
const vscode_1 = require("vscode");
const node_1 = require("vscode-languageclient/node");
const server_1 = require("./server");
let client;
async function activate(context) {
    const serverPath = vscode_1.workspace
        .getConfiguration("refjava")
        .get("serverPath", "refjava");
    const clientOptions = {
        documentSelector: server_1.documentSelector,
        outputChannel: vscode_1.window.createOutputChannel("refjava"),
    };
    client = new node_1.LanguageClient("refjava", "refjava", (0, server_1.serverOptionsFor)(serverPath), clientOptions);
    context.subscriptions.push(client);
    try {
        await client.start();
    }
    catch (err) {
        client = undefined;
        vscode_1.window.showErrorMessage((0, server_1.missingServerHint)(serverPath));
    }
}
function deactivate() {
    return client?.stop();
}
//# sourceMappingURL=extension.js.map