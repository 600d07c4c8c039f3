import { ExtensionContext, window, workspace } from "vscode";
import { LanguageClient, LanguageClientOptions } from "vscode-languageclient/node";

import { documentSelector, missingServerHint, serverOptionsFor } from "./server";

let client: LanguageClient | undefined;

export async function activate(context: ExtensionContext) {
  const serverPath = workspace
    .getConfiguration("refjava")
    .get<string>("serverPath", "refjava");

  const clientOptions: LanguageClientOptions = {
    documentSelector,
    outputChannel: window.createOutputChannel("refjava"),
  };

  client = new LanguageClient(
    "refjava",
    "refjava",
    serverOptionsFor(serverPath),
    clientOptions
  );
  context.subscriptions.push(client);

  try {
    await client.start();
  } catch (err) {
    client = undefined;
    window.showErrorMessage(missingServerHint(serverPath));
  }
}

export function deactivate(): Thenable<void> | undefined {
  return client?.stop();
}
