/**
 * Browser bootstrap: wires the page models to the DOM. Kept deliberately
 * thin — everything interesting lives in the testable modules.
 */

import { HubClient } from "./api.js";
import { loadIndex } from "./catalogue.js";
import { argumentValues, buildRunForm, runEnabled, setFieldInput } from "./forms.js";
import { makeGuardedFetch } from "./netguard.js";
import { Runner, resolveSource, ApplicationError } from "./runner.js";
import { defaultRegistry } from "./runtimes.js";
import { SandboxFiles, stageLocalFile } from "./sandbox.js";
import { receiveResult, shareResult, tokenFromLink } from "./share.js";
import type { RunConfiguration } from "./types.js";
import { renderApplicationFailure, renderIndex, renderOutcome, renderRunPage } from "./view.js";

export function boot(root: HTMLElement): void {
  const ownOrigin = window.location.origin;
  const guardedFetch = makeGuardedFetch(ownOrigin, fetch.bind(window));
  const client = new HubClient(ownOrigin, guardedFetch);
  const runner = new Runner(defaultRegistry(guardedFetch));

  const receiveToken = tokenFromLink(window.location.href);
  if (window.location.pathname.endsWith("/receive") && receiveToken) {
    void mountReceive(root, client, receiveToken);
    return;
  }
  void mountIndex(root, client, runner, guardedFetch);
}

async function mountIndex(
  root: HTMLElement,
  client: HubClient,
  runner: Runner,
  guardedFetch: ReturnType<typeof makeGuardedFetch>,
): Promise<void> {
  const model = await loadIndex(client);
  root.innerHTML = renderIndex(model);
  root.querySelectorAll<HTMLElement>("li.application").forEach((item) => {
    item.addEventListener("click", () => {
      void mountRunPage(root, client, runner, guardedFetch, item.dataset.name!, item.dataset.version!);
    });
  });
}

async function mountRunPage(
  root: HTMLElement,
  client: HubClient,
  runner: Runner,
  guardedFetch: ReturnType<typeof makeGuardedFetch>,
  name: string,
  version: string,
): Promise<void> {
  const manifest = await client.applicationDetail(name, version);
  const form = buildRunForm(manifest);
  const sandbox = new SandboxFiles();
  root.innerHTML = renderRunPage(form);
  const resultRegion = root.querySelector(".result-region")!;
  const runButton = root.querySelector<HTMLButtonElement>("button.run")!;

  const refresh = () => {
    runButton.disabled = !runEnabled(form);
  };
  root.querySelectorAll<HTMLInputElement>(".parameters input").forEach((input) => {
    input.addEventListener("change", async () => {
      if (input.type === "file") {
        const picked = input.files?.[0];
        if (!picked) return; // cancelled: argument stays unset, Run stays disabled
        const content = new Uint8Array(await picked.arrayBuffer());
        const staged = stageLocalFile(sandbox, picked.name, content);
        if (staged.largeFileWarning) {
          console.warn(`${picked.name} is large; in-memory staging may fail`);
        }
        setFieldInput(form, input.name, staged.sandboxPath);
      } else if (input.type === "checkbox") {
        setFieldInput(form, input.name, input.checked);
      } else {
        setFieldInput(form, input.name, input.value);
      }
      refresh();
    });
  });

  runButton.addEventListener("click", async (event) => {
    event.preventDefault();
    const config: RunConfiguration = {
      application: manifest,
      argumentValues: argumentValues(form),
      stagedFiles: new Map(sandbox.paths().map((p) => [p, sandbox.read(p)])),
    };
    try {
      const source = await resolveSource(manifest, client, guardedFetch);
      const outcome = await runner.execute(config, source);
      resultRegion.innerHTML = renderOutcome(outcome);
      const saveButton = resultRegion.querySelector<HTMLButtonElement>("button.save");
      if (saveButton && outcome.kind === "file") {
        saveButton.addEventListener("click", () => {
          const blob = new Blob([outcome.fileBytes.slice().buffer]);
          const anchor = document.createElement("a");
          anchor.href = URL.createObjectURL(blob);
          anchor.download = outcome.fileName;
          anchor.click();
          URL.revokeObjectURL(anchor.href);
        });
      }
      const passphrase = prompt("Passphrase to share this result (cancel to skip):");
      if (passphrase) {
        const handle = await shareResult(outcome, passphrase, client);
        console.info(`share link: ${handle.link}`);
      }
    } catch (error) {
      if (error instanceof ApplicationError) {
        resultRegion.innerHTML = renderApplicationFailure(error.message, error.diagnostics);
      } else {
        resultRegion.innerHTML = renderApplicationFailure(String(error), "");
      }
    }
  });
}

async function mountReceive(root: HTMLElement, client: HubClient, token: string): Promise<void> {
  const passphrase = prompt("Passphrase:") ?? "";
  try {
    const received = await receiveResult(token, passphrase, client);
    if (received.kind === "html") {
      root.innerHTML = `<div class="result-html">${received.html}</div>`;
    } else {
      root.innerHTML = renderOutcome({
        kind: "file",
        fileName: received.fileName,
        fileBytes: received.fileBytes,
        diagnostics: "",
      });
    }
  } catch (error) {
    root.innerHTML = renderApplicationFailure(String(error), "");
  }
}
