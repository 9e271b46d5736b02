/**
 * Global test setup: seed a throwaway hub database, start the real hub
 * server as a subprocess, and expose its URL to the tests. The frontend is
 * exercised against the genuine HTTP surface, never an in-process fake.
 */

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export const HUB_INFO_PATH = join(tmpdir(), "sandhub-frontend-hub.json");

let server: ChildProcess | null = null;
let workDir: string | null = null;

async function waitForReady(url: string, timeoutMs = 30_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${url}/applications`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error(`hub server did not become ready at ${url}`);
}

export default async function setup(): Promise<() => void> {
  workDir = mkdtempSync(join(tmpdir(), "sandhub-hub-"));
  const dbPath = join(workDir, "hub.db");

  const seeded = spawnSync("python3", ["-m", "sandhub.cli", "seed", "--db", dbPath], {
    encoding: "utf-8",
  });
  if (seeded.status !== 0) {
    throw new Error(`seeding failed: ${seeded.stderr}`);
  }

  const port = 8700 + Math.floor(Math.random() * 800);
  const url = `http://127.0.0.1:${port}`;
  server = spawn(
    "python3",
    ["-m", "sandhub.cli", "serve", "--db", dbPath, "--host", "127.0.0.1", "--port", String(port)],
    { stdio: "ignore" },
  );
  await waitForReady(url);
  writeFileSync(HUB_INFO_PATH, JSON.stringify({ url, dbPath }));

  return () => {
    server?.kill();
    if (workDir) rmSync(workDir, { recursive: true, force: true });
  };
}
