import { spawnSync } from "node:child_process";
import { readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { HubClient } from "../src/api.js";
import { makeGuardedFetch, type GuardedFetch } from "../src/netguard.js";
import { SandboxFiles } from "../src/sandbox.js";
import type { RuntimeHost } from "../src/runtimes.js";
import type { ArgumentValue, RuntimeName } from "../src/types.js";

export interface HubInfo {
  url: string;
  dbPath: string;
}

export function hubInfo(): HubInfo {
  return JSON.parse(
    readFileSync(join(tmpdir(), "sandhub-frontend-hub.json"), "utf-8"),
  ) as HubInfo;
}

export function hubClient(): { client: HubClient; guardedFetch: GuardedFetch; hub: HubInfo } {
  const hub = hubInfo();
  const guardedFetch = makeGuardedFetch(hub.url, fetch);
  return { client: new HubClient(hub.url, guardedFetch), guardedFetch, hub };
}

/** Run the hub CLI; throws on nonzero exit. */
export function cli(args: string[], env: Record<string, string> = {}): string {
  const result = spawnSync("python3", ["-m", "sandhub.cli", ...args], {
    encoding: "utf-8",
    env: { ...process.env, ...env },
  });
  if (result.status !== 0) {
    throw new Error(`cli ${args.join(" ")} failed:\n${result.stdout}\n${result.stderr}`);
  }
  return result.stdout;
}

export type ScriptedBehavior = (
  source: string,
  functionName: string,
  args: ArgumentValue[],
  host: ScriptedHost,
) => unknown | Promise<unknown>;

/**
 * Test double standing in for an embedded WASM interpreter (those are
 * third-party components and out of scope here). The behaviour function is
 * the pretend interpreter; everything around it — source delivery, staging,
 * argument passing, return-contract handling — is the real pipeline.
 */
export class ScriptedHost implements RuntimeHost {
  readonly files = new SandboxFiles();
  loaded = false;
  lastSource: string | null = null;
  lastFunction: string | null = null;
  lastArgs: ArgumentValue[] = [];
  diagnostics = "";

  constructor(
    readonly runtime: RuntimeName,
    private readonly behavior: ScriptedBehavior,
  ) {}

  async load(): Promise<void> {
    this.loaded = true;
  }

  async invoke(source: string, functionName: string, args: ArgumentValue[]): Promise<unknown> {
    this.lastSource = source;
    this.lastFunction = functionName;
    this.lastArgs = args;
    return await this.behavior(source, functionName, args, this);
  }
}

export function randomHandle(prefix: string): string {
  return `${prefix}-${Math.random().toString(36).slice(2, 10)}`;
}
