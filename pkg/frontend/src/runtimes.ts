/**
 * Runtime hosts: the seam between the page and the interpreter sandboxes.
 *
 * The Python and R hosts wrap third-party WASM interpreters fetched lazily
 * from the whitelisted CDNs; nothing loads until a run page actually needs
 * the matching runtime. Their adapters here are deliberately thin — the
 * interpreters themselves are embedded third-party components. The
 * JavaScript host executes application source directly in a scratch scope
 * with an explicit, minimal surface (sandbox filesystem + guarded fetch);
 * page-level isolation for that runtime ultimately rests on the CSP.
 */

import type { GuardedFetch } from "./netguard.js";
import { SandboxFiles } from "./sandbox.js";
import type { ArgumentValue, RuntimeName } from "./types.js";

export class RuntimeLoadFailure extends Error {}

export interface RuntimeHost {
  readonly runtime: RuntimeName;
  /** Fetch/initialise the interpreter. Idempotent. */
  load(): Promise<void>;
  readonly files: SandboxFiles;
  /** Evaluate application source, call its entry point, return the raw result. */
  invoke(source: string, functionName: string, args: ArgumentValue[]): Promise<unknown>;
  /** Captured standard output/error text from the last invoke. */
  readonly diagnostics: string;
}

export type HostFactory = () => RuntimeHost;

export class RuntimeRegistry {
  private factories = new Map<RuntimeName, HostFactory>();

  register(runtime: RuntimeName, factory: HostFactory): void {
    this.factories.set(runtime, factory);
  }

  create(runtime: RuntimeName): RuntimeHost {
    const factory = this.factories.get(runtime);
    if (!factory) {
      throw new RuntimeLoadFailure(`no host registered for runtime ${runtime}`);
    }
    return factory();
  }
}

/** Executes JavaScript applications in-page. The application sees exactly the
 * API object passed in (sandbox files, guarded fetch, console capture) plus
 * whatever the page's CSP lets it reach. */
export class JsSandboxHost implements RuntimeHost {
  readonly runtime: RuntimeName = "javascript";
  readonly files = new SandboxFiles();
  private captured: string[] = [];

  constructor(private readonly guardedFetch: GuardedFetch) {}

  get diagnostics(): string {
    return this.captured.join("\n");
  }

  async load(): Promise<void> {
    // nothing to fetch: the page itself is the runtime
  }

  async invoke(source: string, functionName: string, args: ArgumentValue[]): Promise<unknown> {
    this.captured = [];
    const capture = (...parts: unknown[]) => {
      this.captured.push(parts.map(String).join(" "));
    };
    const sandboxApi = {
      readFile: (path: string) => this.files.read(path),
      writeFile: (path: string, content: Uint8Array) => this.files.write(path, content),
      fetch: this.guardedFetch,
    };
    const consoleShim = { log: capture, error: capture, warn: capture, info: capture };
    const factory = new Function(
      "sandbox",
      "console",
      "fetch",
      `"use strict";\n${source}\n;return (${functionName});`,
    );
    const entry = factory(sandboxApi, consoleShim, this.guardedFetch) as (
      ...values: ArgumentValue[]
    ) => unknown;
    if (typeof entry !== "function") {
      throw new RuntimeLoadFailure(`entry point ${functionName} is not a function`);
    }
    return await entry(...args);
  }
}

/** Lazy adapter around a WASM interpreter fetched from a whitelisted origin.
 * The loader is injected so the page wires in the real Pyodide/WebR
 * bootstrap; environments without network access never construct one. */
export class WasmInterpreterHost implements RuntimeHost {
  readonly files = new SandboxFiles();
  private interpreter: WasmInterpreter | null = null;
  private captured: string[] = [];

  constructor(
    readonly runtime: RuntimeName,
    private readonly loader: () => Promise<WasmInterpreter>,
  ) {}

  get diagnostics(): string {
    return this.captured.join("\n");
  }

  async load(): Promise<void> {
    if (this.interpreter === null) {
      try {
        this.interpreter = await this.loader();
      } catch (error) {
        throw new RuntimeLoadFailure(`failed to load ${this.runtime} runtime: ${String(error)}`);
      }
    }
  }

  async invoke(source: string, functionName: string, args: ArgumentValue[]): Promise<unknown> {
    await this.load();
    this.captured = [];
    for (const path of this.files.paths()) {
      await this.interpreter!.writeFile(path, this.files.read(path));
    }
    const result = await this.interpreter!.callEntryPoint(source, functionName, args, (line) =>
      this.captured.push(line),
    );
    for (const path of await this.interpreter!.listFiles()) {
      this.files.write(path, await this.interpreter!.readFile(path));
    }
    return result;
  }
}

/** The narrow surface the page needs from an embedded interpreter. */
export interface WasmInterpreter {
  writeFile(path: string, content: Uint8Array): Promise<void>;
  readFile(path: string): Promise<Uint8Array>;
  listFiles(): Promise<string[]>;
  callEntryPoint(
    source: string,
    functionName: string,
    args: ArgumentValue[],
    onOutput: (line: string) => void,
  ): Promise<unknown>;
}

export interface RuntimeOrigins {
  python: string;
  r: string;
}

/** The origins each interpreter loads from; both are on the egress whitelist. */
export const RUNTIME_ORIGINS: RuntimeOrigins = {
  python: "https://cdn.jsdelivr.net",
  r: "https://webr.r-wasm.org",
};

/** Production registry: JS runs in-page; Python/R load their interpreters
 * lazily from the whitelisted CDNs via the injected loaders. */
export function defaultRegistry(
  guardedFetch: GuardedFetch,
  loaders: { python?: () => Promise<WasmInterpreter>; r?: () => Promise<WasmInterpreter> } = {},
): RuntimeRegistry {
  const registry = new RuntimeRegistry();
  registry.register("javascript", () => new JsSandboxHost(guardedFetch));
  if (loaders.python) {
    registry.register("python", () => new WasmInterpreterHost("python", loaders.python!));
  }
  if (loaders.r) {
    registry.register("r", () => new WasmInterpreterHost("r", loaders.r!));
  }
  return registry;
}
