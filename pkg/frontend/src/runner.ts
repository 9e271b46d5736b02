/**
 * Executing one configured run: stage files, invoke the entry point inside
 * the matching runtime host, and interpret the returned value against the
 * manifest's declared return contract. Applapplication failures are captured,
 * never propagated into the page state, and runs are queued one at a time.
 */

import type { HubClient } from "./api.js";
import type { GuardedFetch } from "./netguard.js";
import type { RuntimeHost, RuntimeRegistry } from "./runtimes.js";
import type { ApplicationManifest, RunConfiguration, RunOutcome } from "./types.js";

export class ApplicationError extends Error {
  constructor(
    message: string,
    public readonly diagnostics: string,
  ) {
    super(message);
  }
}

export class ReturnContractViolation extends Error {}

/** Resolve the application source text: inline from the manifest API, or
 * fetched from its whitelisted URL through the guarded fetch. */
export async function resolveSource(
  manifest: ApplicationManifest,
  client: HubClient,
  guardedFetch: GuardedFetch,
): Promise<string> {
  const source = await client.applicationSource(manifest.name, manifest.version);
  if (source.inline !== undefined) {
    return source.inline;
  }
  const response = await guardedFetch(source.url!);
  if (!response.ok) {
    throw new Error(`fetching application source failed: ${response.status}`);
  }
  return await response.text();
}

export class Runner {
  private queue: Promise<unknown> = Promise.resolve();

  constructor(private readonly registry: RuntimeRegistry) {}

  /** Runs execute one at a time; a queued run starts when the previous one
   * settles, success or failure. */
  execute(config: RunConfiguration, sourceText: string): Promise<RunOutcome> {
    const next = this.queue.then(() => this.executeNow(config, sourceText));
    this.queue = next.catch(() => undefined);
    return next;
  }

  private async executeNow(config: RunConfiguration, sourceText: string): Promise<RunOutcome> {
    const host = this.registry.create(config.application.runtime);
    await host.load();
    for (const [path, content] of config.stagedFiles) {
      host.files.write(path, content);
    }

    let returned: unknown;
    try {
      returned = await host.invoke(
        sourceText,
        config.application.entry_point.function,
        config.argumentValues,
      );
    } catch (error) {
      throw new ApplicationError(
        `application raised: ${error instanceof Error ? error.message : String(error)}`,
        host.diagnostics,
      );
    }
    return interpretResult(config.application, host, returned);
  }
}

function interpretResult(
  manifest: ApplicationManifest,
  host: RuntimeHost,
  returned: unknown,
): RunOutcome {
  const declared = manifest.entry_point.returns;
  if (typeof returned !== "string") {
    throw new ReturnContractViolation(
      `entry point returned ${typeof returned}; expected a string (${declared})`,
    );
  }
  if (declared === "html") {
    return { kind: "html", html: returned, diagnostics: host.diagnostics };
  }
  if (!host.files.exists(returned)) {
    throw new ReturnContractViolation(
      `entry point returned file name ${returned} but wrote no such file`,
    );
  }
  return {
    kind: "file",
    fileName: returned,
    fileBytes: host.files.read(returned),
    diagnostics: host.diagnostics,
  };
}
