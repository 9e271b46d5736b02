/**
 * The egress guard: every outgoing request the page or a running application
 * makes goes through a guarded fetch that only lets whitelisted origins pass.
 * The browser's Content-Security-Policy (served by the hub) enforces the same
 * list at the platform level; this wrapper makes the policy observable and
 * auditable inside the application too.
 */

export const EXTERNAL_ORIGINS = [
  "https://*.r-wasm.org",
  "https://cdn.jsdelivr.net",
  "https://pypi.org",
  "https://files.pythonhosted.org",
  "https://raw.githubusercontent.com",
] as const;

export class EgressBlocked extends Error {
  constructor(public readonly url: string) {
    super(`request to non-whitelisted origin blocked: ${url}`);
  }
}

export function urlOrigin(url: string): string {
  const parsed = new URL(url);
  return `${parsed.protocol}//${parsed.host}`.toLowerCase();
}

export function originMatches(origin: string, pattern: string): boolean {
  const [patternScheme, patternHost] = pattern.toLowerCase().split("://");
  const [originScheme, originHost] = origin.toLowerCase().split("://");
  if (!patternScheme || !patternHost || patternScheme !== originScheme || !originHost) {
    return false;
  }
  if (patternHost.startsWith("*.")) {
    return originHost.endsWith(patternHost.slice(1));
  }
  return originHost === patternHost;
}

export function originAllowed(url: string, ownOrigin: string): boolean {
  let origin: string;
  try {
    origin = urlOrigin(url);
  } catch {
    return false;
  }
  if (origin === ownOrigin.toLowerCase()) return true;
  return EXTERNAL_ORIGINS.some((pattern) => originMatches(origin, pattern));
}

export interface AuditEntry {
  url: string;
  method: string;
  allowed: boolean;
  /** Snapshot of the request body when one was supplied. */
  body?: Uint8Array;
}

export interface GuardedFetch {
  (input: string, init?: RequestInit): Promise<Response>;
  readonly audit: AuditEntry[];
}

/**
 * Wrap a fetch implementation so that only whitelisted origins go out.
 * Every attempt, allowed or blocked, lands in the audit trail.
 */
export function makeGuardedFetch(ownOrigin: string, baseFetch: typeof fetch): GuardedFetch {
  const audit: AuditEntry[] = [];
  const guarded = async (input: string, init?: RequestInit): Promise<Response> => {
    const method = init?.method ?? "GET";
    const allowed = originAllowed(input, ownOrigin);
    let body: Uint8Array | undefined;
    const raw = init?.body;
    if (typeof raw === "string") {
      body = new TextEncoder().encode(raw);
    } else if (raw instanceof Uint8Array) {
      body = raw.slice();
    } else if (raw instanceof ArrayBuffer) {
      body = new Uint8Array(raw.slice(0));
    }
    audit.push({ url: input, method, allowed, body });
    if (!allowed) {
      throw new EgressBlocked(input);
    }
    return baseFetch(input, init);
  };
  return Object.assign(guarded, { audit });
}

/** True when a request body contains `needle` as a contiguous subsequence. */
export function bodyContains(body: Uint8Array | undefined, needle: Uint8Array): boolean {
  if (!body || needle.byteLength === 0 || body.byteLength < needle.byteLength) {
    return false;
  }
  outer: for (let start = 0; start <= body.byteLength - needle.byteLength; start++) {
    for (let offset = 0; offset < needle.byteLength; offset++) {
      if (body[start + offset] !== needle[offset]) continue outer;
    }
    return true;
  }
  return false;
}
