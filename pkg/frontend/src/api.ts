/** Typed client for the hub's HTTP routes. All traffic flows through the
 * injected (guarded) fetch; the bearer token lives only in memory. */

import type {
  ApplicationManifest,
  ApplicationSummary,
  DatasetSummary,
  ProblemDocument,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly problem: ProblemDocument,
  ) {
    super(`${status}: ${problem.message}`);
  }
}

export interface CatalogueFilters {
  tag?: string;
  q?: string;
  allVersions?: boolean;
}

export class HubClient {
  private token: string | null = null;

  constructor(
    public readonly baseUrl: string,
    private readonly fetchImpl: (input: string, init?: RequestInit) => Promise<Response>,
  ) {}

  get loggedIn(): boolean {
    return this.token !== null;
  }

  private authHeaders(): Record<string, string> {
    return this.token ? { Authorization: `Bearer ${this.token}` } : {};
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      ...init,
      headers: { ...this.authHeaders(), ...(init?.headers as Record<string, string> | undefined) },
    });
    if (!response.ok) {
      let problem: ProblemDocument;
      try {
        problem = (await response.json()) as ProblemDocument;
      } catch {
        problem = { code: "http_error", message: response.statusText };
      }
      throw new ApiError(response.status, problem);
    }
    return response;
  }

  async listApplications(filters: CatalogueFilters = {}): Promise<ApplicationSummary[]> {
    const params = new URLSearchParams();
    if (filters.tag) params.set("tag", filters.tag);
    if (filters.q) params.set("q", filters.q);
    if (filters.allVersions) params.set("all_versions", "true");
    const query = params.toString();
    const response = await this.request(`/applications${query ? `?${query}` : ""}`);
    return (await response.json()) as ApplicationSummary[];
  }

  async applicationDetail(name: string, version: string): Promise<ApplicationManifest> {
    const response = await this.request(
      `/applications/${encodeURIComponent(name)}/${encodeURIComponent(version)}`,
    );
    return (await response.json()) as ApplicationManifest;
  }

  async applicationSource(name: string, version: string): Promise<{ inline?: string; url?: string }> {
    const response = await this.request(
      `/applications/${encodeURIComponent(name)}/${encodeURIComponent(version)}/source`,
    );
    return (await response.json()) as { inline?: string; url?: string };
  }

  async publishApplication(document: unknown): Promise<{ name: string; version: string }> {
    const response = await this.request("/applications", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(document),
    });
    return (await response.json()) as { name: string; version: string };
  }

  async register(handle: string, password: string): Promise<void> {
    await this.request("/auth/register", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ handle, password }),
    });
  }

  async login(handle: string, password: string): Promise<void> {
    const response = await this.request("/auth/login", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ handle, password }),
    });
    this.token = ((await response.json()) as { token: string }).token;
  }

  async logout(): Promise<void> {
    await this.request("/auth/logout", { method: "POST" });
    this.token = null;
  }

  async storeShare(blob: Uint8Array): Promise<{ token: string; expires_at: string }> {
    const body = new Uint8Array(blob).buffer as ArrayBuffer;
    const response = await this.request("/share", {
      method: "POST",
      headers: { "Content-Type": "application/octet-stream" },
      body,
    });
    return (await response.json()) as { token: string; expires_at: string };
  }

  async fetchShare(token: string): Promise<Uint8Array> {
    const response = await this.request(`/share/${encodeURIComponent(token)}`);
    return new Uint8Array(await response.arrayBuffer());
  }

  async uploadDataset(name: string, description: string, content: Uint8Array): Promise<string> {
    const response = await this.request("/data", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({
        name,
        description,
        content_b64: base64OfBytes(content),
      }),
    });
    return ((await response.json()) as { dataset_id: string }).dataset_id;
  }

  async listDatasets(): Promise<DatasetSummary[]> {
    const response = await this.request("/data");
    return (await response.json()) as DatasetSummary[];
  }

  async datasetContent(datasetId: string): Promise<Uint8Array> {
    const response = await this.request(`/data/${encodeURIComponent(datasetId)}`);
    return new Uint8Array(await response.arrayBuffer());
  }
}

function base64OfBytes(bytes: Uint8Array): string {
  let binary = "";
  for (let i = 0; i < bytes.byteLength; i++) binary += String.fromCharCode(bytes[i]!);
  return btoa(binary);
}
