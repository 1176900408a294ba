import type { AtlasDocument, FilterResponse, SearchResponse } from "./types";

export class ApiError extends Error {}

/**
 * Thin client over the read-only atlas API.
 *
 * Each control gets latest-wins semantics: a new search aborts the one
 * still in flight, and an aborted call resolves to null so the caller
 * can simply ignore it instead of racing stale results into the UI.
 */
export class AtlasClient {
  private baseUrl: string;
  private inflight = new Map<string, AbortController>();

  constructor(baseUrl = "") {
    this.baseUrl = baseUrl.replace(/\/$/, "");
  }

  /** Live API first, bundled document second (offline demo mode). */
  async loadAtlas(): Promise<AtlasDocument> {
    for (const path of ["/api/atlas", "/atlas.json"]) {
      try {
        const response = await fetch(this.baseUrl + path);
        if (response.ok) return (await response.json()) as AtlasDocument;
      } catch {
        // fall through to the next source
      }
    }
    throw new ApiError("could not load the atlas from the API or the bundled file");
  }

  async search(query: string, limit = 10): Promise<SearchResponse | null> {
    const params = new URLSearchParams({ q: query, limit: String(limit) });
    return this.latestWins("search", `/api/search?${params}`) as Promise<SearchResponse | null>;
  }

  async filter(selections: Record<string, string[]>): Promise<FilterResponse | null> {
    const params = new URLSearchParams();
    for (const [facet, values] of Object.entries(selections)) {
      for (const value of values) params.append(facet, value);
    }
    return this.latestWins("filter", `/api/filter?${params}`) as Promise<FilterResponse | null>;
  }

  private async latestWins(key: string, path: string): Promise<unknown | null> {
    this.inflight.get(key)?.abort();
    const controller = new AbortController();
    this.inflight.set(key, controller);
    try {
      const response = await fetch(this.baseUrl + path, { signal: controller.signal });
      if (!response.ok) throw new ApiError(`${path} failed with ${response.status}`);
      return await response.json();
    } catch (err) {
      if (controller.signal.aborted) return null; // superseded, not an error
      throw err instanceof ApiError ? err : new ApiError(String(err));
    } finally {
      if (this.inflight.get(key) === controller) this.inflight.delete(key);
    }
  }
}
