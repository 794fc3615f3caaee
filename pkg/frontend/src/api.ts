/** Typed client for the ranking/grid API. The UI never computes ratings
 * itself; every piece of rating state comes from these endpoints. */

import type {
  GridResponse,
  OutcomeRequest,
  OutcomeResponse,
  PairResponse,
  RatingsResponse,
  ScoreRequest,
} from "./types.js";

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export class ApiClient {
  private readonly fetchImpl: FetchLike;

  constructor(
    private readonly baseUrl: string = "",
    fetchImpl?: FetchLike,
    private readonly clientId?: string,
  ) {
    this.fetchImpl = fetchImpl ?? globalThis.fetch.bind(globalThis);
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const headers: Record<string, string> = {};
    if (body !== undefined) headers["Content-Type"] = "application/json";
    if (this.clientId) headers["X-Client-Id"] = this.clientId;
    const res = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!res.ok) {
      let detail = res.statusText;
      try {
        const doc = await res.json();
        if (doc && doc.detail) detail = JSON.stringify(doc.detail);
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(res.status, `${method} ${path}: ${detail}`);
    }
    return (await res.json()) as T;
  }

  getPair(): Promise<PairResponse> {
    return this.request("GET", "/api/pair");
  }

  postOutcome(req: OutcomeRequest): Promise<OutcomeResponse> {
    return this.request("POST", "/api/outcome", req);
  }

  postScore(req: ScoreRequest): Promise<{ id: string; score: number }> {
    return this.request("POST", "/api/score", req);
  }

  getRatings(): Promise<RatingsResponse> {
    return this.request("GET", "/api/ratings");
  }

  getGrid(runId: string): Promise<GridResponse> {
    return this.request("GET", `/api/grid/${encodeURIComponent(runId)}`);
  }
}
