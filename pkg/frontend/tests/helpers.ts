/** Shared test helpers: a recording fetch stub and a headless view. */

import type { FetchLike } from "../src/api.js";
import type { RankingView } from "../src/ranking.js";
import type {
  OutcomeResponse,
  PairProgress,
  PairResponse,
  RatingEntry,
} from "../src/types.js";

export interface RecordedRequest {
  method: string;
  path: string;
  body: unknown;
  headers: Record<string, string>;
}

export function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

/** Scripted fetch: pops one response per request, recording everything. */
export function scriptedFetch(
  script: Array<(req: RecordedRequest) => Response>,
  log: RecordedRequest[],
): FetchLike {
  let cursor = 0;
  return async (input: string, init?: RequestInit) => {
    const req: RecordedRequest = {
      method: init?.method ?? "GET",
      path: input,
      body: init?.body ? JSON.parse(String(init.body)) : undefined,
      headers: (init?.headers as Record<string, string>) ?? {},
    };
    log.push(req);
    if (cursor >= script.length) {
      throw new Error(`unscripted request ${req.method} ${req.path}`);
    }
    return script[cursor++](req);
  };
}

export function pairResponse(
  aId: string,
  bId: string,
  progress?: Partial<PairProgress>,
): PairResponse {
  return {
    a: { id: aId, png_url: `/api/image/${aId}.png` },
    b: { id: bId, png_url: `/api/image/${bId}.png` },
    progress: { max_rd: 350, complete: false, comparisons: 0, ...progress },
  };
}

function entry(id: string): RatingEntry {
  return { id, rating: 1500, rd: 290, games: 1, direct_score: null };
}

export function outcomeResponse(
  aId: string,
  bId: string,
  complete = false,
  comparisons = 1,
): OutcomeResponse {
  return { a: entry(aId), b: entry(bId), complete, comparisons };
}

export class HeadlessView implements RankingView {
  pairs: PairResponse[] = [];
  errors: string[] = [];
  completions: PairProgress[] = [];
  busyStates: boolean[] = [];

  showPair(pair: PairResponse): void {
    this.pairs.push(pair);
  }

  showComplete(progress: PairProgress): void {
    this.completions.push(progress);
  }

  showError(message: string): void {
    this.errors.push(message);
  }

  setBusy(busy: boolean): void {
    this.busyStates.push(busy);
  }
}
