/** Shared test helpers: a recording fetch stub and a headless view. */
export function jsonResponse(status, body) {
    return new Response(JSON.stringify(body), {
        status,
        headers: { "Content-Type": "application/json" },
    });
}
/** Scripted fetch: pops one response per request, recording everything. */
export function scriptedFetch(script, log) {
    let cursor = 0;
    return async (input, init) => {
        const req = {
            method: init?.method ?? "GET",
            path: input,
            body: init?.body ? JSON.parse(String(init.body)) : undefined,
            headers: init?.headers ?? {},
        };
        log.push(req);
        if (cursor >= script.length) {
            throw new Error(`unscripted request ${req.method} ${req.path}`);
        }
        return script[cursor++](req);
    };
}
export function pairResponse(aId, bId, progress) {
    return {
        a: { id: aId, png_url: `/api/image/${aId}.png` },
        b: { id: bId, png_url: `/api/image/${bId}.png` },
        progress: { max_rd: 350, complete: false, comparisons: 0, ...progress },
    };
}
function entry(id) {
    return { id, rating: 1500, rd: 290, games: 1, direct_score: null };
}
export function outcomeResponse(aId, bId, complete = false, comparisons = 1) {
    return { a: entry(aId), b: entry(bId), complete, comparisons };
}
export class HeadlessView {
    constructor() {
        this.pairs = [];
        this.errors = [];
        this.completions = [];
        this.busyStates = [];
    }
    showPair(pair) {
        this.pairs.push(pair);
    }
    showComplete(progress) {
        this.completions.push(progress);
    }
    showError(message) {
        this.errors.push(message);
    }
    setBusy(busy) {
        this.busyStates.push(busy);
    }
}
