/** Typed client for the ranking/grid API. The UI never computes ratings
 * itself; every piece of rating state comes from these endpoints. */
export class ApiError extends Error {
    constructor(status, message) {
        super(message);
        this.status = status;
        this.name = "ApiError";
    }
}
export class ApiClient {
    constructor(baseUrl = "", fetchImpl, clientId) {
        this.baseUrl = baseUrl;
        this.clientId = clientId;
        this.fetchImpl = fetchImpl ?? globalThis.fetch.bind(globalThis);
    }
    async request(method, path, body) {
        const headers = {};
        if (body !== undefined)
            headers["Content-Type"] = "application/json";
        if (this.clientId)
            headers["X-Client-Id"] = this.clientId;
        const res = await this.fetchImpl(this.baseUrl + path, {
            method,
            headers,
            body: body === undefined ? undefined : JSON.stringify(body),
        });
        if (!res.ok) {
            let detail = res.statusText;
            try {
                const doc = await res.json();
                if (doc && doc.detail)
                    detail = JSON.stringify(doc.detail);
            }
            catch {
                // non-JSON error body; keep the status text
            }
            throw new ApiError(res.status, `${method} ${path}: ${detail}`);
        }
        return (await res.json());
    }
    getPair() {
        return this.request("GET", "/api/pair");
    }
    postOutcome(req) {
        return this.request("POST", "/api/outcome", req);
    }
    postScore(req) {
        return this.request("POST", "/api/score", req);
    }
    getRatings() {
        return this.request("GET", "/api/ratings");
    }
    getGrid(runId) {
        return this.request("GET", `/api/grid/${encodeURIComponent(runId)}`);
    }
}
