/** Ranking-session state machine, independent of the DOM.
 *
 * Exactly one API request per user action: a shown pair carries a token and
 * each token is submitted at most once, so a re-render or repeated key press
 * can never double-report an outcome. On a connection failure the controller
 * surfaces a retry banner and the retry fetches a fresh pair (a safe GET)
 * instead of resubmitting.
 */
export const KEY_BINDINGS = {
    ArrowLeft: "a",
    ArrowRight: "b",
    " ": "draw",
};
let tokenCounter = 0;
function nextToken() {
    tokenCounter += 1;
    return `pair-${tokenCounter}`;
}
export class RankingController {
    constructor(api, view) {
        this.api = api;
        this.view = view;
        this.pair = null;
        this.pairToken = null;
        this.submittedTokens = new Set();
        this.busy = false;
    }
    get currentPair() {
        return this.pair;
    }
    async start() {
        await this.loadPair();
    }
    /** Retry after a connection failure: safe re-fetch, never a resubmit. */
    async retry() {
        await this.loadPair();
    }
    async loadPair() {
        this.view.setBusy(true);
        try {
            const pair = await this.api.getPair();
            if (pair.progress.complete) {
                this.pair = null;
                this.pairToken = null;
                this.view.showComplete(pair.progress);
                return;
            }
            this.pair = pair;
            this.pairToken = nextToken();
            this.view.showPair(pair);
        }
        catch (err) {
            this.view.showError(String(err));
        }
        finally {
            this.view.setBusy(false);
        }
    }
    /** Record an outcome for the shown pair; no-op without a visible pair. */
    async choose(result) {
        if (this.busy || this.pair === null || this.pairToken === null)
            return null;
        if (this.submittedTokens.has(this.pairToken))
            return null;
        this.submittedTokens.add(this.pairToken);
        this.busy = true;
        this.view.setBusy(true);
        try {
            const res = await this.api.postOutcome({
                a: this.pair.a.id,
                b: this.pair.b.id,
                result,
            });
            this.pair = null;
            this.pairToken = null;
            if (res.complete) {
                this.view.showComplete({
                    max_rd: Math.max(res.a.rd, res.b.rd),
                    complete: true,
                    comparisons: res.comparisons,
                });
            }
            else {
                await this.loadPair();
            }
            return res;
        }
        catch (err) {
            // outcome may or may not have landed; do not resubmit this token
            this.view.showError(String(err));
            return null;
        }
        finally {
            this.busy = false;
            this.view.setBusy(false);
        }
    }
    /** Keyboard path: identical request to the corresponding click. */
    async handleKey(key) {
        const result = KEY_BINDINGS[key];
        if (result === undefined)
            return null;
        await this.choose(result);
        return result;
    }
    /** Direct 0-5 score for one of the shown images. */
    async scoreImage(id, score) {
        try {
            await this.api.postScore({ id, score });
            return true;
        }
        catch (err) {
            this.view.showError(String(err));
            return false;
        }
    }
}
