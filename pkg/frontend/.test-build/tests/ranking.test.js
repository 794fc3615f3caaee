import assert from "node:assert/strict";
import { test } from "node:test";
import { ApiClient } from "../src/api.js";
import { KEY_BINDINGS, RankingController } from "../src/ranking.js";
import { HeadlessView, jsonResponse, outcomeResponse, pairResponse, scriptedFetch, } from "./helpers.js";
function controllerWith(script) {
    const log = [];
    const api = new ApiClient("", scriptedFetch(script, log));
    const view = new HeadlessView();
    return { controller: new RankingController(api, view), view, log };
}
test("keyboard and click paths emit identical outcome requests", async () => {
    const script = [
        () => jsonResponse(200, pairResponse("x", "y")),
        () => jsonResponse(200, outcomeResponse("x", "y")),
        () => jsonResponse(200, pairResponse("x", "y")),
        () => jsonResponse(200, pairResponse("x", "y")),
        () => jsonResponse(200, outcomeResponse("x", "y")),
        () => jsonResponse(200, pairResponse("x", "y")),
    ];
    const clicked = controllerWith(script.slice());
    await clicked.controller.start();
    await clicked.controller.choose("a");
    const keyed = controllerWith(script.slice());
    await keyed.controller.start();
    const did = await keyed.controller.handleKey("ArrowLeft");
    assert.equal(did, "a");
    const clickedOutcome = clicked.log.find((r) => r.path === "/api/outcome");
    const keyedOutcome = keyed.log.find((r) => r.path === "/api/outcome");
    assert.deepEqual(clickedOutcome, keyedOutcome);
    // all three bindings map to distinct results
    assert.deepEqual([KEY_BINDINGS["ArrowLeft"], KEY_BINDINGS["ArrowRight"], KEY_BINDINGS[" "]], ["a", "b", "draw"]);
});
test("unbound keys do nothing", async () => {
    const { controller, log } = controllerWith([
        () => jsonResponse(200, pairResponse("x", "y")),
    ]);
    await controller.start();
    assert.equal(await controller.handleKey("q"), null);
    assert.equal(log.filter((r) => r.path === "/api/outcome").length, 0);
});
test("a shown pair is submitted at most once", async () => {
    let resolveOutcome;
    const outcomePromise = new Promise((res) => (resolveOutcome = res));
    const log = [];
    const api = new ApiClient("", async (input, init) => {
        const req = {
            method: init?.method ?? "GET",
            path: input,
            body: init?.body ? JSON.parse(String(init.body)) : undefined,
            headers: {},
        };
        log.push(req);
        if (input === "/api/pair") {
            return jsonResponse(200, pairResponse("x", "y", { complete: false }));
        }
        return outcomePromise;
    });
    const view = new HeadlessView();
    const controller = new RankingController(api, view);
    await controller.start();
    // two rapid actions on the same pair: only one outcome request leaves
    const first = controller.choose("a");
    const second = controller.choose("b");
    resolveOutcome(jsonResponse(200, outcomeResponse("x", "y", true)));
    await Promise.all([first, second]);
    assert.equal(log.filter((r) => r.path === "/api/outcome").length, 1);
    assert.deepEqual(log.find((r) => r.path === "/api/outcome").body, {
        a: "x",
        b: "y",
        result: "a",
    });
});
test("completion screen appears exactly when the API reports complete", async () => {
    const { controller, view } = controllerWith([
        () => jsonResponse(200, pairResponse("x", "y")),
        () => jsonResponse(200, outcomeResponse("x", "y", false)),
        () => jsonResponse(200, pairResponse("x", "z")),
        () => jsonResponse(200, outcomeResponse("x", "z", true, 2)),
    ]);
    await controller.start();
    await controller.choose("a");
    assert.equal(view.completions.length, 0);
    await controller.choose("b");
    assert.equal(view.completions.length, 1);
    assert.equal(view.completions[0].comparisons, 2);
    // no pair is shown after completion, so no further outcomes are possible
    assert.equal(controller.currentPair, null);
    assert.equal(await controller.choose("a"), null);
});
test("a pair fetch reporting complete goes straight to the end screen", async () => {
    const { controller, view } = controllerWith([
        () => jsonResponse(200, {
            ...pairResponse("x", "y"),
            progress: { max_rd: 180, complete: true, comparisons: 40 },
        }),
    ]);
    await controller.start();
    assert.equal(view.pairs.length, 0);
    assert.equal(view.completions.length, 1);
});
test("connection failure shows retry banner; retry refetches, never resubmits", async () => {
    let failNext = true;
    const log = [];
    const api = new ApiClient("", async (input, init) => {
        log.push({
            method: init?.method ?? "GET",
            path: input,
            body: init?.body ? JSON.parse(String(init.body)) : undefined,
            headers: {},
        });
        if (input === "/api/outcome" && failNext) {
            failNext = false;
            throw new Error("network down");
        }
        if (input === "/api/pair") {
            return jsonResponse(200, pairResponse("x", "y"));
        }
        return jsonResponse(200, outcomeResponse("x", "y"));
    });
    const view = new HeadlessView();
    const controller = new RankingController(api, view);
    await controller.start();
    await controller.choose("a");
    assert.equal(view.errors.length, 1);
    await controller.retry();
    assert.equal(view.pairs.length, 2);
    // the failed outcome was not resubmitted by the retry
    assert.equal(log.filter((r) => r.path === "/api/outcome").length, 1);
    // the fresh pair accepts a new outcome
    await controller.choose("draw");
    assert.equal(log.filter((r) => r.path === "/api/outcome").length, 2);
});
test("direct scores post through the score endpoint", async () => {
    const { controller, log } = controllerWith([
        () => jsonResponse(200, pairResponse("x", "y")),
        () => jsonResponse(200, { id: "x", score: 4.5 }),
    ]);
    await controller.start();
    assert.equal(await controller.scoreImage("x", 4.5), true);
    const score = log.find((r) => r.path === "/api/score");
    assert.deepEqual(score.body, { id: "x", score: 4.5 });
});
