/** Browser entry point: hash routing between the ranking screen and the
 * grid browser, with all state coming from the HTTP API. */
import { ApiClient } from "./api.js";
import { GridController, sparklinePoints } from "./grid.js";
import { KEY_BINDINGS, RankingController } from "./ranking.js";
const app = document.getElementById("app");
const api = new ApiClient("", undefined, sessionClientId());
function sessionClientId() {
    const key = "qdart-client-id";
    let id = window.sessionStorage.getItem(key);
    if (!id) {
        id = `web-${Math.random().toString(36).slice(2)}`;
        window.sessionStorage.setItem(key, id);
    }
    return id;
}
function el(tag, className, text) {
    const node = document.createElement(tag);
    if (className)
        node.className = className;
    if (text !== undefined)
        node.textContent = text;
    return node;
}
/* ---------------------------------------------------------- ranking view */
class DomRankingView {
    attach(controller) {
        this.controller = controller;
        window.addEventListener("keydown", (ev) => {
            const hash = location.hash || "#rank";
            if (ev.key in KEY_BINDINGS && hash.startsWith("#rank")) {
                ev.preventDefault();
                void this.controller.handleKey(ev.key);
            }
        });
    }
    showPair(pair) {
        app.replaceChildren();
        const header = el("div", "progress");
        header.append(el("span", undefined, `comparisons: ${pair.progress.comparisons}`), el("span", undefined, `max RD: ${pair.progress.max_rd.toFixed(1)} (target < 250)`));
        const row = el("div", "pair-row");
        row.append(this.card(pair.a.id, pair.a.png_url, "a", "left (←)"), this.card(pair.b.id, pair.b.png_url, "b", "right (→)"));
        const drawBtn = el("button", "draw-btn", "draw (space)");
        drawBtn.addEventListener("click", () => void this.controller.choose("draw"));
        const question = el("p", "question", "which one of these images do you like the most?");
        app.append(header, question, row, drawBtn);
    }
    card(id, pngUrl, side, label) {
        const card = el("div", "card");
        const img = el("img");
        img.src = pngUrl;
        img.alt = id;
        img.addEventListener("click", () => void this.controller.choose(side));
        const pick = el("button", undefined, label);
        pick.addEventListener("click", () => void this.controller.choose(side));
        const scoreRow = el("div", "score-row");
        const slider = el("input");
        slider.type = "range";
        slider.min = "0";
        slider.max = "5";
        slider.step = "0.5";
        slider.value = "2.5";
        const send = el("button", undefined, "score");
        send.addEventListener("click", () => void this.controller.scoreImage(id, Number(slider.value)));
        scoreRow.append(slider, send);
        card.append(img, pick, scoreRow);
        return card;
    }
    showComplete(progress) {
        app.replaceChildren();
        const panel = el("div", "complete");
        panel.append(el("h2", undefined, "session complete"), el("p", undefined, `every image now has RD below the stopping threshold after ` +
            `${progress.comparisons} comparisons.`));
        const link = el("a", undefined, "export ratings (CSV via qdart export)");
        link.setAttribute("href", "/api/ratings");
        panel.append(link);
        app.append(panel);
    }
    showError(message) {
        const banner = el("div", "error-banner");
        banner.append(el("span", undefined, `connection problem: ${message}`));
        const retry = el("button", undefined, "retry");
        retry.addEventListener("click", () => {
            banner.remove();
            void this.controller.retry();
        });
        banner.append(retry);
        app.prepend(banner);
    }
    setBusy(busy) {
        app.classList.toggle("busy", busy);
    }
}
/* ------------------------------------------------------------- grid view */
class DomGridView {
    constructor(controller) {
        this.controller = controller;
    }
    showGrid(grid, tiles) {
        app.replaceChildren();
        app.append(el("h2", undefined, `run ${grid.run_id}`));
        const table = el("div", "grid");
        table.style.gridTemplateColumns = `repeat(${grid.grid_n}, 1fr)`;
        for (const row of tiles) {
            for (const tile of row) {
                const cellEl = el("div", tile.cell ? "tile occupied" : "tile empty");
                if (tile.cell && tile.color) {
                    cellEl.style.borderColor = tile.color;
                    const img = el("img");
                    img.src = tile.cell.png_url;
                    img.alt = tile.cell.id;
                    img.title = `fitness ${tile.cell.fitness.toFixed(3)}`;
                    cellEl.append(img);
                    cellEl.addEventListener("click", () => this.controller().select(tile.i, tile.j));
                }
                table.append(cellEl);
            }
        }
        const stats = el("div", "stats");
        for (const field of ["mean_fitness", "occupancy"]) {
            const block = el("div", "spark");
            block.append(el("span", undefined, field.replace("_", " ")));
            const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
            svg.setAttribute("viewBox", "0 0 220 48");
            const line = document.createElementNS("http://www.w3.org/2000/svg", "polyline");
            line.setAttribute("points", sparklinePoints(grid.stats, field));
            line.setAttribute("fill", "none");
            line.setAttribute("stroke", field === "occupancy" ? "#e9c46a" : "#2a9d8f");
            svg.append(line);
            block.append(svg);
            stats.append(block);
        }
        app.append(table, stats, el("div", "detail"));
    }
    showDetail(cell) {
        const panel = app.querySelector(".detail");
        if (!panel)
            return;
        panel.replaceChildren();
        const img = el("img", "full");
        img.src = cell.png_url;
        img.alt = cell.id;
        panel.append(img, el("p", undefined, `${cell.id} at cell (${cell.i}, ${cell.j}), fitness ${cell.fitness.toFixed(4)}`), el("code", undefined, cell.genotype ? JSON.stringify(cell.genotype.map((g) => Number(g.toFixed(4)))) : ""));
    }
    showNotFound(runId) {
        app.replaceChildren(el("p", "error-banner", `no run named "${runId}" was found`));
    }
    showError(message) {
        app.replaceChildren(el("p", "error-banner", message));
    }
}
/* ---------------------------------------------------------------- router */
function route() {
    const hash = location.hash || "#rank";
    if (hash.startsWith("#grid/")) {
        const runId = hash.slice("#grid/".length);
        let controller;
        const view = new DomGridView(() => controller);
        controller = new GridController(api, view);
        void controller.load(runId);
    }
    else {
        const view = new DomRankingView();
        const controller = new RankingController(api, view);
        view.attach(controller);
        void controller.start();
    }
}
window.addEventListener("hashchange", route);
route();
