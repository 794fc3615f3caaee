"""FastAPI application wiring the session store to the JSON API.

All rating state flows through the single SessionStore writer; evolved-run
endpoints are read-only views over a run output directory.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import FastAPI, Header, HTTPException
from fastapi.responses import FileResponse
from fastapi.staticfiles import StaticFiles

from ..glicko import RatedImage
from ..mapelites import GRID_NAME, STATS_NAME, read_stats
from .schemas import (
    GridCell,
    GridResponse,
    ImageRef,
    OutcomeRequest,
    OutcomeResponse,
    PairProgress,
    PairResponse,
    RatingEntry,
    RatingsResponse,
    ScoreRequest,
    ScoreResponse,
    StatsPoint,
)
from .state import AssetIndex, BusyError, SessionStore


def _entry(r: RatedImage) -> RatingEntry:
    return RatingEntry(id=r.image_id, rating=r.rating, rd=r.rd, games=r.games,
                       direct_score=r.direct_score)


def create_app(
    corpus_dir,
    rd_threshold: float = 250.0,
    base_seed: int = 0,
    ui_dir=None,
    runs_dir=None,
) -> FastAPI:
    store = SessionStore(corpus_dir, rd_threshold=rd_threshold, base_seed=base_seed)
    assets = AssetIndex(corpus_dir, runs_dir=runs_dir)
    app = FastAPI(title="qdart", version="0.1.0")
    app.state.store = store
    app.state.assets = assets

    @app.get("/api/pair", response_model=PairResponse)
    def get_pair():
        a, b = store.next_pair()
        return PairResponse(
            a=ImageRef(id=a, png_url=f"/api/image/{a}.png"),
            b=ImageRef(id=b, png_url=f"/api/image/{b}.png"),
            progress=PairProgress(
                max_rd=store.max_rd(),
                complete=store.complete(),
                comparisons=store.comparisons(),
            ),
        )

    @app.post("/api/outcome", response_model=OutcomeResponse)
    def post_outcome(body: OutcomeRequest,
                     x_client_id: str | None = Header(default=None)):
        if body.a == body.b:
            raise HTTPException(status_code=422, detail="a and b must differ")
        try:
            rated_a, rated_b = store.record_outcome(
                body.a, body.b, body.result, client=x_client_id
            )
        except KeyError as exc:
            raise HTTPException(status_code=404,
                                detail=f"unknown image {exc.args[0]}") from exc
        except BusyError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        return OutcomeResponse(
            a=_entry(rated_a),
            b=_entry(rated_b),
            comparisons=store.comparisons(),
            complete=store.complete(),
        )

    @app.post("/api/score", response_model=ScoreResponse)
    def post_score(body: ScoreRequest,
                   x_client_id: str | None = Header(default=None)):
        try:
            store.record_score(body.id, body.score, client=x_client_id)
        except KeyError as exc:
            raise HTTPException(status_code=404,
                                detail=f"unknown image {exc.args[0]}") from exc
        except BusyError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        return ScoreResponse(id=body.id, score=body.score)

    @app.get("/api/ratings", response_model=RatingsResponse)
    def get_ratings():
        return RatingsResponse(
            ratings=[_entry(r) for r in store.ratings()],
            complete=store.complete(),
        )

    @app.get("/api/grid/{run_id}", response_model=GridResponse)
    def get_grid(run_id: str):
        run_dir = assets.run_dir(run_id)
        if run_dir is None:
            raise HTTPException(status_code=404, detail=f"unknown run {run_id}")
        grid_path = run_dir / GRID_NAME
        if not grid_path.exists():
            raise HTTPException(status_code=404,
                                detail=f"run {run_id} has no grid summary yet")
        with open(grid_path) as fh:
            doc = json.load(fh)
        cells = []
        for cell in doc["cells"]:
            image_id = f"arc_{int(cell['id']):05d}"
            cells.append(GridCell(
                i=int(cell["i"]), j=int(cell["j"]), id=image_id,
                fitness=float(cell["fitness"]),
                png_url=f"/api/image/{image_id}.png",
                genotype=cell.get("genotype"),
            ))
        stats_path = run_dir / STATS_NAME
        stats = []
        if stats_path.exists():
            stats = [
                StatsPoint(generation=s.generation, mean_fitness=s.mean_fitness,
                           occupancy=s.occupancy)
                for s in read_stats(stats_path)
            ]
        return GridResponse(run_id=run_id, grid_n=int(doc["grid_n"]),
                            cells=cells, stats=stats)

    @app.get("/api/image/{name}")
    def get_image(name: str):
        path = Path(name)
        suffix = path.suffix
        if suffix not in (".png", ".svg") or "/" in name or "\\" in name:
            raise HTTPException(status_code=404, detail=f"unknown asset {name}")
        resolved = assets.resolve(path.stem, suffix)
        if resolved is None:
            raise HTTPException(status_code=404, detail=f"unknown image {path.stem}")
        media = "image/png" if suffix == ".png" else "image/svg+xml"
        return FileResponse(resolved, media_type=media)

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
