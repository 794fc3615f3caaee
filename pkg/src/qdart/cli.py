"""Command-line entry point covering the whole workflow: sample a corpus,
compute metrics, correlate them with artist rankings, fit the diversity
map, evolve the elite grid, serve the ranking UI and export run artifacts.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from . import config as config_mod
from . import corpus as corpus_mod
from . import features as features_mod
from . import fitness as fitness_mod
from . import glicko as glicko_mod
from . import mapelites
from . import metrics as metrics_mod
from .genome import GeneRanges, Genotype
from .raster import load_png, write_png
from .svgout import write_svg


class CliError(Exception):
    """User-facing failure; message printed to stderr and exit code 1."""


def _env(name: str, default=None):
    return os.environ.get(f"QDA_{name}", default)


def _canvas_arg(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError as exc:
        raise argparse.ArgumentTypeError("canvas must look like 1024x768") from exc


def cmd_sample(args) -> int:
    out = Path(args.out)
    ranges = _load_ranges(args.config)
    lifetime = _load_lifetime(args.config)
    manifest = corpus_mod.sample_corpus(
        n=args.n, seed=args.seed, out_dir=out, canvas=args.canvas,
        ranges=ranges, lifetime=lifetime, workers=args.workers,
    )
    print(f"wrote {manifest['count']} drawings to {out}")
    return 0


def _load_ranges(config_path) -> GeneRanges | None:
    if not config_path:
        return None
    return config_mod.load_config(config_path).gene_ranges


def _load_lifetime(config_path) -> int:
    if not config_path:
        return 2000
    return config_mod.load_config(config_path).agent_lifetime


def cmd_render(args) -> int:
    if args.genotype:
        genes = json.loads(args.genotype)
    else:
        genes = json.loads(Path(args.genotype_file).read_text())
    genotype = Genotype.from_seq(genes)
    phenotype = corpus_mod.render_phenotype(
        genotype, canvas=args.canvas,
        ranges=_load_ranges(args.config), lifetime=_load_lifetime(args.config),
    )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_svg(phenotype, out.with_suffix(".svg"))
    write_png(phenotype.raster, out.with_suffix(".png"))
    print(f"wrote {out.with_suffix('.svg')} and {out.with_suffix('.png')}")
    return 0


def cmd_metrics(args) -> int:
    rows, failures = metrics_mod.batch_metrics(args.corpus)
    for image_id, reason in failures:
        print(f"warning: {image_id}: {reason}", file=sys.stderr)
    metrics_mod.write_metrics_csv(rows, args.out)
    print(f"wrote metrics for {len(rows)} images to {args.out}"
          + (f" ({len(failures)} failed)" if failures else ""))
    return 0


def _read_scores_csv(path) -> dict[str, float]:
    scores: dict[str, float] = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            scores[row["id"]] = float(row["score"])
    return scores


def cmd_correlate(args) -> int:
    if not args.scores and not args.outcomes:
        raise CliError("need --scores and/or --outcomes")

    corpus = Path(args.corpus)
    if corpus.is_file():
        metric_rows = metrics_mod.read_metrics_csv(corpus)
    else:
        rows, failures = metrics_mod.batch_metrics(corpus)
        for image_id, reason in failures:
            print(f"warning: {image_id}: {reason}", file=sys.stderr)
        metric_rows = dict(rows)

    scores = _read_scores_csv(args.scores) if args.scores else None
    ratings = None
    if args.outcomes:
        outcomes = glicko_mod.read_outcome_log(args.outcomes)
        ids = set(metric_rows)
        for o in outcomes:
            ids.add(o.a)
            ids.add(o.b)
        pool = glicko_mod.replay_outcomes(sorted(ids), outcomes)
        ratings = {image_id: r.rating for image_id, r in pool.items()}

    try:
        report = fitness_mod.proxy_selection(metric_rows, scores=scores,
                                             ratings=ratings)
    except ValueError as exc:
        raise CliError(str(exc)) from exc

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report.write_csv(out / "correlation.csv")
    (out / "correlation.txt").write_text(report.to_text())
    print(report.to_text(), end="")
    print(f"wrote {out / 'correlation.csv'}")
    return 0


def cmd_fit_map(args) -> int:
    grid_n = args.grid_n
    if args.features:
        vectors = features_mod.load_feature_file(args.features)
        samples = [vectors[k] for k in sorted(vectors)]
    else:
        corpus = Path(args.corpus)
        pngs = sorted(corpus.glob("*.png"))
        if not pngs:
            raise CliError(f"no PNG images in {corpus}")
        samples = [features_mod.describe(load_png(p)) for p in pngs]
    try:
        rmap = features_mod.fit_reduction(samples, grid_n)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    features_mod.save_map(rmap, args.out)
    print(f"fitted reduction on {len(samples)} samples -> {args.out}")
    return 0


def cmd_evolve(args) -> int:
    cfg = config_mod.load_config(args.config)
    out_dir = args.out or cfg.out_dir
    if out_dir is None:
        raise CliError("no output directory: pass --out or set 'out' in the config")
    map_path = args.map or cfg.map_path
    if map_path is None:
        raise CliError("no fitted map: run 'qdart fit-map' first and set the "
                       "config's 'map' key or pass --map")
    rmap = features_mod.load_map(map_path)

    def progress(gen, result):
        if args.verbose:
            print(f"gen {gen:3d}  occupancy {result.stats.occupancy:.3f}  "
                  f"mean fitness {result.stats.mean_fitness:.3f}")

    try:
        result = mapelites.run(
            cfg, rmap=rmap, out_dir=out_dir, resume=args.resume,
            workers=args.workers, on_generation=progress,
        )
    except mapelites.CheckpointError as exc:
        raise CliError(str(exc)) from exc
    if args.resume and result.resumed_at is not None and result.resumed_at >= cfg.generations:
        print(f"run already finished at generation {cfg.generations}; nothing to do")
        return 0
    print(f"run complete: {len(result.archive)} archive records, "
          f"occupancy {result.grid.occupancy_ratio():.3f}, "
          f"outputs in {result.out_dir}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    corpus = args.corpus or _env("CORPUS")
    if not corpus:
        raise CliError("no corpus: pass --corpus or set QDA_CORPUS")
    app = create_app(
        corpus,
        rd_threshold=args.rd_threshold,
        ui_dir=args.ui_dir or _env("UI_DIR"),
        base_seed=args.seed,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def cmd_export(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    did_something = False
    if args.run:
        run_dir = Path(args.run)
        grid_path = run_dir / mapelites.GRID_NAME
        if not grid_path.exists():
            raise CliError(f"{run_dir} has no grid summary; is it a run directory?")
        with open(grid_path) as fh:
            grid = mapelites._grid_from_payload(json.load(fh))
        mapelites.export_grid_montage(grid, out / "montage.png", images_root=run_dir)
        stats_path = run_dir / mapelites.STATS_NAME
        if stats_path.exists():
            (out / "stats.csv").write_bytes(stats_path.read_bytes())
        (out / "grid.json").write_bytes(grid_path.read_bytes())
        print(f"exported grid montage and stats to {out}")
        did_something = True
    if args.corpus:
        corpus = Path(args.corpus)
        ids = corpus_mod.corpus_ids(corpus)
        outcome_log = corpus / "outcomes.ndjson"
        outcomes = (glicko_mod.read_outcome_log(outcome_log)
                    if outcome_log.exists() else [])
        pool = glicko_mod.replay_outcomes(ids, outcomes)
        scores_log = corpus / "scores.ndjson"
        if scores_log.exists():
            with open(scores_log) as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        rec = json.loads(line)
                        if rec["id"] in pool:
                            r = pool[rec["id"]]
                            pool[rec["id"]] = glicko_mod.RatedImage(
                                image_id=r.image_id, rating=r.rating, rd=r.rd,
                                games=r.games, direct_score=float(rec["score"]),
                            )
        glicko_mod.write_ratings_csv(pool.values(), out / "ratings.csv")
        print(f"exported ratings for {len(pool)} images to {out / 'ratings.csv'}")
        did_something = True
    if not did_something:
        raise CliError("nothing to export: pass --run and/or --corpus")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdart",
        description="quality-diversity evolution workbench for line drawings",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="render a seeded random corpus")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--canvas", type=_canvas_arg, default=(1024, 768))
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--config", help="run config supplying gene_ranges/agent_lifetime")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("render", help="render a single genotype")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--genotype", help="JSON array of 17 genes")
    group.add_argument("--genotype-file")
    p.add_argument("--out", required=True, help="output stem; .svg/.png appended")
    p.add_argument("--canvas", type=_canvas_arg, default=(1024, 768))
    p.add_argument("--config")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("metrics", help="compute the metric battery for a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True, help="metrics CSV path")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("correlate", help="rank metrics against artist judgments")
    p.add_argument("--corpus", required=True,
                   help="corpus directory or precomputed metrics CSV")
    p.add_argument("--scores", help="CSV of id,score direct ratings")
    p.add_argument("--outcomes", help="line-JSON pairwise outcome log")
    p.add_argument("--out", required=True, help="report output directory")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("fit-map", help="fit the 2-D diversity reduction")
    p.add_argument("--corpus", help="corpus directory of PNG images")
    p.add_argument("--features", help="imported descriptor file (line JSON)")
    p.add_argument("--grid-n", type=int, default=8)
    p.add_argument("--out", required=True, help="map JSON path")
    p.set_defaults(func=cmd_fit_map)

    p = sub.add_parser("evolve", help="run MAP-Elites from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="output directory (overrides config)")
    p.add_argument("--map", help="fitted map JSON (overrides config)")
    p.add_argument("--resume", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("serve", help="serve the ranking API and UI")
    p.add_argument("--host", default=_env("HOST", "127.0.0.1"))
    p.add_argument("--port", type=int, default=int(_env("PORT", "8000")))
    p.add_argument("--corpus", default=None)
    p.add_argument("--rd-threshold", type=float,
                   default=float(_env("RD_THRESHOLD", "250")))
    p.add_argument("--ui-dir", default=None)
    p.add_argument("--seed", type=int, default=0, help="pairing seed base")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("export", help="export run artifacts and ratings tables")
    p.add_argument("--run", help="run output directory")
    p.add_argument("--corpus", help="corpus directory with outcome/score logs")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
