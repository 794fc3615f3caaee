"""MAP-Elites over the 2-D visual feature grid.

Each generation samples one grid cell: an empty cell spawns a population of
random genotypes, an occupied one spawns mutants of its occupant. Children
are rendered and scored, then placed in child order; a child takes a cell
only if the cell is empty or the child is strictly fitter. Every placement
is preserved in an append-only archive, and a checksummed checkpoint per
generation makes long runs resumable and replayable.
"""

from __future__ import annotations

import csv
import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .config import RunConfig
from .engine import SimulationError, simulate_batch, validate_drawable
from .features import ReducedMap, describe, embed, load_map, quantize
from .fitness import hat_fitness
from .genome import Genotype, decode, mutate, random_genotype
from .raster import rasterize, write_png
from .svgout import write_svg

ARCHIVE_NAME = "archive.ndjson"
STATS_NAME = "stats.csv"
CHECKPOINT_NAME = "checkpoint.json"
GRID_NAME = "grid.json"
MONTAGE_NAME = "montage.png"
IMAGES_DIR = "images"

MONTAGE_TILE = (96, 72)
MONTAGE_EMPTY_GRAY = 217


class CheckpointError(RuntimeError):
    """Checkpoint file missing, corrupt or inconsistent with the run."""


@dataclass(frozen=True)
class ArchiveRecord:
    id: int
    genotype: Genotype
    fitness: float
    embedding: tuple[float, float]
    cell: tuple[int, int]
    generation: int
    parent_id: int | None = None
    svg_path: str | None = None
    png_path: str | None = None

    def to_json(self) -> str:
        return json.dumps({
            "id": self.id,
            "genotype": self.genotype.to_json(),
            "fitness": self.fitness,
            "embedding": list(self.embedding),
            "cell": list(self.cell),
            "generation": self.generation,
            "parent_id": self.parent_id,
            "svg_path": self.svg_path,
            "png_path": self.png_path,
        }, separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str) -> "ArchiveRecord":
        doc = json.loads(line)
        return cls(
            id=int(doc["id"]),
            genotype=Genotype.from_seq(doc["genotype"]),
            fitness=float(doc["fitness"]),
            embedding=(float(doc["embedding"][0]), float(doc["embedding"][1])),
            cell=(int(doc["cell"][0]), int(doc["cell"][1])),
            generation=int(doc["generation"]),
            parent_id=doc.get("parent_id"),
            svg_path=doc.get("svg_path"),
            png_path=doc.get("png_path"),
        )


class EliteGrid:
    """grid_n x grid_n cells, each holding at most one archive record."""

    def __init__(self, grid_n: int):
        if grid_n < 2:
            raise ValueError("grid_n must be >= 2")
        self.grid_n = grid_n
        self.cells: dict[tuple[int, int], ArchiveRecord] = {}

    def occupancy_ratio(self) -> float:
        return len(self.cells) / (self.grid_n * self.grid_n)

    def mean_fitness(self) -> float:
        if not self.cells:
            return 0.0
        # reduce in sorted cell order so the value is independent of the
        # insertion history (a resumed grid rebuilds cells sorted)
        return float(np.mean([self.cells[c].fitness for c in sorted(self.cells)]))


def try_place(grid: EliteGrid, candidate: ArchiveRecord) -> bool:
    """Place iff the cell is empty or the candidate is strictly fitter;
    on an exact tie the incumbent stays."""
    i, j = candidate.cell
    if not (0 <= i < grid.grid_n and 0 <= j < grid.grid_n):
        raise ValueError(f"cell {candidate.cell} outside {grid.grid_n}x{grid.grid_n} grid")
    incumbent = grid.cells.get(candidate.cell)
    if incumbent is None or candidate.fitness > incumbent.fitness:
        grid.cells[candidate.cell] = candidate
        return True
    return False


@dataclass(frozen=True)
class StatsRow:
    generation: int
    mean_fitness: float
    occupancy: float


@dataclass
class GenerationResult:
    placed: list[ArchiveRecord]
    stats: StatsRow
    failures: list[tuple[int, str]]  # (child index, reason)


def _generation_rng(seed: int, gen_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(gen_index,)))


def step_generation(
    grid: EliteGrid,
    cfg: RunConfig,
    rmap: ReducedMap,
    gen_index: int,
    next_id: int,
    workers: int = 1,
    artifact_dir: Path | None = None,
) -> GenerationResult:
    """Run one generation against ``grid`` in place; returns new placements.

    The whole child population simulates as one fused batch; rasterisation
    and scoring run per child (optionally across threads) and placement is
    applied strictly in child-index order, so results do not depend on
    ``workers``. A child that cannot render is reported and skipped.
    """
    rng = _generation_rng(cfg.seed, gen_index)
    cell = (int(rng.integers(cfg.grid_n)), int(rng.integers(cfg.grid_n)))
    parent = grid.cells.get(cell)
    child_seeds = [int(s) for s in rng.integers(0, 2**63, size=cfg.population)]

    if parent is None:
        children = [random_genotype(s) for s in child_seeds]
    else:
        children = [
            mutate(parent.genotype, cfg.mutation_rate, cfg.mutation_factor, s)
            for s in child_seeds
        ]

    failures: list[tuple[int, str]] = []
    renderable: list[int] = []
    params = []
    for idx, child in enumerate(children):
        p = decode(child, ranges=cfg.gene_ranges, lifetime=cfg.agent_lifetime)
        try:
            validate_drawable(p, cfg.canvas)
        except SimulationError as exc:
            failures.append((idx, str(exc)))
            continue
        renderable.append(idx)
        params.append(p)

    phenotypes = simulate_batch(params, canvas=cfg.canvas)

    def score(k: int):
        raster = rasterize(phenotypes[k])
        fit = float(hat_fitness(float(raster.mean()), cfg.fitness))
        point = embed(rmap, describe(raster))
        return raster, fit, point, quantize(rmap, point)

    if workers > 1 and len(phenotypes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            scored = list(pool.map(score, range(len(phenotypes))))
    else:
        scored = [score(k) for k in range(len(phenotypes))]

    placed: list[ArchiveRecord] = []
    for k, idx in enumerate(renderable):
        raster, fit, point, child_cell = scored[k]
        record = ArchiveRecord(
            id=next_id,
            genotype=children[idx],
            fitness=fit,
            embedding=point,
            cell=child_cell,
            generation=gen_index,
            parent_id=None if parent is None else parent.id,
        )
        if artifact_dir is not None:
            stem = f"arc_{next_id:05d}"
            record = replace(
                record,
                svg_path=f"{IMAGES_DIR}/{stem}.svg",
                png_path=f"{IMAGES_DIR}/{stem}.png",
            )
        if try_place(grid, record):
            if artifact_dir is not None:
                write_svg(phenotypes[k], artifact_dir / IMAGES_DIR / f"arc_{next_id:05d}.svg")
                write_png(raster, artifact_dir / IMAGES_DIR / f"arc_{next_id:05d}.png")
            placed.append(record)
            next_id += 1

    stats = StatsRow(
        generation=gen_index,
        mean_fitness=grid.mean_fitness(),
        occupancy=grid.occupancy_ratio(),
    )
    return GenerationResult(placed=placed, stats=stats, failures=failures)


def _grid_payload(grid: EliteGrid) -> dict:
    cells = []
    for (i, j), rec in sorted(grid.cells.items()):
        cells.append({
            "i": i, "j": j, "id": rec.id, "fitness": rec.fitness,
            "genotype": rec.genotype.to_json(),
            "embedding": list(rec.embedding),
            "generation": rec.generation,
            "parent_id": rec.parent_id,
            "svg_path": rec.svg_path,
            "png_path": rec.png_path,
        })
    return {"grid_n": grid.grid_n, "cells": cells}


def _grid_from_payload(doc: dict) -> EliteGrid:
    grid = EliteGrid(int(doc["grid_n"]))
    for cell in doc["cells"]:
        rec = ArchiveRecord(
            id=int(cell["id"]),
            genotype=Genotype.from_seq(cell["genotype"]),
            fitness=float(cell["fitness"]),
            embedding=(float(cell["embedding"][0]), float(cell["embedding"][1])),
            cell=(int(cell["i"]), int(cell["j"])),
            generation=int(cell["generation"]),
            parent_id=cell.get("parent_id"),
            svg_path=cell.get("svg_path"),
            png_path=cell.get("png_path"),
        )
        grid.cells[rec.cell] = rec
    return grid


def _checkpoint_checksum(payload: dict) -> str:
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def write_checkpoint(path, grid: EliteGrid, next_gen: int, next_id: int,
                     stats: list[StatsRow]) -> None:
    payload = {
        "next_gen": next_gen,
        "next_id": next_id,
        "stats": [[s.generation, s.mean_fitness, s.occupancy] for s in stats],
        "grid": _grid_payload(grid),
    }
    doc = dict(payload)
    doc["checksum"] = _checkpoint_checksum(payload)
    tmp = Path(str(path) + ".tmp")
    with open(tmp, "w") as fh:
        json.dump(doc, fh)
        fh.write("\n")
    tmp.replace(path)


def read_checkpoint(path) -> tuple[EliteGrid, int, int, list[StatsRow]]:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"unreadable checkpoint {path}: {exc}") from exc
    stored = doc.pop("checksum", None)
    if stored is None or stored != _checkpoint_checksum(doc):
        raise CheckpointError(f"checkpoint {path} failed its checksum")
    stats = [StatsRow(int(g), float(m), float(o)) for g, m, o in doc["stats"]]
    return _grid_from_payload(doc["grid"]), int(doc["next_gen"]), int(doc["next_id"]), stats


@dataclass
class RunResult:
    grid: EliteGrid
    archive: list[ArchiveRecord]
    stats: list[StatsRow]
    out_dir: Path | None
    resumed_at: int | None = None


def _write_stats(path, stats: list[StatsRow]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["generation", "mean_fitness", "occupancy"])
        for s in stats:
            # repr round-trips float64 exactly, so replays compare bit-equal
            writer.writerow([s.generation, repr(s.mean_fitness), repr(s.occupancy)])


def read_stats(path) -> list[StatsRow]:
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(StatsRow(int(row["generation"]), float(row["mean_fitness"]),
                                float(row["occupancy"])))
    return out


def read_archive(path) -> list[ArchiveRecord]:
    records = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(ArchiveRecord.from_json(line))
    return records


def run(
    cfg: RunConfig,
    rmap: ReducedMap | None = None,
    out_dir=None,
    resume: bool = False,
    workers: int = 1,
    checkpoint_every: int = 1,
    on_generation=None,
) -> RunResult:
    """Execute the configured number of generations.

    With ``out_dir`` set, the archive, stats and a checkpoint are persisted
    every generation, artifacts land under images/, and ``resume=True``
    continues an interrupted run to an identical final state.
    """
    if rmap is None:
        if not cfg.map_path:
            raise ValueError("no fitted reduction map: run fit-map and set the "
                             "config's 'map' key, or pass rmap explicitly")
        rmap = load_map(cfg.map_path)
    if rmap.grid_n != cfg.grid_n:
        raise ValueError(
            f"map grid_n {rmap.grid_n} does not match config grid_n {cfg.grid_n}"
        )

    out_path = None
    archive_path = None
    if out_dir is not None or cfg.out_dir is not None:
        out_path = Path(out_dir if out_dir is not None else cfg.out_dir)
        out_path.mkdir(parents=True, exist_ok=True)
        (out_path / IMAGES_DIR).mkdir(exist_ok=True)
        archive_path = out_path / ARCHIVE_NAME

    grid = EliteGrid(cfg.grid_n)
    stats: list[StatsRow] = []
    start_gen = 0
    next_id = 0
    resumed_at = None

    if resume:
        if out_path is None:
            raise ValueError("resume requires an output directory")
        grid, start_gen, next_id, stats = read_checkpoint(out_path / CHECKPOINT_NAME)
        resumed_at = start_gen
        if start_gen >= cfg.generations:
            archive = read_archive(archive_path) if archive_path.exists() else []
            return RunResult(grid=grid, archive=archive, stats=stats,
                             out_dir=out_path, resumed_at=start_gen)
        _truncate_archive(archive_path, next_id)
    elif archive_path is not None and archive_path.exists():
        archive_path.unlink()

    archive: list[ArchiveRecord] = []
    if resume and archive_path is not None and archive_path.exists():
        archive = read_archive(archive_path)

    for gen in range(start_gen, cfg.generations):
        result = step_generation(
            grid, cfg, rmap, gen, next_id,
            workers=workers,
            artifact_dir=out_path,
        )
        next_id += len(result.placed)
        archive.extend(result.placed)
        stats.append(result.stats)

        if out_path is not None:
            with open(archive_path, "a") as fh:
                for rec in result.placed:
                    fh.write(rec.to_json() + "\n")
            _write_stats(out_path / STATS_NAME, stats)
            if (gen + 1) % checkpoint_every == 0 or gen + 1 == cfg.generations:
                write_checkpoint(out_path / CHECKPOINT_NAME, grid, gen + 1, next_id, stats)
        if on_generation is not None:
            on_generation(gen, result)

    if out_path is not None:
        with open(out_path / GRID_NAME, "w") as fh:
            json.dump(_grid_payload(grid), fh, indent=2)
            fh.write("\n")
        export_grid_montage(grid, out_path / MONTAGE_NAME,
                            images_root=out_path)
    return RunResult(grid=grid, archive=archive, stats=stats, out_dir=out_path,
                     resumed_at=resumed_at)


def _truncate_archive(path: Path, keep_records: int) -> None:
    """Drop archive lines past the checkpoint so a resumed run appends from
    exactly the checkpointed state."""
    if not path.exists():
        if keep_records:
            raise CheckpointError(f"archive {path} missing {keep_records} records")
        return
    with open(path) as fh:
        lines = [ln for ln in fh if ln.strip()]
    if len(lines) < keep_records:
        raise CheckpointError(
            f"archive {path} has {len(lines)} records, checkpoint expects {keep_records}"
        )
    with open(path, "w") as fh:
        fh.writelines(lines[:keep_records])


def export_grid_montage(grid: EliteGrid, out_png, images_root=None,
                        tile: tuple[int, int] = MONTAGE_TILE):
    """Tile occupant thumbnails into one overview image plus a JSON cell list.

    Empty cells render as uniform gray; occupants are resampled from their
    saved PNG when available, else re-rendered is not attempted and the tile
    shows mid-gray with a marker border.
    """
    from PIL import Image

    n = grid.grid_n
    tw, th = tile
    canvas = Image.new("L", (n * tw, n * th), MONTAGE_EMPTY_GRAY)
    cells_json = []
    for (i, j), rec in sorted(grid.cells.items()):
        cells_json.append({"cell": [i, j], "id": rec.id, "fitness": rec.fitness})
        tile_img = None
        if images_root is not None and rec.png_path:
            png = Path(images_root) / rec.png_path
            if png.exists():
                with Image.open(png) as img:
                    tile_img = img.convert("L").resize((tw, th), Image.BILINEAR)
        if tile_img is None:
            tile_img = Image.new("L", (tw, th), 255)
        # grid y grows downward: row j at top offset j
        canvas.paste(tile_img, (i * tw, j * th))
    out_png = Path(out_png)
    canvas.save(out_png, format="PNG", optimize=False)
    with open(out_png.with_suffix(".json"), "w") as fh:
        json.dump({"grid_n": n, "cells": cells_json}, fh, indent=2)
        fh.write("\n")
    return out_png
