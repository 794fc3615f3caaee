"""Random-corpus generation: seeded genotype batches rendered to SVG + PNG
with a manifest, the raw material for ranking sessions and map fitting."""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .engine import Phenotype, simulate_batch
from .genome import GeneRanges, Genotype, decode
from .raster import rasterize, write_png
from .svgout import write_svg

MANIFEST_NAME = "manifest.json"

# cap on simultaneously simulated agents, to bound the trail buffer
_BATCH_AGENT_BUDGET = 4096


def render_phenotype(
    genotype: Genotype,
    canvas: tuple[int, int],
    ranges: GeneRanges | None = None,
    lifetime: int = 2000,
) -> Phenotype:
    """Full genotype -> phenotype pipeline for one drawing, raster attached."""
    params = decode(genotype, ranges=ranges, lifetime=lifetime)
    phenotype = simulate_batch([params], canvas=canvas)[0]
    return phenotype.with_raster(rasterize(phenotype))


def render_batch(
    genotypes: list[Genotype],
    canvas: tuple[int, int],
    ranges: GeneRanges | None = None,
    lifetime: int = 2000,
    workers: int = 1,
) -> list[Phenotype]:
    """Render many genotypes, chunking the simulation by total agent count
    and rasterising in parallel. Output order follows the input order and
    the bytes never depend on ``workers``."""
    params = [decode(g, ranges=ranges, lifetime=lifetime) for g in genotypes]
    phenotypes: list[Phenotype] = []
    chunk: list = []
    budget = 0
    for p in params:
        if chunk and budget + p.agent_count > _BATCH_AGENT_BUDGET:
            phenotypes.extend(simulate_batch(chunk, canvas=canvas))
            chunk, budget = [], 0
        chunk.append(p)
        budget += p.agent_count
    if chunk:
        phenotypes.extend(simulate_batch(chunk, canvas=canvas))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rasters = list(pool.map(rasterize, phenotypes))
    else:
        rasters = [rasterize(p) for p in phenotypes]
    return [p.with_raster(r) for p, r in zip(phenotypes, rasters)]


def draw_renderable_genotypes(
    n: int,
    seed: int,
    canvas: tuple[int, int],
    ranges: GeneRanges | None = None,
) -> list[Genotype]:
    """Draw ``n`` random genotypes whose decoded border leaves room to draw.

    Genotypes come from one seeded stream; unrenderable draws (border at or
    beyond half the canvas) are skipped and the stream continues, so the
    result is deterministic for a given seed.
    """
    rng = np.random.default_rng(seed)
    width, height = canvas
    out: list[Genotype] = []
    while len(out) < n:
        g = Genotype(tuple(float(v) for v in rng.random(17)))
        params = decode(g, ranges=ranges)
        if 2.0 * params.border_width < min(width, height):
            out.append(g)
    return out


def sample_corpus(
    n: int,
    seed: int,
    out_dir,
    canvas: tuple[int, int] = (1024, 768),
    ranges: GeneRanges | None = None,
    lifetime: int = 2000,
    workers: int = 1,
) -> dict:
    """Render ``n`` seeded random drawings into ``out_dir``.

    Writes img_<k>.svg, img_<k>.png and a manifest; file bytes depend only
    on (seed, canvas, ranges, lifetime), never on the worker count.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    genotypes = draw_renderable_genotypes(n, seed, canvas, ranges)
    ids = [f"img_{k:05d}" for k in range(n)]
    phenotypes = render_batch(genotypes, canvas, ranges, lifetime, workers=workers)

    def write_one(k: int) -> None:
        write_svg(phenotypes[k], out_dir / f"{ids[k]}.svg")
        write_png(phenotypes[k].raster, out_dir / f"{ids[k]}.png")

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(write_one, range(n)))
    else:
        for k in range(n):
            write_one(k)

    manifest = {
        "seed": seed,
        "canvas": list(canvas),
        "count": n,
        "created": time.time(),
        "items": [
            {"id": ids[k], "genotype": genotypes[k].to_json()} for k in range(n)
        ],
    }
    with open(out_dir / MANIFEST_NAME, "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return manifest


def load_manifest(corpus_dir) -> dict:
    with open(Path(corpus_dir) / MANIFEST_NAME) as fh:
        return json.load(fh)


def corpus_ids(corpus_dir) -> list[str]:
    """Image ids of a corpus: manifest order, or sorted PNG stems without one."""
    corpus_dir = Path(corpus_dir)
    manifest_path = corpus_dir / MANIFEST_NAME
    if manifest_path.exists():
        with open(manifest_path) as fh:
            return [item["id"] for item in json.load(fh)["items"]]
    return sorted(p.stem for p in corpus_dir.glob("*.png"))
