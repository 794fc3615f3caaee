"""Run configuration shared by the CLI and the evolution engine.

One JSON document drives a whole run: grid size, generation/population
counts, mutation settings, the master seed, fitness constants, canvas size
and any gene-range recalibration.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .fitness import FitnessConfig
from .genome import DEFAULT_AGENT_LIFETIME, GeneRanges


@dataclass(frozen=True)
class RunConfig:
    grid_n: int = 8
    generations: int = 100
    population: int = 25
    mutation_rate: float = 0.25
    mutation_factor: float = 0.15
    seed: int = 0
    fitness: FitnessConfig = field(default_factory=FitnessConfig)
    canvas: tuple[int, int] = (1024, 768)
    gene_ranges: GeneRanges = field(default_factory=GeneRanges)
    agent_lifetime: int = DEFAULT_AGENT_LIFETIME
    map_path: str | None = None
    out_dir: str | None = None

    def __post_init__(self):
        if self.generations < 1:
            raise ValueError("generations must be >= 1")
        if self.population < 1:
            raise ValueError("population must be >= 1")
        if self.grid_n < 2:
            raise ValueError("grid_n must be >= 2")
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError("mutation_rate must be in [0, 1]")
        if not 0.0 <= self.mutation_factor <= 1.0:
            raise ValueError("mutation_factor must be in [0, 1]")
        w, h = self.canvas
        if w < 32 or h < 32:
            raise ValueError("canvas must be at least 32x32")


def _canvas_from(value) -> tuple[int, int]:
    if isinstance(value, dict):
        return int(value["width"]), int(value["height"])
    w, h = value
    return int(w), int(h)


def load_config(path) -> RunConfig:
    with open(path) as fh:
        doc = json.load(fh)
    return config_from_dict(doc)


def config_from_dict(doc: dict) -> RunConfig:
    return RunConfig(
        grid_n=int(doc.get("grid_n", 8)),
        generations=int(doc.get("generations", 100)),
        population=int(doc.get("population", 25)),
        mutation_rate=float(doc.get("mutation_rate", 0.25)),
        mutation_factor=float(doc.get("mutation_factor", 0.15)),
        seed=int(doc.get("seed", 0)),
        fitness=FitnessConfig.from_config(doc.get("fitness")),
        canvas=_canvas_from(doc.get("canvas", (1024, 768))),
        gene_ranges=GeneRanges.from_config(doc.get("gene_ranges")),
        agent_lifetime=int(doc.get("agent_lifetime", DEFAULT_AGENT_LIFETIME)),
        map_path=doc.get("map"),
        out_dir=doc.get("out"),
    )


def config_to_dict(cfg: RunConfig) -> dict:
    doc = {
        "grid_n": cfg.grid_n,
        "generations": cfg.generations,
        "population": cfg.population,
        "mutation_rate": cfg.mutation_rate,
        "mutation_factor": cfg.mutation_factor,
        "seed": cfg.seed,
        "fitness": {
            "mu_min": cfg.fitness.mu_min,
            "mu_max": cfg.fitness.mu_max,
            "gamma": cfg.fitness.gamma,
        },
        "canvas": list(cfg.canvas),
        "gene_ranges": cfg.gene_ranges.to_config(),
        "agent_lifetime": cfg.agent_lifetime,
    }
    if cfg.map_path is not None:
        doc["map"] = cfg.map_path
    if cfg.out_dir is not None:
        doc["out"] = cfg.out_dir
    return doc


def save_config(cfg: RunConfig, path) -> None:
    Path(path).write_text(json.dumps(config_to_dict(cfg), indent=2) + "\n")
