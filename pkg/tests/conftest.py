import pytest

from qdart.config import RunConfig
from qdart.corpus import draw_renderable_genotypes, render_batch
from qdart.features import describe, fit_reduction
from qdart.genome import GeneRanges

TINY_CANVAS = (64, 64)

TINY_RANGES = GeneRanges.from_config({
    "border_width": [0, 16],
    "noise_displacement": [0, 12],
    "noise_freq_x": [0.01, 0.2],
    "noise_freq_y": [0.01, 0.2],
    "agent_count": [2, 10],
    "noise_octaves": [1, 3],
})


def tiny_run_config(**overrides) -> RunConfig:
    fields = dict(
        grid_n=4,
        generations=6,
        population=4,
        mutation_rate=0.25,
        mutation_factor=0.15,
        seed=123,
        canvas=TINY_CANVAS,
        gene_ranges=TINY_RANGES,
        agent_lifetime=40,
    )
    fields.update(overrides)
    return RunConfig(**fields)


@pytest.fixture(scope="session")
def tiny_map():
    genotypes = draw_renderable_genotypes(16, seed=999, canvas=TINY_CANVAS,
                                          ranges=TINY_RANGES)
    phenotypes = render_batch(genotypes, TINY_CANVAS, TINY_RANGES, lifetime=40)
    samples = [describe(p.raster) for p in phenotypes]
    return fit_reduction(samples, grid_n=4)


@pytest.fixture
def tiny_cfg():
    return tiny_run_config()
