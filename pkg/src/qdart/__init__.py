"""qdart: quality-diversity evolution workbench for agent-drawn line images."""

__version__ = "0.1.0"

from .genome import DrawingParams, GeneRanges, Genotype, decode, mutate, random_genotype
from .noise import NoiseAlgorithm, NoiseField, noise_eval

__all__ = [
    "DrawingParams",
    "GeneRanges",
    "Genotype",
    "NoiseAlgorithm",
    "NoiseField",
    "decode",
    "mutate",
    "noise_eval",
    "random_genotype",
    "__version__",
]
