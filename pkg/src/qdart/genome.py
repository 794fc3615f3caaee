"""17-gene genotype: representation, mutation and decoding to drawing parameters.

Every gene is a normalised real in [0, 1]. Decoding maps each gene onto its
working range (pixels, steps, counts, ...); the ranges live in a table so a
run config can recalibrate them without touching code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

import numpy as np

from .noise import NoiseAlgorithm

GENE_COUNT = 17

#: steps an agent lives for; not gene-driven, overridable via config key
#: ``agent_lifetime``
DEFAULT_AGENT_LIFETIME = 2000


@dataclass(frozen=True)
class Genotype:
    """An ordered tuple of 17 genes, each in [0, 1]."""

    genes: tuple[float, ...]

    def __post_init__(self):
        if len(self.genes) != GENE_COUNT:
            raise ValueError(f"genotype needs {GENE_COUNT} genes, got {len(self.genes)}")
        for i, g in enumerate(self.genes):
            if not (0.0 <= g <= 1.0) or not math.isfinite(g):
                raise ValueError(f"gene {i + 1} out of [0,1]: {g!r}")

    @classmethod
    def from_seq(cls, seq) -> "Genotype":
        return cls(tuple(float(g) for g in seq))

    def to_json(self) -> list[float]:
        return list(self.genes)


@dataclass(frozen=True)
class GeneRanges:
    """Target ranges for the affine gene decoding, overridable per run."""

    border_width: tuple[float, float] = (0.0, 400.0)
    agent_speed: tuple[float, float] = (0.5, 8.0)
    agent_count: tuple[float, float] = (8.0, 512.0)
    noise_strength: tuple[float, float] = (0.0, 4.0)
    noise_displacement: tuple[float, float] = (0.0, 200.0)
    noise_freq_x: tuple[float, float] = (0.001, 0.02)
    noise_freq_y: tuple[float, float] = (0.001, 0.02)
    noise_z_scale: tuple[float, float] = (0.0, 2.0)
    z_position: tuple[float, float] = (0.0, 10.0)
    noise_octaves: tuple[float, float] = (1.0, 6.0)
    noise_falloff: tuple[float, float] = (0.3, 0.8)
    pen_count: tuple[float, float] = (1.0, 4.0)
    pen_ratio: tuple[float, float] = (0.0, 1.0)
    style_linear: tuple[float, float] = (0.0, 1.0)
    style_circular: tuple[float, float] = (0.0, 1.0)
    style_spiral: tuple[float, float] = (0.0, 1.0)

    @classmethod
    def from_config(cls, overrides: dict | None) -> "GeneRanges":
        """Build ranges from a ``gene_ranges`` config mapping of name -> [lo, hi]."""
        if not overrides:
            return cls()
        known = {f.name for f in fields(cls)}
        kwargs = {}
        for name, pair in overrides.items():
            if name not in known:
                raise ValueError(f"unknown gene range {name!r}")
            lo, hi = float(pair[0]), float(pair[1])
            if not lo <= hi:
                raise ValueError(f"gene range {name!r} has lo > hi")
            kwargs[name] = (lo, hi)
        return cls(**kwargs)

    def to_config(self) -> dict:
        return {f.name: list(getattr(self, f.name)) for f in fields(self)}


@dataclass(frozen=True)
class DrawingParams:
    """Decoded simulation parameters for one drawing."""

    border_width: float        # px inset from the canvas edge for agent placement
    agent_speed: float         # px per step
    agent_count: int
    agent_lifetime: int        # steps
    noise_strength: float
    noise_displacement: float  # px, amplitude of the sampling-position warp
    noise_freq_x: float        # cycles per px
    noise_freq_y: float
    noise_z_scale: float       # z distance swept over an agent lifetime
    z_position: float          # starting z slice of the noise volume
    noise_octaves: int
    noise_falloff: float
    pen_count: int
    pen_ratio: float
    style_linear: float
    style_circular: float
    style_spiral: float
    noise_algorithm: NoiseAlgorithm


def random_genotype(rng_seed: int) -> Genotype:
    """Draw 17 genes independently and uniformly from [0, 1), seeded."""
    rng = np.random.default_rng(rng_seed)
    return Genotype(tuple(float(g) for g in rng.random(GENE_COUNT)))


def mutate(parent: Genotype, rate: float, factor: float, rng_seed: int) -> Genotype:
    """Mutate each gene with probability ``rate`` by a uniform delta in
    [-factor, +factor], clamped back into [0, 1].

    Both random vectors are drawn unconditionally so the outcome for a given
    seed does not depend on which genes end up selected.
    """
    if not 0.0 <= rate <= 1.0:
        raise ValueError(f"mutation rate out of [0,1]: {rate!r}")
    if not 0.0 <= factor <= 1.0:
        raise ValueError(f"mutation factor out of [0,1]: {factor!r}")
    rng = np.random.default_rng(rng_seed)
    hit = rng.random(GENE_COUNT) < rate
    delta = rng.uniform(-factor, factor, GENE_COUNT)
    genes = np.asarray(parent.genes)
    child = np.clip(genes + hit * delta, 0.0, 1.0)
    return Genotype(tuple(float(g) for g in child))


def _lerp(lo: float, hi: float, t: float) -> float:
    return lo + (hi - lo) * t


def _lerp_round(span: tuple[float, float], t: float) -> int:
    return int(math.floor(_lerp(span[0], span[1], t) + 0.5))


def decode(
    g: Genotype,
    ranges: GeneRanges | None = None,
    lifetime: int = DEFAULT_AGENT_LIFETIME,
) -> DrawingParams:
    """Map a genotype onto concrete drawing parameters.

    Continuous genes map affinely onto their range; count-like genes round
    after mapping; the algorithm gene picks one of the five noise variants
    via floor(g17 * 5), clamped so g17 = 1.0 stays on the last variant.
    """
    r = ranges or GeneRanges()
    (g1, g2, g3, g4, g5, g6, g7, g8, g9,
     g10, g11, g12, g13, g14, g15, g16, g17) = g.genes
    algo_index = min(int(g17 * 5.0), 4)
    return DrawingParams(
        border_width=_lerp(*r.border_width, g1),
        agent_speed=_lerp(*r.agent_speed, g2),
        agent_count=_lerp_round(r.agent_count, g3),
        agent_lifetime=int(lifetime),
        noise_strength=_lerp(*r.noise_strength, g4),
        noise_displacement=_lerp(*r.noise_displacement, g5),
        noise_freq_x=_lerp(*r.noise_freq_x, g6),
        noise_freq_y=_lerp(*r.noise_freq_y, g7),
        noise_z_scale=_lerp(*r.noise_z_scale, g8),
        z_position=_lerp(*r.z_position, g9),
        noise_octaves=_lerp_round(r.noise_octaves, g10),
        noise_falloff=_lerp(*r.noise_falloff, g11),
        pen_count=_lerp_round(r.pen_count, g12),
        pen_ratio=_lerp(*r.pen_ratio, g13),
        style_linear=_lerp(*r.style_linear, g14),
        style_circular=_lerp(*r.style_circular, g15),
        style_spiral=_lerp(*r.style_spiral, g16),
        noise_algorithm=NoiseAlgorithm(algo_index),
    )
