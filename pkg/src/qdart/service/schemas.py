"""Request/response models for the ranking and grid API."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class ImageRef(BaseModel):
    id: str
    png_url: str


class PairProgress(BaseModel):
    max_rd: float
    complete: bool
    comparisons: int


class PairResponse(BaseModel):
    a: ImageRef
    b: ImageRef
    progress: PairProgress


class OutcomeRequest(BaseModel):
    a: str
    b: str
    result: Literal["a", "b", "draw"]


class RatingEntry(BaseModel):
    id: str
    rating: float
    rd: float
    games: int
    direct_score: Optional[float] = None


class OutcomeResponse(BaseModel):
    a: RatingEntry
    b: RatingEntry
    comparisons: int
    complete: bool


class ScoreRequest(BaseModel):
    id: str
    score: float = Field(ge=0.0, le=5.0)


class ScoreResponse(BaseModel):
    id: str
    score: float


class RatingsResponse(BaseModel):
    ratings: list[RatingEntry]
    complete: bool


class GridCell(BaseModel):
    i: int
    j: int
    id: str
    fitness: float
    png_url: str
    genotype: Optional[list[float]] = None


class StatsPoint(BaseModel):
    generation: int
    mean_fitness: float
    occupancy: float


class GridResponse(BaseModel):
    run_id: str
    grid_n: int
    cells: list[GridCell]
    stats: list[StatsPoint]
