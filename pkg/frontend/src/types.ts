/** Wire types of the ranking/grid JSON API. */

export interface ImageRef {
  id: string;
  png_url: string;
}

export interface PairProgress {
  max_rd: number;
  complete: boolean;
  comparisons: number;
}

export interface PairResponse {
  a: ImageRef;
  b: ImageRef;
  progress: PairProgress;
}

export type OutcomeResult = "a" | "b" | "draw";

export interface OutcomeRequest {
  a: string;
  b: string;
  result: OutcomeResult;
}

export interface RatingEntry {
  id: string;
  rating: number;
  rd: number;
  games: number;
  direct_score: number | null;
}

export interface OutcomeResponse {
  a: RatingEntry;
  b: RatingEntry;
  comparisons: number;
  complete: boolean;
}

export interface ScoreRequest {
  id: string;
  score: number;
}

export interface RatingsResponse {
  ratings: RatingEntry[];
  complete: boolean;
}

export interface GridCell {
  i: number;
  j: number;
  id: string;
  fitness: number;
  png_url: string;
  genotype: number[] | null;
}

export interface StatsPoint {
  generation: number;
  mean_fitness: number;
  occupancy: number;
}

export interface GridResponse {
  run_id: string;
  grid_n: number;
  cells: GridCell[];
  stats: StatsPoint[];
}
