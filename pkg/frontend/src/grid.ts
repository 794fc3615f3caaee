/** Elite-grid view-model: tile layout, fitness colour scale, stats
 * sparklines. Pure functions plus a thin controller over the API. */

import { ApiClient, ApiError } from "./api.js";
import type { GridCell, GridResponse, StatsPoint } from "./types.js";

export const FITNESS_COLOR_LOW = "#1d3557";
export const FITNESS_COLOR_HIGH = "#ffd166";

function hexChannel(hex: string, k: number): number {
  return parseInt(hex.slice(1 + 2 * k, 3 + 2 * k), 16);
}

/** Linear blend between the declared palette extremes; clamps to [0, 1]. */
export function fitnessColor(fitness: number): string {
  const t = Math.min(1, Math.max(0, fitness));
  const parts = [0, 1, 2].map((k) => {
    const lo = hexChannel(FITNESS_COLOR_LOW, k);
    const hi = hexChannel(FITNESS_COLOR_HIGH, k);
    return Math.round(lo + (hi - lo) * t);
  });
  return "#" + parts.map((v) => v.toString(16).padStart(2, "0")).join("");
}

export interface TileModel {
  i: number;
  j: number;
  cell: GridCell | null;
  color: string | null;
}

/** Row-major tile matrix; row j, column i matches the API cell coords. */
export function buildTiles(grid: GridResponse): TileModel[][] {
  const byCell = new Map<string, GridCell>();
  for (const cell of grid.cells) byCell.set(`${cell.i},${cell.j}`, cell);
  const rows: TileModel[][] = [];
  for (let j = 0; j < grid.grid_n; j++) {
    const row: TileModel[] = [];
    for (let i = 0; i < grid.grid_n; i++) {
      const cell = byCell.get(`${i},${j}`) ?? null;
      row.push({ i, j, cell, color: cell ? fitnessColor(cell.fitness) : null });
    }
    rows.push(row);
  }
  return rows;
}

export function occupancy(grid: GridResponse): number {
  return grid.cells.length / (grid.grid_n * grid.grid_n);
}

/** Polyline points for an inline SVG sparkline of one stats field. */
export function sparklinePoints(
  stats: StatsPoint[],
  field: "mean_fitness" | "occupancy",
  width = 220,
  height = 48,
): string {
  if (stats.length === 0) return "";
  if (stats.length === 1) return `0,${height / 2} ${width},${height / 2}`;
  return stats
    .map((point, k) => {
      const x = (k / (stats.length - 1)) * width;
      const y = height - Math.min(1, Math.max(0, point[field])) * height;
      return `${x.toFixed(2)},${y.toFixed(2)}`;
    })
    .join(" ");
}

export interface GridViewSink {
  showGrid(grid: GridResponse, tiles: TileModel[][]): void;
  showDetail(cell: GridCell): void;
  showNotFound(runId: string): void;
  showError(message: string): void;
}

export class GridController {
  private grid: GridResponse | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly view: GridViewSink,
  ) {}

  async load(runId: string): Promise<void> {
    try {
      const grid = await this.api.getGrid(runId);
      this.grid = grid;
      this.view.showGrid(grid, buildTiles(grid));
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) {
        this.view.showNotFound(runId);
      } else {
        this.view.showError(String(err));
      }
    }
  }

  /** Tile click: occupied cells open the detail panel, empty ones no-op. */
  select(i: number, j: number): void {
    if (this.grid === null) return;
    const cell = this.grid.cells.find((c) => c.i === i && c.j === j);
    if (cell) this.view.showDetail(cell);
  }
}
