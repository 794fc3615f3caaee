"""Visual feature descriptors and the 2-D diversity map.

A raster is summarised by a fixed 1152-element descriptor (a 32x32
box-downsample plus gradient-orientation histograms); externally computed
2048-element CNN vectors can be imported from a line-JSON file instead.
Either way, descriptors are reduced to two dimensions with PCA and binned
onto an n-by-n grid whose bounds come from the training sample.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

DOWNSAMPLE_GRID = 32
ORIENT_CELLS = 4
ORIENT_BINS = 8
DESCRIPTOR_DIM = DOWNSAMPLE_GRID * DOWNSAMPLE_GRID + ORIENT_CELLS * ORIENT_CELLS * ORIENT_BINS

BOUNDS_MARGIN = 0.05


def describe(img: np.ndarray) -> np.ndarray:
    """Built-in descriptor: L2-normalised downsample block plus L2-normalised
    orientation-histogram block. Requires dimensions divisible by 32."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError("expected a 2-D grayscale image")
    h, w = img.shape
    if h % DOWNSAMPLE_GRID or w % DOWNSAMPLE_GRID:
        raise ValueError(f"image dimensions must be divisible by {DOWNSAMPLE_GRID}: {w}x{h}")

    down = img.reshape(
        DOWNSAMPLE_GRID, h // DOWNSAMPLE_GRID, DOWNSAMPLE_GRID, w // DOWNSAMPLE_GRID
    ).mean(axis=(1, 3)).ravel()
    norm = np.linalg.norm(down)
    if norm > 0.0:
        down = down / norm

    gy, gx = np.gradient(img)
    mag = np.hypot(gx, gy)
    ang = np.arctan2(gy, gx)
    bins = np.clip(((ang + np.pi) / (2.0 * np.pi) * ORIENT_BINS).astype(np.int64),
                   0, ORIENT_BINS - 1)
    cell_y = (np.arange(h) * ORIENT_CELLS // h)[:, None]
    cell_x = (np.arange(w) * ORIENT_CELLS // w)[None, :]
    flat = (cell_y * ORIENT_CELLS + cell_x) * ORIENT_BINS + bins
    hist = np.bincount(flat.ravel(), weights=mag.ravel(),
                       minlength=ORIENT_CELLS * ORIENT_CELLS * ORIENT_BINS)
    norm = np.linalg.norm(hist)
    if norm > 0.0:
        hist = hist / norm

    return np.concatenate([down, hist])


@dataclass(frozen=True)
class ReducedMap:
    """Fitted 2-D reduction with grid quantisation bounds."""

    mean: np.ndarray           # (d,)
    basis: np.ndarray          # (2, d), orthonormal rows
    bounds: tuple[tuple[float, float], tuple[float, float]]  # per-axis (lo, hi)
    grid_n: int

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64)
        basis = np.asarray(self.basis, dtype=np.float64)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "basis", basis)
        if basis.shape != (2, mean.shape[0]):
            raise ValueError("basis must be 2 x d matching the mean vector")
        gram = basis @ basis.T
        if not np.allclose(gram, np.eye(2), atol=1e-6):
            raise ValueError("basis rows must be orthonormal")
        for lo, hi in self.bounds:
            if not lo < hi:
                raise ValueError("each axis needs bounds.lo < bounds.hi")
        if self.grid_n < 2:
            raise ValueError("grid_n must be >= 2")

    @property
    def dim(self) -> int:
        return int(self.mean.shape[0])


def fit_reduction(samples, grid_n: int) -> ReducedMap:
    """Fit a mean-centred 2-component PCA with a deterministic sign
    convention and 5%-padded quantisation bounds."""
    data = np.asarray(samples, dtype=np.float64)
    if data.ndim != 2 or data.shape[0] < 3:
        raise ValueError("need at least 3 descriptor samples")
    if not np.isfinite(data).all():
        raise ValueError("descriptors must be finite")
    mean = data.mean(axis=0)
    centered = data - mean
    _, singular, vt = np.linalg.svd(centered, full_matrices=False)
    if singular[0] <= 1e-12 * max(1.0, float(np.abs(data).max())):
        raise ValueError("degenerate sample: all descriptors identical")
    basis = vt[:2].copy()
    for row in basis:
        j = int(np.argmax(np.abs(row)))
        if row[j] < 0.0:
            row *= -1.0

    projected = centered @ basis.T
    bounds = []
    for axis in range(2):
        lo = float(projected[:, axis].min())
        hi = float(projected[:, axis].max())
        span = hi - lo
        if span <= 0.0:
            center = (lo + hi) / 2.0
            bounds.append((center - 0.5, center + 0.5))
        else:
            bounds.append((lo - BOUNDS_MARGIN * span, hi + BOUNDS_MARGIN * span))
    return ReducedMap(mean=mean, basis=basis, bounds=(bounds[0], bounds[1]),
                      grid_n=int(grid_n))


def embed(rmap: ReducedMap, v: np.ndarray) -> tuple[float, float]:
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (rmap.dim,):
        raise ValueError(f"descriptor has dim {v.shape}, map expects ({rmap.dim},)")
    x, y = (v - rmap.mean) @ rmap.basis.T
    return float(x), float(y)


def quantize(rmap: ReducedMap, point: tuple[float, float]) -> tuple[int, int]:
    """Linear binning with out-of-bounds points clamped to the edge cells."""
    cell = []
    for axis in range(2):
        lo, hi = rmap.bounds[axis]
        t = (point[axis] - lo) / (hi - lo)
        cell.append(int(np.clip(np.floor(t * rmap.grid_n), 0, rmap.grid_n - 1)))
    return cell[0], cell[1]


def save_map(rmap: ReducedMap, path) -> None:
    doc = {
        "d": rmap.dim,
        "mean": rmap.mean.tolist(),
        "basis": rmap.basis.tolist(),
        "bounds": [list(b) for b in rmap.bounds],
        "grid_n": rmap.grid_n,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_map(path) -> ReducedMap:
    with open(path) as fh:
        doc = json.load(fh)
    rmap = ReducedMap(
        mean=np.asarray(doc["mean"], dtype=np.float64),
        basis=np.asarray(doc["basis"], dtype=np.float64),
        bounds=(tuple(doc["bounds"][0]), tuple(doc["bounds"][1])),
        grid_n=int(doc["grid_n"]),
    )
    if rmap.dim != int(doc["d"]):
        raise ValueError("map dimension does not match its mean vector")
    return rmap


def load_feature_file(path) -> dict[str, np.ndarray]:
    """Import externally computed descriptors: one JSON object per line with
    ``id`` and ``values`` keys. All vectors must share one dimension."""
    out: dict[str, np.ndarray] = {}
    dim = None
    with open(path) as fh:
        for ln, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            vec = np.asarray(rec["values"], dtype=np.float64)
            if vec.ndim != 1:
                raise ValueError(f"line {ln}: values must be a flat list")
            if dim is None:
                dim = vec.shape[0]
            elif vec.shape[0] != dim:
                raise ValueError(
                    f"line {ln}: dimension {vec.shape[0]} != {dim} of earlier rows"
                )
            out[str(rec["id"])] = vec
    if not out:
        raise ValueError(f"no feature vectors found in {Path(path)}")
    return out
