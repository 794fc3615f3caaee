"""Statistical, information and morphological measures of grayscale images.

All measures work on intensities in [0, 1] with a 256-bin histogram, a 0.5
binarisation threshold and 8-connected dark foreground; those conventions
are fixed here so results stay reproducible across runs.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .raster import load_png

HIST_BINS = 256
BINARIZE_THRESHOLD = 0.5
BOX_SIZES = (2, 4, 8, 16, 32, 64)

CSV_HEADER = ["id", "mean", "variance", "cx", "cy", "skew", "entropy", "energy",
              "euler", "fractal_dim"]


@dataclass(frozen=True)
class MetricVector:
    mean: float
    variance: float
    cx: float
    cy: float
    skew: float
    entropy: float
    energy: float
    euler: int
    fractal_dim: float

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    #: metric column names, in CSV order
    names = tuple(CSV_HEADER[1:])


def _histogram(img: np.ndarray) -> np.ndarray:
    levels = np.clip(np.floor(img * 255.0 + 0.5).astype(np.int64), 0, 255)
    counts = np.bincount(levels.ravel(), minlength=HIST_BINS)
    return counts / img.size


def _centroid(img: np.ndarray) -> tuple[float, float]:
    h, w = img.shape
    total = float(img.sum())
    if total <= 0.0:
        return 0.5, 0.5
    xs = img.sum(axis=0) @ np.arange(w)
    ys = img.sum(axis=1) @ np.arange(h)
    cx = xs / total / (w - 1) if w > 1 else 0.5
    cy = ys / total / (h - 1) if h > 1 else 0.5
    return float(cx), float(cy)


def euler_number(fg: np.ndarray) -> int:
    """Connected components minus holes of a binary image, 8-connected
    foreground, by counting 2x2 quad patterns on the zero-padded image."""
    padded = np.zeros((fg.shape[0] + 2, fg.shape[1] + 2), dtype=np.int64)
    padded[1:-1, 1:-1] = fg
    tl = padded[:-1, :-1]
    tr = padded[:-1, 1:]
    bl = padded[1:, :-1]
    br = padded[1:, 1:]
    count = tl + tr + bl + br
    q1 = int(np.count_nonzero(count == 1))
    q3 = int(np.count_nonzero(count == 3))
    diag = (count == 2) & (tl == br)
    qd = int(np.count_nonzero(diag))
    euler4x = q1 - q3 - 2 * qd
    if euler4x % 4 != 0:  # pragma: no cover - quad counting is exact
        raise AssertionError("quad pattern count not divisible by 4")
    return euler4x // 4


def box_counting_dimension(fg: np.ndarray, sizes=BOX_SIZES) -> float:
    """Least-squares slope of log N(s) against log(1/s) over fixed box sizes."""
    if not fg.any():
        return 0.0
    counts = []
    for s in sizes:
        rows = np.arange(0, fg.shape[0], s)
        cols = np.arange(0, fg.shape[1], s)
        boxed = np.add.reduceat(np.add.reduceat(fg, rows, axis=0), cols, axis=1)
        counts.append(np.count_nonzero(boxed))
    log_inv = -np.log(np.asarray(sizes, dtype=np.float64))
    log_n = np.log(np.asarray(counts, dtype=np.float64))
    slope = np.polyfit(log_inv, log_n, 1)[0]
    return float(np.clip(slope, 0.0, 2.0))


def compute_metrics(img: np.ndarray) -> MetricVector:
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2 or img.size == 0:
        raise ValueError("expected a non-empty 2-D grayscale image")
    if img.min() < -1e-9 or img.max() > 1.0 + 1e-9:
        raise ValueError("intensities must lie in [0, 1]")

    mean = float(img.mean())
    variance = float(img.var())
    cx, cy = _centroid(img)

    p = _histogram(img)
    values = np.arange(HIST_BINS) / 255.0
    mu = float(p @ values)
    var_h = float(p @ (values - mu) ** 2)
    if var_h > 1e-18:
        skew = float(p @ (values - mu) ** 3) / var_h ** 1.5
    else:
        skew = 0.0
    nz = p[p > 0]
    entropy = float(-(nz @ np.log2(nz)))
    energy = float(p @ p)

    fg = img < BINARIZE_THRESHOLD
    return MetricVector(
        mean=mean,
        variance=variance,
        cx=cx,
        cy=cy,
        skew=skew,
        entropy=entropy,
        energy=energy,
        euler=euler_number(fg),
        fractal_dim=box_counting_dimension(fg),
    )


def batch_metrics(image_dir) -> tuple[list[tuple[str, MetricVector]], list[tuple[str, str]]]:
    """Compute metrics for every PNG in a directory.

    Returns (rows sorted by image id, per-file failures); a broken file is
    reported and skipped rather than aborting the batch.
    """
    image_dir = Path(image_dir)
    rows: list[tuple[str, MetricVector]] = []
    failures: list[tuple[str, str]] = []
    for path in sorted(image_dir.glob("*.png")):
        try:
            rows.append((path.stem, compute_metrics(load_png(path))))
        except Exception as exc:  # noqa: BLE001 - isolate per-file failures
            failures.append((path.stem, str(exc)))
    return rows, failures


def write_metrics_csv(rows, out_path) -> None:
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for image_id, m in rows:
            writer.writerow([
                image_id,
                f"{m.mean:.12g}", f"{m.variance:.12g}", f"{m.cx:.12g}",
                f"{m.cy:.12g}", f"{m.skew:.12g}", f"{m.entropy:.12g}",
                f"{m.energy:.12g}", str(m.euler), f"{m.fractal_dim:.12g}",
            ])


def read_metrics_csv(path) -> dict[str, MetricVector]:
    out: dict[str, MetricVector] = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out[row["id"]] = MetricVector(
                mean=float(row["mean"]),
                variance=float(row["variance"]),
                cx=float(row["cx"]),
                cy=float(row["cy"]),
                skew=float(row["skew"]),
                entropy=float(row["entropy"]),
                energy=float(row["energy"]),
                euler=int(row["euler"]),
                fractal_dim=float(row["fractal_dim"]),
            )
    return out


def metric_column(rows: dict[str, MetricVector], name: str) -> dict[str, float]:
    if name not in MetricVector.names:
        raise KeyError(name)
    return {image_id: float(getattr(m, name)) for image_id, m in rows.items()}
