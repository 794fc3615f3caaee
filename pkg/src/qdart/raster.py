"""Deterministic rasterisation of phenotypes to grayscale pixel buffers.

Paths are drawn at 2x resolution and box-filtered down, then quantised to
8-bit levels so the in-memory raster is exactly what a saved PNG reads back.
"""

from __future__ import annotations

import numpy as np
from PIL import Image, ImageDraw

from .engine import Phenotype, pen_stroke_width

SUPERSAMPLE = 2


def rasterize(p: Phenotype, supersample: int = SUPERSAMPLE) -> np.ndarray:
    """Render paths black on white; returns an (h, w) array of intensities
    in [0, 1], quantised to the 256 PNG levels."""
    ss = int(supersample)
    img = Image.new("L", (p.width * ss, p.height * ss), 255)
    draw = ImageDraw.Draw(img)
    for path in p.paths:
        if len(path.points) < 2:
            continue
        w = max(1, int(pen_stroke_width(path.pen) * ss + 0.5))
        draw.line((path.points * ss).ravel().tolist(), fill=0, width=w)
    hi = np.asarray(img, dtype=np.float64)
    lo = hi.reshape(p.height, ss, p.width, ss).mean(axis=(1, 3))
    return np.floor(lo + 0.5) / 255.0


def to_png_bytes(raster: np.ndarray) -> bytes:
    import io

    buf = io.BytesIO()
    Image.fromarray(np.round(raster * 255.0).astype(np.uint8), mode="L").save(
        buf, format="PNG", optimize=False
    )
    return buf.getvalue()


def write_png(raster: np.ndarray, path) -> None:
    with open(path, "wb") as fh:
        fh.write(to_png_bytes(raster))


def load_png(path) -> np.ndarray:
    """Read a grayscale PNG back into the [0, 1] intensity convention."""
    with Image.open(path) as img:
        arr = np.asarray(img.convert("L"), dtype=np.float64)
    return arr / 255.0
