"""SVG 1.1 serialisation of phenotypes, byte-stable for replay checks."""

from __future__ import annotations

from .engine import Phenotype, pen_stroke_width

_HEADER = (
    '<?xml version="1.0" encoding="UTF-8"?>\n'
    '<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
    'viewBox="0 0 {w} {h}">\n'
    '<rect width="{w}" height="{h}" fill="white"/>\n'
)


def to_svg(p: Phenotype) -> bytes:
    """Serialise paths as one polyline element each, in path order.

    Coordinates are written with three decimals, so emission is
    byte-deterministic and a parse-back stays within 5e-4 px.
    """
    parts = [_HEADER.format(w=p.width, h=p.height)]
    for path in p.paths:
        pts = " ".join(f"{x:.3f},{y:.3f}" for x, y in path.points.tolist())
        parts.append(
            f'<polyline fill="none" stroke="black" '
            f'stroke-width="{pen_stroke_width(path.pen):.2f}" '
            f'stroke-linecap="round" points="{pts}"/>\n'
        )
    parts.append("</svg>\n")
    return "".join(parts).encode("utf-8")


def write_svg(p: Phenotype, path) -> None:
    with open(path, "wb") as fh:
        fh.write(to_svg(p))
