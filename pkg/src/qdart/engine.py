"""Agent-based line drawing simulation: genotype-decoded parameters in,
vector paths out.

Agents are seeded on a low-discrepancy grid inside the border inset and step
across the canvas; each step their heading is the blend of three style
fields (linear, circular, spiral) with the configured noise field. Nothing
here draws from a random source, so a parameter set always produces the
same drawing.

The core loop advances a whole batch of drawings at once (per-agent
parameter vectors, noise evaluated per algorithm group); a single drawing
is just a batch of one, so batching cannot change results.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .genome import DrawingParams
from .noise import NoiseAlgorithm, _perlin3, _value3

DEFAULT_CANVAS = (1024, 768)

# z-plane offsets for the two warp channels, away from the drawing slice
_WARP_Z1 = 19.17
_WARP_Z2 = 47.31

# spiral field = tangent plus this much outward radial drift
_SPIRAL_RADIAL = 0.15

# central-difference step (px) for the curl field
_CURL_H = 0.5


class SimulationError(ValueError):
    """Raised when drawing parameters leave nothing to draw on."""


@dataclass(frozen=True)
class Path:
    """One agent's trail: a pen index and an (n, 2) array of pixel coords."""

    pen: int
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        object.__setattr__(self, "points", pts)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError("path points must be an (n, 2) array")


@dataclass(frozen=True)
class Phenotype:
    paths: tuple[Path, ...]
    width: int
    height: int
    raster: np.ndarray | None = None

    def __post_init__(self):
        if self.raster is not None:
            if self.raster.shape != (self.height, self.width):
                raise ValueError("raster dimensions must equal canvas dimensions")

    def with_raster(self, raster: np.ndarray) -> "Phenotype":
        return replace(self, raster=raster)


def pen_stroke_width(pen: int) -> float:
    """Stroke width in px for a pen index (wider pens at higher indices)."""
    return 0.8 + 0.6 * pen


def halton_sequence(count: int, base: int, start: int = 1) -> np.ndarray:
    """First ``count`` terms of the radical-inverse sequence for ``base``."""
    out = np.empty(count, dtype=np.float64)
    for n in range(count):
        i = start + n
        f, r = 1.0, 0.0
        while i > 0:
            f /= base
            r += f * (i % base)
            i //= base
        out[n] = r
    return out


def assign_pens(agent_count: int, pen_count: int, pen_ratio: float) -> np.ndarray:
    """Split agents over pens with geometrically decaying shares.

    Pen j receives a share proportional to ratio**j; ratio 1 splits evenly,
    ratio 0 puts every agent on pen 0.
    """
    weights = np.array([pen_ratio ** j for j in range(pen_count)], dtype=np.float64)
    if weights.sum() == 0.0:
        weights[0] = 1.0
    cum = np.cumsum(weights / weights.sum())
    frac = (np.arange(agent_count) + 0.5) / agent_count
    return np.searchsorted(cum, frac, side="left").clip(0, pen_count - 1)


def validate_drawable(params: DrawingParams, canvas: tuple[int, int]) -> None:
    width, height = int(canvas[0]), int(canvas[1])
    border = float(params.border_width)
    if width - 2.0 * border <= 0.0 or height - 2.0 * border <= 0.0:
        raise SimulationError(
            f"border {border} px leaves a zero-area drawable region on {width}x{height}"
        )


def _gather(params_list, counts, attr) -> np.ndarray:
    return np.concatenate([
        np.full(n, float(getattr(p, attr))) for p, n in zip(params_list, counts)
    ])


def _fbm_amplitudes(falloff: np.ndarray, octaves: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-agent octave amplitude table (max_octaves, n) and its column sums.

    Octaves past an agent's own count get amplitude 0, which keeps one fused
    loop while matching a per-agent truncated sum exactly. Amplitudes come
    from repeated multiplication so they equal a sequential falloff product
    bit for bit.
    """
    max_o = int(octaves.max())
    rows = []
    row = np.ones_like(falloff)
    for k in range(max_o):
        rows.append(np.where(k < octaves, row, 0.0))
        row = row * falloff
    amp = np.array(rows)
    return amp, amp.sum(axis=0)


def _fbm_masked(u, v, w, amp, norm, ridged: bool) -> np.ndarray:
    """Amplitude-masked fractal sum; all octaves go through one fused noise
    call, which changes nothing numerically (the evaluation is elementwise)
    but cuts per-call overhead."""
    max_o = amp.shape[0]
    m = u.shape[0]
    if max_o == 1:
        octave_vals = _perlin3(u, v, w)[None, :]
    else:
        su = np.empty(max_o * m, dtype=np.float64)
        sv = np.empty(max_o * m, dtype=np.float64)
        sw = np.empty(max_o * m, dtype=np.float64)
        for k in range(max_o):
            scale = float(1 << k)
            sl = slice(k * m, (k + 1) * m)
            np.multiply(u, scale, out=su[sl])
            np.multiply(v, scale, out=sv[sl])
            np.multiply(w, scale, out=sw[sl])
        octave_vals = _perlin3(su, sv, sw).reshape(max_o, m)
    total = np.zeros(m, dtype=np.float64)
    for k in range(max_o):
        term = octave_vals[k]
        if ridged:
            term = 1.0 - 2.0 * np.abs(term)
        total += amp[k] * term
    return total / norm


def simulate_batch(
    params_list: list[DrawingParams],
    canvas: tuple[int, int] = DEFAULT_CANVAS,
) -> list[Phenotype]:
    """Simulate several drawings in one fused loop; see ``simulate``.

    All drawings must share one lifetime (it is config-driven, not
    gene-driven); each keeps its own agent population and parameters.
    """
    if not params_list:
        return []
    width, height = int(canvas[0]), int(canvas[1])
    for p in params_list:
        validate_drawable(p, canvas)
    steps = params_list[0].agent_lifetime
    if any(p.agent_lifetime != steps for p in params_list):
        raise ValueError("batched drawings must share one agent lifetime")

    counts = [p.agent_count for p in params_list]
    total = int(np.sum(counts))

    xs, ys = [], []
    for p, n in zip(params_list, counts):
        sx = width - 2.0 * p.border_width
        sy = height - 2.0 * p.border_width
        xs.append(p.border_width + halton_sequence(n, 2) * sx)
        ys.append(p.border_width + halton_sequence(n, 3) * sy)
    x = np.concatenate(xs)
    y = np.concatenate(ys)

    speed = _gather(params_list, counts, "agent_speed")
    strength = _gather(params_list, counts, "noise_strength")
    disp = _gather(params_list, counts, "noise_displacement")
    fx = _gather(params_list, counts, "noise_freq_x")
    fy = _gather(params_list, counts, "noise_freq_y")
    z_scale = _gather(params_list, counts, "noise_z_scale")
    z_pos = _gather(params_list, counts, "z_position")
    falloff = _gather(params_list, counts, "noise_falloff")
    w_lin = _gather(params_list, counts, "style_linear")
    w_circ = _gather(params_list, counts, "style_circular")
    w_spiral = _gather(params_list, counts, "style_spiral")
    octaves = np.concatenate([
        np.full(n, p.noise_octaves, dtype=np.int64) for p, n in zip(params_list, counts)
    ])
    algos = np.concatenate([
        np.full(n, int(p.noise_algorithm), dtype=np.int64)
        for p, n in zip(params_list, counts)
    ])

    groups: dict[int, np.ndarray] = {}
    fbm_tables: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    for algo in np.unique(algos):
        idx = np.nonzero(algos == algo)[0]
        groups[int(algo)] = idx
        if algo in (NoiseAlgorithm.FBM_PERLIN, NoiseAlgorithm.CURL_PERLIN,
                    NoiseAlgorithm.RIDGED):
            fbm_tables[int(algo)] = _fbm_amplitudes(falloff[idx], octaves[idx])

    cx, cy = width / 2.0, height / 2.0
    heading = np.zeros(total, dtype=np.float64)
    trail = np.empty((steps + 1, total, 2), dtype=np.float64)
    trail[0, :, 0] = x
    trail[0, :, 1] = y

    u_noise_x = np.empty(total, dtype=np.float64)
    u_noise_y = np.empty(total, dtype=np.float64)

    for t in range(steps):
        wz = z_pos + (t / steps) * z_scale

        # sampling-position warp, both channels in one noise call
        nu = x * fx
        nv = y * fy
        warp = _perlin3(
            np.concatenate([nu, nu]),
            np.concatenate([nv, nv]),
            np.concatenate([wz + _WARP_Z1, wz + _WARP_Z2]),
        )
        sx = x + disp * warp[:total]
        sy = y + disp * warp[total:]

        for algo, idx in groups.items():
            gu = sx[idx] * fx[idx]
            gv = sy[idx] * fy[idx]
            gw = wz[idx]
            if algo == NoiseAlgorithm.VALUE:
                val = np.clip(_value3(gu, gv, gw), -1.0, 1.0)
            elif algo == NoiseAlgorithm.PERLIN:
                val = np.clip(_perlin3(gu, gv, gw), -1.0, 1.0)
            elif algo == NoiseAlgorithm.FBM_PERLIN:
                amp, norm = fbm_tables[algo]
                val = np.clip(_fbm_masked(gu, gv, gw, amp, norm, False), -1.0, 1.0)
            elif algo == NoiseAlgorithm.RIDGED:
                amp, norm = fbm_tables[algo]
                val = np.clip(_fbm_masked(gu, gv, gw, amp, norm, True), -1.0, 1.0)
            else:  # CURL_PERLIN: curl of the fbm potential, in pixel space
                amp, norm = fbm_tables[algo]
                m = len(idx)
                gx = sx[idx]
                gy = sy[idx]
                pu = np.concatenate([gx, gx, gx + _CURL_H, gx - _CURL_H]) * np.tile(fx[idx], 4)
                pv = np.concatenate([gy + _CURL_H, gy - _CURL_H, gy, gy]) * np.tile(fy[idx], 4)
                pw = np.tile(gw, 4)
                psi = _fbm_masked(pu, pv, pw, np.tile(amp, 4), np.tile(norm, 4), False)
                vx = (psi[:m] - psi[m:2 * m]) / (2.0 * _CURL_H)
                vy = -(psi[2 * m:3 * m] - psi[3 * m:]) / (2.0 * _CURL_H)
                nrm = np.hypot(vx, vy)
                safe = np.where(nrm > 1e-12, nrm, 1.0)
                u_noise_x[idx] = np.where(nrm > 1e-12, vx / safe, 0.0)
                u_noise_y[idx] = np.where(nrm > 1e-12, vy / safe, 0.0)
                continue
            angle = np.pi * val
            u_noise_x[idx] = np.cos(angle)
            u_noise_y[idx] = np.sin(angle)

        dx = x - cx
        dy = y - cy
        dist = np.hypot(dx, dy)
        safe = np.where(dist > 1e-9, dist, 1.0)
        rx = np.where(dist > 1e-9, dx / safe, 0.0)
        ry = np.where(dist > 1e-9, dy / safe, 0.0)
        tx, ty = -ry, rx  # counter-clockwise tangent
        vx = w_lin + w_circ * tx + w_spiral * (tx + _SPIRAL_RADIAL * rx)
        vy = w_circ * ty + w_spiral * (ty + _SPIRAL_RADIAL * ry)
        vx = vx + strength * u_noise_x
        vy = vy + strength * u_noise_y

        mag = np.hypot(vx, vy)
        heading = np.where(mag <= 1e-12, heading, np.arctan2(vy, vx))

        x = x + speed * np.cos(heading)
        y = y + speed * np.sin(heading)

        # mirror a step that exits, then clamp for numeric safety
        x = np.where(x < 0.0, -x, x)
        x = np.where(x > width, 2.0 * width - x, x)
        y = np.where(y < 0.0, -y, y)
        y = np.where(y > height, 2.0 * height - y, y)
        np.clip(x, 0.0, width, out=x)
        np.clip(y, 0.0, height, out=y)

        trail[t + 1, :, 0] = x
        trail[t + 1, :, 1] = y

    phenotypes = []
    offset = 0
    for p, n in zip(params_list, counts):
        pens = assign_pens(n, p.pen_count, p.pen_ratio)
        paths = tuple(
            Path(pen=int(pens[i]), points=trail[:, offset + i, :].copy())
            for i in range(n)
        )
        phenotypes.append(Phenotype(paths=paths, width=width, height=height))
        offset += n
    return phenotypes


def simulate(params: DrawingParams, canvas: tuple[int, int] = DEFAULT_CANVAS) -> Phenotype:
    """Run the drawing simulation and return the recorded paths.

    Raises SimulationError when the border leaves a zero-area placement
    region. Positions are clamped to the canvas; a step that would exit is
    mirrored back across the edge.
    """
    return simulate_batch([params], canvas)[0]
