"""Procedural noise fields steering the drawing agents.

Five variants share one entry point, ``noise_eval``: value noise, gradient
(Perlin-style) noise, its fractal sum, a curl field derived from the fractal
potential, and a ridged fractal. All evaluation is pure and array-capable;
the lattice tables are fixed constants, so a field's output depends only on
its parameters and the sample position.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

# Classic reference permutation table; fixed so fields need no hidden seed.
_PERM_BASE = np.array([
    151, 160, 137, 91, 90, 15, 131, 13, 201, 95, 96, 53, 194, 233, 7, 225,
    140, 36, 103, 30, 69, 142, 8, 99, 37, 240, 21, 10, 23, 190, 6, 148,
    247, 120, 234, 75, 0, 26, 197, 62, 94, 252, 219, 203, 117, 35, 11, 32,
    57, 177, 33, 88, 237, 149, 56, 87, 174, 20, 125, 136, 171, 168, 68, 175,
    74, 165, 71, 134, 139, 48, 27, 166, 77, 146, 158, 231, 83, 111, 229, 122,
    60, 211, 133, 230, 220, 105, 92, 41, 55, 46, 245, 40, 244, 102, 143, 54,
    65, 25, 63, 161, 1, 216, 80, 73, 209, 76, 132, 187, 208, 89, 18, 169,
    200, 196, 135, 130, 116, 188, 159, 86, 164, 100, 109, 198, 173, 186, 3, 64,
    52, 217, 226, 250, 124, 123, 5, 202, 38, 147, 118, 126, 255, 82, 85, 212,
    207, 206, 59, 227, 47, 16, 58, 17, 182, 189, 28, 42, 223, 183, 170, 213,
    119, 248, 152, 2, 44, 154, 163, 70, 221, 153, 101, 155, 167, 43, 172, 9,
    129, 22, 39, 253, 19, 98, 108, 110, 79, 113, 224, 232, 178, 185, 112, 104,
    218, 246, 97, 228, 251, 34, 242, 193, 238, 210, 144, 12, 191, 179, 162, 241,
    81, 51, 145, 235, 249, 14, 239, 107, 49, 192, 214, 31, 181, 199, 106, 157,
    184, 84, 204, 176, 115, 121, 50, 45, 127, 4, 150, 254, 138, 236, 205, 93,
    222, 114, 67, 29, 24, 72, 243, 141, 128, 195, 78, 66, 215, 61, 156, 180,
], dtype=np.int64)
_PERM = np.concatenate([_PERM_BASE, _PERM_BASE])

# 16 gradient directions (12 edge vectors of a cube, 4 repeats).
_GRADS = np.array([
    [1, 1, 0], [-1, 1, 0], [1, -1, 0], [-1, -1, 0],
    [1, 0, 1], [-1, 0, 1], [1, 0, -1], [-1, 0, -1],
    [0, 1, 1], [0, -1, 1], [0, 1, -1], [0, -1, -1],
    [1, 1, 0], [0, -1, 1], [-1, 1, 0], [0, -1, -1],
], dtype=np.float64)
_GX = np.ascontiguousarray(_GRADS[:, 0])
_GY = np.ascontiguousarray(_GRADS[:, 1])
_GZ = np.ascontiguousarray(_GRADS[:, 2])


class NoiseAlgorithm(enum.IntEnum):
    VALUE = 0
    PERLIN = 1
    FBM_PERLIN = 2
    CURL_PERLIN = 3
    RIDGED = 4


@dataclass(frozen=True)
class NoiseField:
    """A configured noise variant; ``z`` selects the base slice of the volume."""

    algorithm: NoiseAlgorithm
    freq_x: float = 0.01
    freq_y: float = 0.01
    octaves: int = 1
    falloff: float = 0.5
    z: float = 0.0

    def __post_init__(self):
        if self.octaves < 1:
            raise ValueError("octaves must be >= 1")
        if not 0.0 < self.falloff <= 1.0:
            raise ValueError("falloff must be in (0, 1]")


def _fade(t):
    return t * t * t * (t * (t * 6.0 - 15.0) + 10.0)


def _corner_hash(xi, yi, zi):
    return _PERM[_PERM[_PERM[xi & 255] + (yi & 255)] + (zi & 255)]


def _perlin3(x, y, z):
    """Gradient noise on the unit lattice; zero at integer lattice points."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    xi = np.floor(x).astype(np.int64)
    yi = np.floor(y).astype(np.int64)
    zi = np.floor(z).astype(np.int64)
    xf, yf, zf = x - xi, y - yi, z - zi
    u, v, w = _fade(xf), _fade(yf), _fade(zf)
    xf1, yf1, zf1 = xf - 1.0, yf - 1.0, zf - 1.0

    xi &= 255
    yi &= 255
    zi &= 255
    a = _PERM[xi] + yi
    aa = _PERM[a] + zi
    ab = _PERM[a + 1] + zi
    b = _PERM[xi + 1] + yi
    ba = _PERM[b] + zi
    bb = _PERM[b + 1] + zi

    def gdot(h, px, py, pz):
        h = h & 15
        return _GX[h] * px + _GY[h] * py + _GZ[h] * pz

    n000 = gdot(_PERM[aa], xf, yf, zf)
    n100 = gdot(_PERM[ba], xf1, yf, zf)
    n010 = gdot(_PERM[ab], xf, yf1, zf)
    n110 = gdot(_PERM[bb], xf1, yf1, zf)
    n001 = gdot(_PERM[aa + 1], xf, yf, zf1)
    n101 = gdot(_PERM[ba + 1], xf1, yf, zf1)
    n011 = gdot(_PERM[ab + 1], xf, yf1, zf1)
    n111 = gdot(_PERM[bb + 1], xf1, yf1, zf1)

    nx00 = n000 + u * (n100 - n000)
    nx10 = n010 + u * (n110 - n010)
    nx01 = n001 + u * (n101 - n001)
    nx11 = n011 + u * (n111 - n011)
    nxy0 = nx00 + v * (nx10 - nx00)
    nxy1 = nx01 + v * (nx11 - nx01)
    return nxy0 + w * (nxy1 - nxy0)


def _value3(x, y, z):
    """Lattice value noise with smoothstep interpolation; output in [-1, 1]."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    xi = np.floor(x).astype(np.int64)
    yi = np.floor(y).astype(np.int64)
    zi = np.floor(z).astype(np.int64)
    u = _fade(x - xi)
    v = _fade(y - yi)
    w = _fade(z - zi)

    def corner(dx, dy, dz):
        return _corner_hash(xi + dx, yi + dy, zi + dz) / 127.5 - 1.0

    c000, c100 = corner(0, 0, 0), corner(1, 0, 0)
    c010, c110 = corner(0, 1, 0), corner(1, 1, 0)
    c001, c101 = corner(0, 0, 1), corner(1, 0, 1)
    c011, c111 = corner(0, 1, 1), corner(1, 1, 1)
    x00 = c000 + u * (c100 - c000)
    x10 = c010 + u * (c110 - c010)
    x01 = c001 + u * (c101 - c001)
    x11 = c011 + u * (c111 - c011)
    y0 = x00 + v * (x10 - x00)
    y1 = x01 + v * (x11 - x01)
    return y0 + w * (y1 - y0)


def _fbm3(x, y, z, octaves, falloff):
    """Fractal sum of gradient noise, normalised by the total amplitude."""
    total = np.zeros(np.broadcast(np.asarray(x), np.asarray(y), np.asarray(z)).shape)
    amp = 1.0
    norm = 0.0
    for k in range(octaves):
        scale = float(1 << k)
        total = total + amp * _perlin3(x * scale, y * scale, z * scale)
        norm += amp
        amp *= falloff
    return total / norm


def _ridged3(x, y, z, octaves, falloff):
    total = np.zeros(np.broadcast(np.asarray(x), np.asarray(y), np.asarray(z)).shape)
    amp = 1.0
    norm = 0.0
    for k in range(octaves):
        scale = float(1 << k)
        total = total + amp * (1.0 - 2.0 * np.abs(_perlin3(x * scale, y * scale, z * scale)))
        norm += amp
        amp *= falloff
    return total / norm


def _potential(field: NoiseField, x, y, z):
    return _fbm3(
        np.asarray(x) * field.freq_x,
        np.asarray(y) * field.freq_y,
        field.z + np.asarray(z),
        field.octaves,
        field.falloff,
    )


def curl_vector(field: NoiseField, x, y, z=0.0, h: float = 0.5):
    """2-D curl of the fractal potential, in pixel space.

    Computed as (d/dy psi, -d/dx psi) with central differences of step ``h``
    px, which keeps the field divergence-free up to O(h^2).
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    vx = (_potential(field, x, y + h, z) - _potential(field, x, y - h, z)) / (2.0 * h)
    vy = -(_potential(field, x + h, y, z) - _potential(field, x - h, y, z)) / (2.0 * h)
    return vx, vy


def noise_eval(field: NoiseField, x, y, z=0.0):
    """Evaluate the field at pixel position (x, y) and slice offset ``z``.

    Returns values in [-1, 1]. The curl variant reports the direction angle
    of its vector field, mapped from [-pi, pi] onto [-1, 1]; use
    ``curl_vector`` for the vector itself.
    """
    u = np.asarray(x, dtype=np.float64) * field.freq_x
    v = np.asarray(y, dtype=np.float64) * field.freq_y
    w = field.z + np.asarray(z, dtype=np.float64)
    algo = field.algorithm
    if algo == NoiseAlgorithm.VALUE:
        out = _value3(u, v, w)
    elif algo == NoiseAlgorithm.PERLIN:
        out = _perlin3(u, v, w)
    elif algo == NoiseAlgorithm.FBM_PERLIN:
        out = _fbm3(u, v, w, field.octaves, field.falloff)
    elif algo == NoiseAlgorithm.CURL_PERLIN:
        vx, vy = curl_vector(field, x, y, z)
        out = np.arctan2(vy, vx) / np.pi
    elif algo == NoiseAlgorithm.RIDGED:
        out = _ridged3(u, v, w, field.octaves, field.falloff)
    else:  # pragma: no cover
        raise ValueError(f"unknown noise algorithm {algo!r}")
    return np.clip(out, -1.0, 1.0)
