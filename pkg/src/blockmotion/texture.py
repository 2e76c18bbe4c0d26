"""Neighbourhood texture vectors and their aggregation over pixel blocks.

A 3x3 neighbourhood is summarised by a 5-d vector: the eight
centre-minus-neighbour differences are normalised to unit length, split
into four orthonormal pair-sums (low-pass) and four pair-differences
(high-pass), and the high-pass half is collapsed to its energy. The
construction cancels additive intensity offsets outright and the
normalisation removes multiplicative gain, so the representation tracks
local structure rather than illumination. Averaging the per-pixel vectors
over pixel blocks yields a coarse grid of block textures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SQRT2 = math.sqrt(2.0)

# Neighbour order for the difference vector: row-major with the centre
# skipped, i.e. NW, N, NE, W, E, SW, S, SE. Downstream coefficients are
# permutation-sensitive, so this order is part of the representation.
NEIGHBOUR_OFFSETS = ((0, 0), (0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1), (2, 2))


def directional_differences(patch: np.ndarray) -> np.ndarray:
    """Centre-minus-neighbour differences of (..., 3, 3) patches as (..., 8)."""
    p = np.asarray(patch, dtype=np.float64)
    if p.shape[-2:] != (3, 3):
        raise ValueError(f"expected (..., 3, 3) patch, got shape {p.shape}")
    centre = p[..., 1, 1]
    return np.stack([centre - p[..., i, j] for i, j in NEIGHBOUR_OFFSETS], axis=-1)


def normalize_differences(diffs: np.ndarray) -> np.ndarray:
    """Scale difference vectors to unit L2 norm; the zero vector stays zero."""
    d = np.asarray(diffs, dtype=np.float64)
    norm = np.sqrt((d * d).sum(axis=-1, keepdims=True))
    out = np.zeros_like(d)
    np.divide(d, norm, out=out, where=norm > 0)
    return out


def haar_decompose(vec: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Single-level transform of (..., 8) vectors into four low-pass and
    four high-pass coefficients.

    Adjacent non-overlapping pairs (0,1), (2,3), (4,5), (6,7) are combined
    as (a+b)/sqrt(2) and (a-b)/sqrt(2), which keeps the pair orthonormal:
    the summed squares of both outputs equal the input's squared norm.
    """
    v = np.asarray(vec, dtype=np.float64)
    if v.shape[-1] != 8:
        raise ValueError(f"expected (..., 8) vector, got shape {v.shape}")
    approx = (v[..., 0::2] + v[..., 1::2]) / SQRT2
    detail = (v[..., 0::2] - v[..., 1::2]) / SQRT2
    return approx, detail


def texture_vector(patch: np.ndarray) -> np.ndarray:
    """5-d texture of (..., 3, 3) patches: four low-pass coefficients plus
    the high-pass energy.

    For any patch with a non-zero difference vector the squared norm of the
    low-pass part plus the energy term equals 1; a flat patch maps to the
    exact zero vector.
    """
    unit = normalize_differences(directional_differences(patch))
    approx, detail = haar_decompose(unit)
    energy = (detail * detail).sum(axis=-1, keepdims=True)
    return np.concatenate([approx, energy], axis=-1)


def _field_planes(data: np.ndarray) -> np.ndarray:
    """Channel-first (5, h-2, w-2) texture field; hot path of block_textures.

    Same quantity as :func:`texture_vector` per interior pixel, computed
    with contiguous per-plane operations (values agree to rounding error).
    """
    x = np.asarray(data, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 3 or x.shape[1] < 3:
        raise ValueError(f"frame must be at least 3x3, got shape {x.shape}")
    h2, w2 = x.shape[0] - 2, x.shape[1] - 2
    c = x[1:-1, 1:-1]
    planes = np.empty((8, h2, w2))
    shifts = ((0, 0), (0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1), (2, 2))
    for k, (dy, dx) in enumerate(shifts):
        np.subtract(c, x[dy : dy + h2, dx : dx + w2], out=planes[k])

    norm2 = np.einsum("kij,kij->ij", planes, planes)
    scale = np.zeros_like(norm2)
    np.divide(1.0, np.sqrt(norm2), out=scale, where=norm2 > 0)

    out = np.empty((5, h2, w2))
    low_scale = scale / SQRT2
    for m in range(4):
        np.add(planes[2 * m], planes[2 * m + 1], out=out[m])
        out[m] *= low_scale
    energy = np.zeros((h2, w2))
    tmp = np.empty((h2, w2))
    for m in range(4):
        np.subtract(planes[2 * m], planes[2 * m + 1], out=tmp)
        tmp *= tmp
        energy += tmp
    # detail energy: sum of ((d0-d1)/sqrt(2) * scale)^2 = 0.5*scale^2*sum (d0-d1)^2
    out[4] = energy * (0.5 * scale * scale)
    return out


def texture_field(data: np.ndarray) -> np.ndarray:
    """Texture vectors for every interior pixel of a frame.

    Returns an (h-2, w-2, 5) array: entry (y, x) is the texture of the
    neighbourhood centred at pixel (y+1, x+1). Border pixels have no full
    neighbourhood and are excluded.
    """
    return np.moveaxis(_field_planes(data), 0, -1).copy()


@dataclass(frozen=True)
class BlockGridSpec:
    """Block geometry: size and stride in pixels.

    stride == block size tiles the frame without overlap; stride == half
    the block size gives the 50%-overlapping layout. Blocks that do not fit
    entirely inside the frame are dropped from the grid.
    """

    block_w: int = 8
    block_h: int = 8
    stride_x: int = 4
    stride_y: int = 4

    def __post_init__(self):
        for name in ("block_w", "block_h", "stride_x", "stride_y"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.stride_x > self.block_w or self.stride_y > self.block_h:
            raise ValueError("stride must not exceed block size")

    @classmethod
    def overlapping(cls, size: int = 8) -> "BlockGridSpec":
        """Blocks of ``size`` with half-block overlap."""
        return cls(size, size, max(size // 2, 1), max(size // 2, 1))

    @classmethod
    def non_overlapping(cls, size: int = 12) -> "BlockGridSpec":
        """Disjoint tiling with blocks of ``size``."""
        return cls(size, size, size, size)

    @property
    def is_overlapping(self) -> bool:
        return self.stride_x < self.block_w or self.stride_y < self.block_h

    def grid_shape(self, frame_h: int, frame_w: int) -> tuple[int, int]:
        """(rows, cols) of fully contained blocks; errors if none fit."""
        if frame_w < self.block_w or frame_h < self.block_h:
            raise ValueError(
                f"frame {frame_w}x{frame_h} smaller than one "
                f"{self.block_w}x{self.block_h} block"
            )
        cols = (frame_w - self.block_w) // self.stride_x + 1
        rows = (frame_h - self.block_h) // self.stride_y + 1
        return rows, cols


@dataclass
class BlockTextureGrid:
    """Per-block mean texture vectors for one frame."""

    spec: BlockGridSpec
    frame_w: int
    frame_h: int
    values: np.ndarray  # (rows, cols, 5)

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]


def block_textures(frame, spec: BlockGridSpec, stats: dict | None = None) -> BlockTextureGrid:
    """Average the texture field over every block of the grid.

    Each cell is the mean texture vector over the pixel positions of that
    block whose full 3x3 neighbourhood lies inside the frame; positions on
    the frame border contribute nothing. ``stats``, when given, accumulates
    the empirical max absolute component under key ``max_abs_component``.
    """
    data = np.asarray(getattr(frame, "data", frame), dtype=np.float64)
    h, w = data.shape
    rows, cols = spec.grid_shape(h, w)

    field = _field_planes(data)
    padded = np.zeros((5, h, w))
    padded[:, 1 : h - 1, 1 : w - 1] = field
    valid = np.zeros((h, w))
    valid[1 : h - 1, 1 : w - 1] = 1.0

    # Summed-area tables make each block mean an O(1) corner lookup.
    zint = np.zeros((5, h + 1, w + 1))
    zint[:, 1:, 1:] = padded.cumsum(axis=1).cumsum(axis=2)
    vint = np.zeros((h + 1, w + 1))
    vint[1:, 1:] = valid.cumsum(axis=0).cumsum(axis=1)

    y0 = np.arange(rows) * spec.stride_y
    x0 = np.arange(cols) * spec.stride_x
    y1 = y0 + spec.block_h
    x1 = x0 + spec.block_w

    def rect_sum(table):
        return (
            table[..., y1[:, None], x1[None, :]]
            - table[..., y0[:, None], x1[None, :]]
            - table[..., y1[:, None], x0[None, :]]
            + table[..., y0[:, None], x0[None, :]]
        )

    sums = np.moveaxis(rect_sum(zint), 0, -1)
    counts = rect_sum(vint)
    values = np.zeros((rows, cols, 5))
    np.divide(sums, counts[..., None], out=values, where=counts[..., None] > 0)

    if stats is not None:
        peak = float(np.abs(values).max()) if values.size else 0.0
        stats["max_abs_component"] = max(stats.get("max_abs_component", 0.0), peak)
    return BlockTextureGrid(spec=spec, frame_w=w, frame_h=h, values=values)
