"""Rasterise block-level motion maps into per-pixel binary masks."""

from __future__ import annotations

import numpy as np

from .background import MotionMap
from .texture import BlockGridSpec

COMBINE_RULES = ("any", "majority")


def _coverage_counts(flags: np.ndarray, spec: BlockGridSpec, fh: int, fw: int) -> np.ndarray:
    """Per-pixel count of flagged blocks covering each pixel.

    Two difference-array passes: horizontal block extents are accumulated
    per block row, then block rows are spread over their pixel rows.
    """
    rows, cols = flags.shape
    horiz = np.zeros((rows, fw + 1), dtype=np.int32)
    r_idx, c_idx = np.nonzero(flags)
    x0 = c_idx * spec.stride_x
    np.add.at(horiz, (r_idx, x0), 1)
    np.add.at(horiz, (r_idx, x0 + spec.block_w), -1)
    horiz = horiz[:, :fw].cumsum(axis=1)

    vert = np.zeros((fh + 1, fw), dtype=np.int32)
    y0 = np.arange(rows) * spec.stride_y
    vert[y0] += horiz
    vert[y0 + spec.block_h] -= horiz
    return vert[:fh].cumsum(axis=0)


def rasterize(mmap: MotionMap, frame_w: int | None = None, frame_h: int | None = None,
              combine: str = "any") -> np.ndarray:
    """Per-pixel {0,1} mask (uint8) of shape (frame_h, frame_w).

    With ``combine="any"`` a pixel is moving when at least one block
    covering it is moving; ``"majority"`` requires more than half of the
    covering blocks. Pixels outside every block (truncated trailing
    border) are always 0.
    """
    fw = mmap.frame_w if frame_w is None else frame_w
    fh = mmap.frame_h if frame_h is None else frame_h
    spec = mmap.spec
    if spec.grid_shape(fh, fw) != mmap.moving.shape:
        raise ValueError(
            f"motion map grid {mmap.moving.shape} inconsistent with frame {fw}x{fh}"
        )
    if combine not in COMBINE_RULES:
        raise ValueError(f"combine must be one of {COMBINE_RULES}, got {combine!r}")

    votes = _coverage_counts(mmap.moving, spec, fh, fw)
    if combine == "any":
        return (votes > 0).astype(np.uint8)
    cover = _coverage_counts(np.ones_like(mmap.moving), spec, fh, fw)
    return (votes * 2 > cover).astype(np.uint8)
