"""Stationary background model over block textures.

The model keeps one 5-d vector per block and nudges every component by a
fixed quantum towards the current block texture each frame (a sign-based
delta modulation). The L1 distance between the previous model and the
current texture is the motion likelihood; blocks at or above the tolerance
threshold are flagged moving.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .texture import BlockGridSpec, BlockTextureGrid

# Full span of the 5-d L1 likelihood when every component stays within
# +-1/sqrt(2); tolerance is carved out of this range.
TOLERANCE_SCALE = 5.0 / math.sqrt(2.0)


def tolerance(tradeoff: float) -> float:
    """Detection threshold for a tradeoff in [0, 1].

    tradeoff=0 yields the full-range threshold (nothing is ever flagged on
    in-range input); tradeoff=1 yields 0 (everything is flagged).
    """
    if not 0.0 <= tradeoff <= 1.0:
        raise ValueError(f"tradeoff must be in [0, 1], got {tradeoff}")
    return (1.0 - tradeoff) * TOLERANCE_SCALE


@dataclass(frozen=True)
class DetectorParams:
    """Learning rate and tradeoff; the threshold tau is derived, never set."""

    alpha: float = 0.05
    tradeoff: float = 0.98

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if not 0.0 <= self.tradeoff <= 1.0:
            raise ValueError(f"tradeoff must be in [0, 1], got {self.tradeoff}")

    @property
    def tau(self) -> float:
        return tolerance(self.tradeoff)


@dataclass
class MotionMap:
    """Per-block detection output for one frame.

    ``moving[k, l]`` is True exactly when ``likelihood[k, l]`` reached the
    tolerance used for the step.
    """

    spec: BlockGridSpec
    frame_w: int
    frame_h: int
    moving: np.ndarray  # (rows, cols) bool
    likelihood: np.ndarray  # (rows, cols) float64


class StationaryModel:
    """Mutable per-block background estimate.

    Frames must be applied strictly in order through :meth:`step`; the
    model is single-writer. ``peak_likelihood`` records the largest
    likelihood ever observed, as evidence of the value range actually
    reached on real input.
    """

    def __init__(self, spec: BlockGridSpec, frame_w: int, frame_h: int,
                 values: np.ndarray, frame_count: int = 1):
        values = np.asarray(values, dtype=np.float64)
        expected = spec.grid_shape(frame_h, frame_w) + (5,)
        if values.shape != expected:
            raise ValueError(f"model values shape {values.shape} != {expected}")
        self.spec = spec
        self.frame_w = frame_w
        self.frame_h = frame_h
        self.values = values
        self.frame_count = frame_count
        self.peak_likelihood = 0.0

    @classmethod
    def from_first_textures(cls, grid: BlockTextureGrid) -> "StationaryModel":
        """Seed the model with the first frame's block textures, verbatim."""
        return cls(grid.spec, grid.frame_w, grid.frame_h, grid.values.copy())

    def step(self, grid: BlockTextureGrid, params: DetectorParams) -> MotionMap:
        """Detect against the current textures, then update the model.

        The likelihood is measured against the pre-update model; the update
        then moves every component by exactly +-alpha (or 0 on an exact
        match) towards the current texture.
        """
        if grid.spec != self.spec or (grid.frame_w, grid.frame_h) != (self.frame_w, self.frame_h):
            raise ValueError(
                f"texture grid {grid.spec}/{grid.frame_w}x{grid.frame_h} does not match "
                f"model {self.spec}/{self.frame_w}x{self.frame_h}"
            )
        t = grid.values
        likelihood = np.abs(self.values - t).sum(axis=-1)
        self.values += params.alpha * np.sign(t - self.values)
        self.frame_count += 1
        self.peak_likelihood = max(self.peak_likelihood, float(likelihood.max()))
        moving = likelihood >= params.tau
        return MotionMap(self.spec, self.frame_w, self.frame_h, moving, likelihood)


def save_model(model: StationaryModel, path) -> None:
    """Serialise a model snapshot as CSV with a geometry header."""
    with open(path, "w") as f:
        f.write("# blockmotion stationary-model v1\n")
        f.write(
            "# block_w=%d block_h=%d stride_x=%d stride_y=%d "
            "frame_w=%d frame_h=%d frame_count=%d\n"
            % (
                model.spec.block_w,
                model.spec.block_h,
                model.spec.stride_x,
                model.spec.stride_y,
                model.frame_w,
                model.frame_h,
                model.frame_count,
            )
        )
        f.write("row,col,c0,c1,c2,c3,c4\n")
        rows, cols, _ = model.values.shape
        for r in range(rows):
            for c in range(cols):
                cells = ",".join("%.17g" % v for v in model.values[r, c])
                f.write(f"{r},{c},{cells}\n")


def load_model(path) -> StationaryModel:
    """Load a snapshot written by :func:`save_model`; round-trips exactly."""
    with open(path) as f:
        line = f.readline()
        if "stationary-model" not in line:
            raise ValueError(f"{path}: not a model snapshot")
        header = {}
        for token in f.readline().lstrip("# ").split():
            key, _, value = token.partition("=")
            header[key] = int(value)
        f.readline()  # column names
        spec = BlockGridSpec(
            header["block_w"], header["block_h"], header["stride_x"], header["stride_y"]
        )
        rows, cols = spec.grid_shape(header["frame_h"], header["frame_w"])
        values = np.zeros((rows, cols, 5))
        for line in f:
            parts = line.strip().split(",")
            if len(parts) != 7:
                raise ValueError(f"{path}: malformed row {line!r}")
            r, c = int(parts[0]), int(parts[1])
            values[r, c] = [float(v) for v in parts[2:]]
    return StationaryModel(
        spec, header["frame_w"], header["frame_h"], values, header["frame_count"]
    )
