"""Detector front-ends: stateful wrappers turning frame streams into masks.

Both detectors share the same contract: the first processed frame seeds
the internal state and yields no mask; every later frame yields a {0,1}
pixel mask. Frames must arrive with strictly increasing indices.
"""

from __future__ import annotations

import numpy as np

from .background import DetectorParams, MotionMap, StationaryModel
from .frame_io import Frame
from .pixel_mask import rasterize
from .sigma_delta import GAIN_DEFAULT, V_MIN_DEFAULT, sd_init, sd_step
from .texture import BlockGridSpec, block_textures


class BlockTextureDetector:
    """Block-texture background modelling detector."""

    def __init__(self, spec: BlockGridSpec | None = None,
                 params: DetectorParams | None = None, combine: str = "any"):
        self.spec = spec if spec is not None else BlockGridSpec.overlapping(8)
        self.params = params if params is not None else DetectorParams()
        self.combine = combine
        self.model: StationaryModel | None = None
        self.last_map: MotionMap | None = None
        self.stats: dict[str, float] = {}
        self._last_index: int | None = None

    @classmethod
    def from_model(cls, model: StationaryModel, params: DetectorParams | None = None,
                   combine: str = "any") -> "BlockTextureDetector":
        """Resume from a serialised model snapshot."""
        detector = cls(spec=model.spec, params=params, combine=combine)
        detector.model = model
        return detector

    def _check_order(self, frame: Frame) -> None:
        if self._last_index is not None and frame.index <= self._last_index:
            raise ValueError(
                f"frames must have strictly increasing indices "
                f"({frame.index} after {self._last_index})"
            )
        self._last_index = frame.index

    def process(self, frame: Frame) -> np.ndarray | None:
        """Consume one frame; returns a mask, or None for the seeding frame."""
        self._check_order(frame)
        grid = block_textures(frame.data, self.spec, stats=self.stats)
        if self.model is None:
            self.model = StationaryModel.from_first_textures(grid)
            return None
        self.last_map = self.model.step(grid, self.params)
        self.stats["peak_likelihood"] = self.model.peak_likelihood
        return rasterize(self.last_map, combine=self.combine)


class SigmaDeltaDetector:
    """Per-pixel sigma-delta baseline behind the same streaming interface."""

    def __init__(self, gain: int = GAIN_DEFAULT, v_min: int = V_MIN_DEFAULT):
        self.gain = gain
        self.v_min = v_min
        self.state = None
        self._last_index: int | None = None

    def process(self, frame: Frame) -> np.ndarray | None:
        if self._last_index is not None and frame.index <= self._last_index:
            raise ValueError(
                f"frames must have strictly increasing indices "
                f"({frame.index} after {self._last_index})"
            )
        self._last_index = frame.index
        if self.state is None:
            self.state = sd_init(frame.data, gain=self.gain, v_min=self.v_min)
            return None
        return sd_step(self.state, frame.data)


def make_detector(kind: str, spec: BlockGridSpec | None = None,
                  params: DetectorParams | None = None, combine: str = "any",
                  gain: int = GAIN_DEFAULT, v_min: int = V_MIN_DEFAULT):
    """Detector factory keyed by CLI name."""
    if kind == "block-texture":
        return BlockTextureDetector(spec=spec, params=params, combine=combine)
    if kind == "sigma-delta":
        return SigmaDeltaDetector(gain=gain, v_min=v_min)
    raise ValueError(f"unknown detector {kind!r}")
