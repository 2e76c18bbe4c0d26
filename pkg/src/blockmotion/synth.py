"""Deterministic synthetic grayscale sequences with exact ground truth.

Scenes are built from a strongly textured static background (no flat
spots, values kept clear of 0/255 so additive noise survives
quantisation) plus one optional effect: a moving textured rectangle, a
global illumination ramp or step, or a region whose texture oscillates in
place. Ground truth marks moving-object pixels only; illumination changes
and background dynamics are stationary by definition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .frame_io import Frame


@dataclass
class SynthResult:
    frames: list[Frame]
    truths: list[np.ndarray]  # uint8 {0,1}, aligned with frames


def textured_background(height: int, width: int, period: int = 16,
                        amplitude: float = 45.0, base: float = 128.0) -> np.ndarray:
    """Smooth high-contrast background with no flat regions."""
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    waves = np.sin(2 * np.pi * xx / period) * np.sin(2 * np.pi * yy / (period + 3))
    ramp = 10.0 * (xx + yy) / (width + height)  # keeps the gradient nonzero everywhere
    return base + amplitude * waves + ramp


def checker_texture(height: int, width: int, check: int = 4,
                    lo: float = 88.0, hi: float = 168.0) -> np.ndarray:
    """Fine checkerboard patch used as the moving object's fill."""
    yy, xx = np.mgrid[0:height, 0:width]
    return np.where(((yy // check) + (xx // check)) % 2 == 0, hi, lo).astype(np.float64)


def _with_noise(scene: np.ndarray, sigma: float, rng: np.random.Generator) -> np.ndarray:
    if sigma == 0:
        return scene.copy()
    return scene + rng.normal(0.0, sigma, scene.shape)


def static_scene(count: int, width: int = 320, height: int = 240,
                 sigma: float = 2.0, seed: int = 0) -> SynthResult:
    """Static textured scene plus i.i.d. Gaussian noise; truth all-stationary."""
    rng = np.random.default_rng(seed)
    scene = textured_background(height, width)
    zero = np.zeros((height, width), dtype=np.uint8)
    frames = [Frame(_with_noise(scene, sigma, rng), index=f) for f in range(count)]
    return SynthResult(frames, [zero.copy() for _ in range(count)])


def moving_rect(count: int, width: int = 320, height: int = 240, sigma: float = 2.0,
                seed: int = 0, rect_w: int = 24, rect_h: int = 24,
                speed_x: int = 2, speed_y: int = 0,
                start_x: int = 40, start_y: int = 100) -> SynthResult:
    """Textured rectangle translating at a fixed speed over the background.

    The rectangle must stay inside the frame for the whole sequence; the
    truth mask is its exact footprint at each frame.
    """
    last_x = start_x + speed_x * (count - 1)
    last_y = start_y + speed_y * (count - 1)
    for x, y in ((start_x, start_y), (last_x, last_y)):
        if x < 0 or y < 0 or x + rect_w > width or y + rect_h > height:
            raise ValueError(
                f"rectangle leaves the {width}x{height} frame during the sequence"
            )
    rng = np.random.default_rng(seed)
    scene = textured_background(height, width)
    patch = checker_texture(rect_h, rect_w)
    frames: list[Frame] = []
    truths: list[np.ndarray] = []
    for f in range(count):
        x = start_x + speed_x * f
        y = start_y + speed_y * f
        composed = scene.copy()
        composed[y : y + rect_h, x : x + rect_w] = patch
        truth = np.zeros((height, width), dtype=np.uint8)
        truth[y : y + rect_h, x : x + rect_w] = 1
        frames.append(Frame(_with_noise(composed, sigma, rng), index=f))
        truths.append(truth)
    return SynthResult(frames, truths)


def illumination_scene(count: int, width: int = 320, height: int = 240,
                       sigma: float = 2.0, seed: int = 0, mode: str = "ramp",
                       magnitude: float = 30.0) -> SynthResult:
    """Static scene under a global brightness ramp or mid-sequence step."""
    if mode not in ("ramp", "step"):
        raise ValueError(f"mode must be 'ramp' or 'step', got {mode!r}")
    rng = np.random.default_rng(seed)
    scene = textured_background(height, width)
    zero = np.zeros((height, width), dtype=np.uint8)
    frames: list[Frame] = []
    for f in range(count):
        if mode == "ramp":
            offset = magnitude * f / max(count - 1, 1)
        else:
            offset = magnitude if f >= count // 2 else 0.0
        frames.append(Frame(_with_noise(scene + offset, sigma, rng), index=f))
    return SynthResult(frames, [zero.copy() for _ in range(count)])


def oscillating_scene(count: int, width: int = 320, height: int = 240,
                      sigma: float = 2.0, seed: int = 0,
                      region: tuple[int, int, int, int] | None = None,
                      period: int = 8) -> SynthResult:
    """Background region whose texture phase flips periodically in place.

    Models background dynamics (e.g. foliage): the region alternates
    between two texture phases every half period. Truth is all-stationary.
    """
    if period < 2:
        raise ValueError(f"period must be >= 2, got {period}")
    rng = np.random.default_rng(seed)
    scene = textured_background(height, width)
    if region is None:
        region = (width // 4, height // 4, width // 4, height // 4)
    x, y, w, h = region
    if w < 1 or h < 1 or x < 0 or y < 0 or x + w > width or y + h > height:
        raise ValueError(f"region {region} does not fit in {width}x{height}")
    phase_a = checker_texture(h, w, check=3)
    phase_b = phase_a[:, ::-1].copy()
    zero = np.zeros((height, width), dtype=np.uint8)
    frames: list[Frame] = []
    for f in range(count):
        composed = scene.copy()
        patch = phase_a if (f % period) < period // 2 else phase_b
        composed[y : y + h, x : x + w] = patch
        frames.append(Frame(_with_noise(composed, sigma, rng), index=f))
    return SynthResult(frames, [zero.copy() for _ in range(count)])
