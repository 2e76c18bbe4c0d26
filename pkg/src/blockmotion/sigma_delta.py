"""Per-pixel sigma-delta background estimator, used as a comparison baseline.

Both the background and the variance estimate move by at most one
intensity unit per frame; everything is plain integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

GAIN_DEFAULT = 4
V_MIN_DEFAULT = 2


@dataclass
class SigmaDeltaState:
    """Per-pixel background and variance estimates (int32)."""

    background: np.ndarray
    variance: np.ndarray
    gain: int = GAIN_DEFAULT
    v_min: int = V_MIN_DEFAULT


def _as_intensities(frame) -> np.ndarray:
    data = np.asarray(getattr(frame, "data", frame))
    return np.rint(data).astype(np.int32)


def sd_init(frame, gain: int = GAIN_DEFAULT, v_min: int = V_MIN_DEFAULT) -> SigmaDeltaState:
    """Seed the estimator: background is the first frame, variance the floor."""
    if gain < 1:
        raise ValueError(f"gain must be >= 1, got {gain}")
    if v_min < 1:
        raise ValueError(f"v_min must be >= 1, got {v_min}")
    data = _as_intensities(frame)
    return SigmaDeltaState(
        background=data.copy(),
        variance=np.full_like(data, v_min),
        gain=gain,
        v_min=v_min,
    )


def sd_step(state: SigmaDeltaState, frame) -> np.ndarray:
    """Advance one frame and return the {0,1} motion mask (uint8).

    Per pixel: the background steps one unit towards the frame; the
    absolute deviation from the updated background then drives the
    variance one unit towards gain*deviation (only where the deviation is
    non-zero, and never below the floor). A pixel is moving when its
    deviation reaches the variance.
    """
    f = _as_intensities(frame)
    if f.shape != state.background.shape:
        raise ValueError(
            f"frame shape {f.shape} does not match state {state.background.shape}"
        )
    state.background += np.sign(f - state.background)
    deviation = np.abs(f - state.background)
    nonzero = deviation != 0
    adjust = np.sign(state.gain * deviation - state.variance)
    state.variance[nonzero] += adjust[nonzero]
    np.maximum(state.variance, state.v_min, out=state.variance)
    return (deviation >= state.variance).astype(np.uint8)
