"""Traffic density from foreground masks: connected components, lane
coverage, and the four-state classification.

Coverage is the fraction of occupied bins after projecting foreground
pixels inside the region of interest onto the lane axis; small components
are discarded before projection so isolated noise blocks do not register
as vehicles.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

import numpy as np


class DensityState(Enum):
    EMPTY = "Empty"
    LOW = "Low"
    HIGH = "High"
    FULL = "Full"


# Lane-coverage fractions at which the state steps up; each boundary
# belongs to the upper state.
LOW_AT = 0.05
HIGH_AT = 0.30
FULL_AT = 0.90


def classify(coverage: float) -> DensityState:
    """Map a lane-coverage fraction in [0, 1] to a density state."""
    if not 0.0 <= coverage <= 1.0:
        raise ValueError(f"coverage must be in [0, 1], got {coverage}")
    if coverage < LOW_AT:
        return DensityState.EMPTY
    if coverage < HIGH_AT:
        return DensityState.LOW
    if coverage < FULL_AT:
        return DensityState.HIGH
    return DensityState.FULL


def label_components(mask: np.ndarray) -> tuple[np.ndarray, int]:
    """Two-pass 8-connected component labelling with union-find.

    The first pass assigns provisional labels to horizontal runs and
    records equivalences between vertically/diagonally touching runs; the
    second pass resolves the equivalence classes and renumbers them densely
    from 1 in order of first appearance. Returns (labels, count) with
    labels int32 and background 0.
    """
    m = np.asarray(mask) != 0
    if m.ndim != 2:
        raise ValueError(f"mask must be 2-D, got shape {m.shape}")
    h, w = m.shape
    labels = np.zeros((h, w), dtype=np.int32)

    parent = [0]  # parent[i] of provisional label i; 0 unused

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i: int, j: int) -> int:
        ri, rj = find(i), find(j)
        if ri < rj:
            parent[rj] = ri
            return ri
        parent[ri] = rj
        return rj

    all_runs: list[tuple[int, int, int, int]] = []  # (row, start, end, provisional)
    prev_runs: list[tuple[int, int, int]] = []  # (start, end, provisional)
    edge = np.zeros(w + 2, dtype=np.int8)
    for y in range(h):
        edge[1:-1] = m[y]
        steps = np.diff(edge)
        starts = np.flatnonzero(steps == 1)
        ends = np.flatnonzero(steps == -1)
        cur_runs: list[tuple[int, int, int]] = []
        k = 0  # cursor into prev_runs; runs are sorted by start
        for s, e in zip(starts, ends):
            label = 0
            # 8-connectivity: a run one row up touches if its columns reach
            # [s-1, e] inclusive, i.e. prev_end > s-1 and prev_start < e+1.
            while k < len(prev_runs) and prev_runs[k][1] < s:
                k += 1
            j = k
            while j < len(prev_runs) and prev_runs[j][0] <= e:
                up = prev_runs[j][2]
                label = up if label == 0 else union(label, up)
                j += 1
            if label == 0:
                label = len(parent)
                parent.append(label)
            labels[y, s:e] = label
            cur_runs.append((int(s), int(e), label))
            all_runs.append((y, int(s), int(e), label))
        prev_runs = cur_runs

    dense: dict[int, int] = {}
    for y, s, e, label in all_runs:
        root = find(label)
        final = dense.setdefault(root, len(dense) + 1)
        labels[y, s:e] = final
    return labels, len(dense)


@dataclass
class Roi:
    """Region of interest (one lane) with the lane axis and its bin count."""

    mask: np.ndarray
    axis: str  # "x" or "y": image axis along which the lane runs
    bins: int
    axis_lo: int
    axis_extent: int

    @classmethod
    def from_mask(cls, mask: np.ndarray, axis: str = "y", bins: int | None = None) -> "Roi":
        m = np.asarray(mask) != 0
        if m.ndim != 2:
            raise ValueError(f"ROI mask must be 2-D, got shape {m.shape}")
        if axis not in ("x", "y"):
            raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
        ys, xs = np.nonzero(m)
        if ys.size == 0:
            raise ValueError("ROI is empty")
        coords = xs if axis == "x" else ys
        lo = int(coords.min())
        extent = int(coords.max()) - lo + 1
        if bins is None:
            bins = extent  # one bin per pixel row/column of the bounding box
        if not 1 <= bins <= extent:
            raise ValueError(f"bins must be in [1, {extent}], got {bins}")
        return cls(mask=m, axis=axis, bins=bins, axis_lo=lo, axis_extent=extent)

    @classmethod
    def from_rect(cls, x: int, y: int, w: int, h: int, frame_shape: tuple[int, int],
                  axis: str = "y", bins: int | None = None) -> "Roi":
        fh, fw = frame_shape
        if w < 1 or h < 1 or x < 0 or y < 0 or x + w > fw or y + h > fh:
            raise ValueError(f"rect {x},{y},{w},{h} does not fit in {fw}x{fh}")
        mask = np.zeros((fh, fw), dtype=bool)
        mask[y : y + h, x : x + w] = True
        return cls.from_mask(mask, axis=axis, bins=bins)


def lane_coverage(labels: np.ndarray, roi: Roi, min_area: int = 1) -> float:
    """Occupied fraction of the ROI's axis bins.

    Components smaller than ``min_area`` pixels are discarded first; the
    surviving foreground pixels inside the ROI are projected onto the lane
    axis and coverage is the fraction of bins hit by at least one pixel.
    """
    labels = np.asarray(labels)
    if labels.shape != roi.mask.shape:
        raise ValueError(f"labels shape {labels.shape} != ROI shape {roi.mask.shape}")
    sizes = np.bincount(labels.ravel())
    keep = sizes >= min_area
    keep[0] = False
    fg = keep[labels] & roi.mask
    ys, xs = np.nonzero(fg)
    if ys.size == 0:
        return 0.0
    coords = xs if roi.axis == "x" else ys
    binned = (coords - roi.axis_lo) * roi.bins // roi.axis_extent
    occupied = np.unique(np.clip(binned, 0, roi.bins - 1)).size
    return occupied / roi.bins


def annotate_coverage(mask: np.ndarray, coverage: float, bar_width: int = 6) -> np.ndarray:
    """Mask rendered to 0/255 with a vertical coverage bar on the left edge."""
    img = (np.asarray(mask) != 0).astype(np.uint8) * 255
    h = img.shape[0]
    bar = min(bar_width, img.shape[1])
    img[:, :bar] = 64
    fill = int(round(coverage * h))
    if fill > 0:
        img[h - fill :, :bar] = 255
    return img


def write_density_csv(path, rows: Sequence[tuple[int, float, DensityState]],
                      metadata: Mapping[str, object] | None = None) -> None:
    """Time series: frame,coverage,state (with run choices echoed as comments)."""
    with open(path, "w", newline="") as f:
        for key, value in (metadata or {}).items():
            f.write(f"# {key}={value}\n")
        writer = csv.writer(f)
        writer.writerow(["frame", "coverage", "state"])
        for index, coverage, state in rows:
            writer.writerow([index, "%.6f" % coverage, state.value])
