"""Independent straight-line reference implementations used by the tests.

Everything here is deliberately written with plain Python loops and
scalar math so it shares no code (and no vectorisation shortcuts) with
the library under test.
"""

from __future__ import annotations

import math
from collections import deque

import numpy as np


def texture_vector_reference(patch) -> list[float]:
    """Scalar 5-d texture of one 3x3 patch."""
    p = [[float(patch[i][j]) for j in range(3)] for i in range(3)]
    c = p[1][1]
    neighbours = [p[0][0], p[0][1], p[0][2], p[1][0], p[1][2], p[2][0], p[2][1], p[2][2]]
    diffs = [c - n for n in neighbours]
    norm = math.sqrt(sum(d * d for d in diffs))
    if norm == 0.0:
        return [0.0, 0.0, 0.0, 0.0, 0.0]
    unit = [d / norm for d in diffs]
    root2 = math.sqrt(2.0)
    approx = [(unit[2 * m] + unit[2 * m + 1]) / root2 for m in range(4)]
    detail = [(unit[2 * m] - unit[2 * m + 1]) / root2 for m in range(4)]
    return approx + [sum(d * d for d in detail)]


def block_textures_reference(data, block_w, block_h, stride_x, stride_y) -> np.ndarray:
    """Triple-loop block means over valid interior patch positions."""
    data = np.asarray(data, dtype=float)
    h, w = data.shape
    rows = (h - block_h) // stride_y + 1
    cols = (w - block_w) // stride_x + 1
    out = np.zeros((rows, cols, 5))
    for r in range(rows):
        for c in range(cols):
            y0, x0 = r * stride_y, c * stride_x
            acc = [0.0] * 5
            count = 0
            for y in range(y0, y0 + block_h):
                for x in range(x0, x0 + block_w):
                    if 1 <= y <= h - 2 and 1 <= x <= w - 2:
                        z = texture_vector_reference(data[y - 1 : y + 2, x - 1 : x + 2])
                        acc = [a + b for a, b in zip(acc, z)]
                        count += 1
            if count:
                out[r, c] = [a / count for a in acc]
    return out


def model_step_reference(m, t, alpha, tau):
    """One per-cell model step: (new_m, likelihood, moving)."""
    likelihood = 0.0
    new_m = []
    for mi, ti in zip(m, t):
        likelihood += abs(mi - ti)
        if ti > mi:
            step = 1.0
        elif ti < mi:
            step = -1.0
        else:
            step = 0.0
        new_m.append(mi + alpha * step)
    return new_m, likelihood, 0 if likelihood < tau else 1


def sigma_delta_reference(frames, gain=4, v_min=2):
    """Per-pixel loop version of the sigma-delta baseline; returns masks."""
    first = frames[0]
    h = len(first)
    w = len(first[0])
    bg = [[int(round(first[y][x])) for x in range(w)] for y in range(h)]
    var = [[v_min] * w for _ in range(h)]
    masks = []
    for frame in frames[1:]:
        mask = [[0] * w for _ in range(h)]
        for y in range(h):
            for x in range(w):
                f = int(round(frame[y][x]))
                if f > bg[y][x]:
                    bg[y][x] += 1
                elif f < bg[y][x]:
                    bg[y][x] -= 1
                d = abs(f - bg[y][x])
                if d != 0:
                    target = gain * d
                    if target > var[y][x]:
                        var[y][x] += 1
                    elif target < var[y][x]:
                        var[y][x] -= 1
                    if var[y][x] < v_min:
                        var[y][x] = v_min
                if d >= var[y][x]:
                    mask[y][x] = 1
        masks.append(np.array(mask, dtype=np.uint8))
    return masks


def flood_fill_components(mask) -> tuple[np.ndarray, int]:
    """BFS flood fill with 8-connectivity; labels dense from 1 in raster order."""
    m = np.asarray(mask) != 0
    h, w = m.shape
    labels = np.zeros((h, w), dtype=np.int32)
    current = 0
    offsets = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))
    for sy in range(h):
        for sx in range(w):
            if not m[sy, sx] or labels[sy, sx]:
                continue
            current += 1
            labels[sy, sx] = current
            queue = deque([(sy, sx)])
            while queue:
                y, x = queue.popleft()
                for dy, dx in offsets:
                    ny, nx = y + dy, x + dx
                    if 0 <= ny < h and 0 <= nx < w and m[ny, nx] and not labels[ny, nx]:
                        labels[ny, nx] = current
                        queue.append((ny, nx))
    return labels, current


def psnr_expectation_mc(n_frames: int, sigma: float, n_pixels: int = 20000,
                        seed: int = 0, quantize: bool = False,
                        base: float = 128.0) -> float:
    """Monte-Carlo expectation of the per-pixel SNR statistic.

    Simulates ``n_pixels`` independent intensity series of length
    ``n_frames`` with i.i.d. Gaussian noise and averages
    20*log10(range/population-std). ``quantize`` models an 8-bit file
    round trip.
    """
    rng = np.random.default_rng(seed)
    series = base + rng.normal(0.0, sigma, size=(n_frames, n_pixels))
    if quantize:
        series = np.rint(np.clip(series, 0, 255))
    std = series.std(axis=0)
    spread = series.max(axis=0) - series.min(axis=0)
    ok = std > 0
    return float(np.mean(20.0 * np.log10(spread[ok] / std[ok])))
