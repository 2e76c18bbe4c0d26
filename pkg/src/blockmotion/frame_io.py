"""Grayscale frame and mask I/O.

Supported containers are binary PGM (P5) and PPM (P6) stills plus Y4M
streams, from which only the luma plane is read. Intensities are carried
as float64 in [0, 255]; colour input is reduced to luma with the BT.601
weights and left unrounded. Quantisation back to 8 bits happens only when
writing.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

BT601_WEIGHTS = (0.299, 0.587, 0.114)


class FormatError(ValueError):
    """Raised when a file cannot be parsed as a supported image/stream."""


@dataclass
class Frame:
    """One grayscale frame: ``data`` is (height, width) float64 in [0, 255]."""

    data: np.ndarray
    index: int = 0

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.float64)
        if self.data.ndim != 2:
            raise ValueError(f"frame data must be 2-D, got shape {self.data.shape}")

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


def rgb_to_gray(rgb: np.ndarray) -> np.ndarray:
    """BT.601 luma of an (..., 3) RGB array, unrounded float64."""
    rgb = np.asarray(rgb, dtype=np.float64)
    if rgb.shape[-1] != 3:
        raise ValueError(f"expected trailing RGB axis of size 3, got {rgb.shape}")
    wr, wg, wb = BT601_WEIGHTS
    return wr * rgb[..., 0] + wg * rgb[..., 1] + wb * rgb[..., 2]


def _next_token(f) -> bytes:
    """Next whitespace-delimited header token, skipping '#' comments."""
    tok = b""
    while True:
        ch = f.read(1)
        if not ch:
            raise FormatError("truncated header")
        if ch == b"#":
            f.readline()
            ch = b" "
        if ch.isspace():
            if tok:
                return tok
            continue
        tok += ch


def read_image(path) -> np.ndarray:
    """Read a binary PGM (P5) or PPM (P6) file as grayscale float64.

    PPM input is converted to luma. maxval must be at most 255.
    """
    with open(path, "rb") as f:
        magic = _next_token(f)
        if magic not in (b"P5", b"P6"):
            raise FormatError(f"{path}: unsupported magic {magic!r} (want P5 or P6)")
        try:
            width = int(_next_token(f))
            height = int(_next_token(f))
            maxval = int(_next_token(f))
        except ValueError as exc:
            raise FormatError(f"{path}: malformed header") from exc
        if width <= 0 or height <= 0:
            raise FormatError(f"{path}: bad dimensions {width}x{height}")
        if not 0 < maxval <= 255:
            raise FormatError(f"{path}: maxval {maxval} unsupported (want 1..255)")
        channels = 1 if magic == b"P5" else 3
        n = width * height * channels
        raster = f.read(n)
        if len(raster) != n:
            raise FormatError(f"{path}: raster truncated ({len(raster)} of {n} bytes)")
    data = np.frombuffer(raster, dtype=np.uint8)
    if channels == 1:
        return data.reshape(height, width).astype(np.float64)
    return rgb_to_gray(data.reshape(height, width, 3))


def write_pgm(data: np.ndarray, path) -> None:
    """Write a 2-D intensity array as binary PGM, clipping/rounding to uint8."""
    data = np.asarray(data)
    if data.ndim != 2:
        raise ValueError(f"expected 2-D array, got shape {data.shape}")
    quantised = np.rint(np.clip(data, 0, 255)).astype(np.uint8)
    height, width = quantised.shape
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (width, height))
        f.write(quantised.tobytes())


def load_mask(path) -> np.ndarray:
    """Load a binary mask: intensity >= 128 maps to 1, else 0 (uint8)."""
    return (read_image(path) >= 128).astype(np.uint8)


def write_mask(mask: np.ndarray, path) -> None:
    """Write a {0,1} mask as PGM with moving=255 and stationary=0."""
    mask = np.asarray(mask)
    if not np.isin(mask, (0, 1)).all():
        raise ValueError("mask values must be 0 or 1")
    write_pgm(mask.astype(np.uint8) * 255, path)


# Y4M frame sizes by colourspace tag: bytes per frame relative to w*h.
_Y4M_PLANES = {
    "C420": lambda w, h: w * h + 2 * ((w // 2) * (h // 2)),
    "C420jpeg": lambda w, h: w * h + 2 * ((w // 2) * (h // 2)),
    "C420mpeg2": lambda w, h: w * h + 2 * ((w // 2) * (h // 2)),
    "C420paldv": lambda w, h: w * h + 2 * ((w // 2) * (h // 2)),
    "C422": lambda w, h: w * h + 2 * ((w // 2) * h),
    "C444": lambda w, h: 3 * w * h,
    "Cmono": lambda w, h: w * h,
}


def read_y4m(path, start: int = 0, count: int | None = None) -> list[np.ndarray]:
    """Read luma planes from a Y4M stream as a list of float64 arrays.

    Chroma planes are skipped. ``start``/``count`` select a frame range;
    ``count=None`` reads to end of stream.
    """
    frames: list[np.ndarray] = []
    with open(path, "rb") as f:
        header = f.readline()
        if not header.startswith(b"YUV4MPEG2"):
            raise FormatError(f"{path}: not a Y4M stream")
        width = height = None
        colourspace = "C420"
        for tag in header.decode("ascii", "replace").split()[1:]:
            if tag.startswith("W"):
                width = int(tag[1:])
            elif tag.startswith("H"):
                height = int(tag[1:])
            elif tag.startswith("C"):
                colourspace = tag
        if not width or not height:
            raise FormatError(f"{path}: Y4M header missing W/H")
        if colourspace not in _Y4M_PLANES:
            raise FormatError(f"{path}: unsupported Y4M colourspace {colourspace}")
        frame_bytes = _Y4M_PLANES[colourspace](width, height)
        luma_bytes = width * height

        idx = 0
        while count is None or len(frames) < count:
            marker = f.readline()
            if not marker:
                break
            if not marker.startswith(b"FRAME"):
                raise FormatError(f"{path}: bad frame marker at frame {idx}")
            payload = f.read(frame_bytes)
            if len(payload) != frame_bytes:
                raise FormatError(f"{path}: truncated frame {idx}")
            if idx >= start:
                luma = np.frombuffer(payload[:luma_bytes], dtype=np.uint8)
                frames.append(luma.reshape(height, width).astype(np.float64))
            idx += 1
    if count is not None and len(frames) < count:
        raise FormatError(
            f"{path}: stream has {len(frames)} frames at/after {start}, wanted {count}"
        )
    return frames


def load_sequence(pattern: str, start: int = 0, count: int | None = None) -> list[Frame]:
    """Load an ordered frame sequence.

    ``pattern`` is either a printf-style per-frame file pattern
    (e.g. ``frames/f%06d.pgm``) or a single ``.y4m`` stream. Frames are
    returned in ascending index order; all frames must share dimensions.
    """
    if pattern.endswith(".y4m"):
        planes = read_y4m(pattern, start=start, count=count)
        return [Frame(p, index=start + k) for k, p in enumerate(planes)]

    if "%" not in pattern:
        raise ValueError(
            f"pattern {pattern!r} has no % placeholder and is not a .y4m stream"
        )
    if count is None:
        raise ValueError("count is required for printf-style frame patterns")
    frames: list[Frame] = []
    shape = None
    for i in range(start, start + count):
        path = pattern % i
        if not os.path.exists(path):
            raise FileNotFoundError(f"frame {i}: {path} does not exist")
        data = read_image(path)
        if shape is None:
            shape = data.shape
        elif data.shape != shape:
            raise ValueError(
                f"frame {i} ({path}): size {data.shape[1]}x{data.shape[0]} does not "
                f"match first frame {shape[1]}x{shape[0]}"
            )
        frames.append(Frame(data, index=i))
    return frames
