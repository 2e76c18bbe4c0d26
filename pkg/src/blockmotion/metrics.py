"""Pixel-level scoring, signal-to-noise estimation and the sampling sweep.

The moving class is the positive class throughout. Precision and recall
fall back to 1.0 when their denominator is zero with no true positives,
so frames that are correctly all-stationary do not poison averages; the
per-frame CSV flags those rows.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .frame_io import Frame


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def confusion(mask: np.ndarray, truth: np.ndarray) -> ConfusionCounts:
    """2x2 counts between a predicted mask and ground truth (both {0,1})."""
    mask = np.asarray(mask)
    truth = np.asarray(truth)
    if mask.shape != truth.shape:
        raise ValueError(f"mask shape {mask.shape} != truth shape {truth.shape}")
    pred = mask != 0
    pos = truth != 0
    return ConfusionCounts(
        tp=int((pred & pos).sum()),
        fp=int((pred & ~pos).sum()),
        tn=int((~pred & ~pos).sum()),
        fn=int((~pred & pos).sum()),
    )


def precision_recall(c: ConfusionCounts) -> tuple[float, float]:
    """(precision, recall); each is 1.0 when its denominator is zero."""
    precision = c.tp / (c.tp + c.fp) if (c.tp + c.fp) > 0 else 1.0
    recall = c.tp / (c.tp + c.fn) if (c.tp + c.fn) > 0 else 1.0
    return precision, recall


def accuracy(c: ConfusionCounts) -> float:
    """Fraction of correctly classified pixels."""
    return (c.tp + c.tn) / c.total


def pixel_snr(samples: np.ndarray) -> float | None:
    """SNR in dB of one pixel's intensity series, or None when excluded.

    Computed as 20*log10((max-min)/sigma) with the population standard
    deviation; a constant series (sigma == 0) is excluded. Needs at least
    two samples.
    """
    s = np.asarray(samples, dtype=np.float64)
    if s.size < 2:
        raise ValueError(f"need at least 2 samples, got {s.size}")
    sigma = s.std()
    if sigma == 0:
        return None
    return 20.0 * math.log10((s.max() - s.min()) / sigma)


@dataclass
class PsnrReport:
    """Per-pixel SNR map (NaN where excluded) and its mean."""

    per_pixel_snr: np.ndarray
    psnr: float

    @property
    def included(self) -> int:
        return int(np.isfinite(self.per_pixel_snr).sum())

    @property
    def excluded(self) -> int:
        return int(self.per_pixel_snr.size - self.included)


def video_psnr(frames: Sequence) -> PsnrReport:
    """Mean per-pixel SNR over a range of background-only frames.

    Pixels whose series is constant are excluded from the mean; if every
    pixel is excluded the video carries no measurable noise and this is an
    error.
    """
    stack = np.stack([np.asarray(getattr(f, "data", f), dtype=np.float64) for f in frames])
    if stack.shape[0] < 2:
        raise ValueError(f"need at least 2 frames, got {stack.shape[0]}")
    sigma = stack.std(axis=0)
    spread = stack.max(axis=0) - stack.min(axis=0)
    snr = np.full(sigma.shape, np.nan)
    ok = sigma > 0
    snr[ok] = 20.0 * np.log10(spread[ok] / sigma[ok])
    if not ok.any():
        raise ValueError("all pixels are constant; PSNR is undefined")
    return PsnrReport(per_pixel_snr=snr, psnr=float(np.nanmean(snr)))


@dataclass
class SweepRow:
    """One sampling-sweep result; sequence 'ALL' rows carry the aggregate."""

    stride: int
    sequence: str
    n_scored: int
    accuracy: float | None
    accuracy_std: float | None = None


def sampling_sweep(
    sequences: Sequence[tuple[str, Sequence[Frame], Mapping[int, np.ndarray]]],
    make_detector: Callable[[], object],
    strides: Iterable[int],
    score_from: int = 0,
) -> list[SweepRow]:
    """Accuracy of a fresh detector run at each temporal stride.

    For every stride s each sequence is re-processed from scratch on frames
    (0, s, 2s, ...); masks are scored only for frames that have ground
    truth and index >= score_from. Per-sequence rows report the mean
    per-frame accuracy; an 'ALL' row per stride carries the mean and
    population standard deviation across sequences.
    """
    rows: list[SweepRow] = []
    for stride in strides:
        if stride < 1:
            raise ValueError(f"stride must be >= 1, got {stride}")
        per_sequence: list[float] = []
        total_scored = 0
        for name, frames, truths in sequences:
            detector = make_detector()
            scores: list[float] = []
            for frame in frames[::stride]:
                mask = detector.process(frame)
                if mask is None or frame.index < score_from:
                    continue
                if frame.index not in truths:
                    continue
                scores.append(accuracy(confusion(mask, truths[frame.index])))
            total_scored += len(scores)
            mean = float(np.mean(scores)) if scores else None
            rows.append(SweepRow(stride, name, len(scores), mean))
            if mean is not None:
                per_sequence.append(mean)
        if per_sequence:
            rows.append(
                SweepRow(
                    stride,
                    "ALL",
                    total_scored,
                    float(np.mean(per_sequence)),
                    float(np.std(per_sequence)),
                )
            )
        else:
            rows.append(SweepRow(stride, "ALL", 0, None, None))
    return rows


def write_confusion_csv(path, rows: Sequence[tuple[int, ConfusionCounts]]) -> None:
    """Per-frame confusion rows: frame,tp,fp,tn,fn,precision,recall,accuracy,degenerate."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(
            ["frame", "tp", "fp", "tn", "fn", "precision", "recall", "accuracy", "degenerate"]
        )
        for index, c in rows:
            p, r = precision_recall(c)
            degenerate = int((c.tp + c.fp) == 0 or (c.tp + c.fn) == 0)
            writer.writerow(
                [index, c.tp, c.fp, c.tn, c.fn, "%.6f" % p, "%.6f" % r,
                 "%.6f" % accuracy(c), degenerate]
            )


def write_sweep_csv(path, rows: Sequence[SweepRow]) -> None:
    """Sweep table: stride,sequence,n_scored,accuracy,accuracy_std."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["stride", "sequence", "n_scored", "accuracy", "accuracy_std"])
        for row in rows:
            writer.writerow(
                [
                    row.stride,
                    row.sequence,
                    row.n_scored,
                    "" if row.accuracy is None else "%.6f" % row.accuracy,
                    "" if row.accuracy_std is None else "%.6f" % row.accuracy_std,
                ]
            )


def write_psnr_csv(path, report: PsnrReport, n_frames: int) -> None:
    """One-line PSNR summary: psnr_db,n_frames,pixels_included,pixels_excluded."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["psnr_db", "n_frames", "pixels_included", "pixels_excluded"])
        writer.writerow(["%.4f" % report.psnr, n_frames, report.included, report.excluded])
