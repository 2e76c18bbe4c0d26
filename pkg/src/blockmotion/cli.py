"""Command-line interface: detect, synth, evaluate, psnr, density.

Every command is deterministic given its configuration (and seed, for
synth). Options may also be supplied through ``--config FILE`` holding
``key=value`` lines; explicit flags win over file values.

Exit codes: 0 ok, 2 configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from pathlib import Path

import numpy as np

from . import synth
from .background import DetectorParams, load_model, save_model
from .density import (
    Roi,
    annotate_coverage,
    classify,
    label_components,
    lane_coverage,
    write_density_csv,
)
from .frame_io import FormatError, load_mask, load_sequence, write_mask, write_pgm
from .metrics import confusion, precision_recall, accuracy, video_psnr, write_confusion_csv, write_psnr_csv
from .pipeline import BlockTextureDetector, make_detector
from .texture import BlockGridSpec

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3


def _parse_pair(text: str, sep: str, what: str) -> tuple[int, int]:
    parts = text.split(sep)
    if len(parts) != 2:
        raise ValueError(f"{what} must look like A{sep}B, got {text!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise ValueError(f"{what} must be two integers, got {text!r}") from exc


def _load_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path) as f:
        for raw in f:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"{path}: malformed config line {raw!r}")
            values[key.strip()] = value.strip()
    return values


# dest names for config-file keys; flags use the same spelling with '--'.
_CONFIG_KEYS = {
    "frames": "frames", "gt": "gt", "masks": "masks", "out": "out",
    "start": "start", "count": "count", "frame-stride": "frame_stride",
    "detector": "detector", "block-size": "block_size", "stride": "stride",
    "alpha": "alpha", "lambda": "tradeoff", "combine": "combine",
    "gain": "gain", "v-min": "v_min", "seed": "seed", "scene": "scene",
    "width": "width", "height": "height", "sigma": "sigma",
    "speed": "speed", "rect-size": "rect_size", "rect-start": "rect_start",
    "roi": "roi", "axis": "axis", "bins": "bins", "min-area": "min_area",
    "indices": "indices", "snapshot-every": "snapshot_every",
    "trace-block": "trace_block", "resume": "resume",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blockmotion",
        description="Moving-object detection via block-texture background modelling.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="key=value config file; flags override it")
        p.add_argument("--out", help="output directory for this run")

    p = sub.add_parser("detect", help="run a detector over a frame sequence")
    add_common(p)
    p.add_argument("--frames", help="printf-style frame pattern or .y4m stream")
    p.add_argument("--start", type=int, default=0, help="first frame index")
    p.add_argument("--count", type=int, help="number of frames to load")
    p.add_argument("--frame-stride", type=int, default=1, dest="frame_stride",
                   help="process every Nth loaded frame")
    p.add_argument("--detector", choices=["block-texture", "sigma-delta"],
                   default="block-texture")
    p.add_argument("--block-size", default="8x8", dest="block_size",
                   help="block WxH for the block-texture detector")
    p.add_argument("--stride", type=int, help="block stride in pixels "
                   "(default: half the block for 8x8, else the block size)")
    p.add_argument("--alpha", type=float, default=0.05, help="model learning rate")
    p.add_argument("--lambda", type=float, default=0.98, dest="tradeoff",
                   help="detection tradeoff in [0,1]")
    p.add_argument("--combine", choices=["any", "majority"], default="any",
                   help="overlap combination rule when rasterising")
    p.add_argument("--gain", type=int, default=4, help="sigma-delta variance gain")
    p.add_argument("--v-min", type=int, default=2, dest="v_min",
                   help="sigma-delta variance floor")
    p.add_argument("--snapshot-every", type=int, default=0, dest="snapshot_every",
                   help="also snapshot the model every N processed frames")
    p.add_argument("--trace-block", dest="trace_block",
                   help="ROW,COL block whose likelihood/model trace is recorded")
    p.add_argument("--resume", help="model snapshot CSV to resume from")

    p = sub.add_parser("synth", help="generate a synthetic sequence with ground truth")
    add_common(p)
    p.add_argument("--scene", default="moving-rect",
                   choices=["static", "moving-rect", "illumination-ramp",
                            "illumination-step", "oscillating"])
    p.add_argument("--width", type=int, default=320)
    p.add_argument("--height", type=int, default=240)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--sigma", type=float, default=2.0, help="Gaussian noise level")
    p.add_argument("--seed", type=int, required=True, help="RNG seed (required)")
    p.add_argument("--speed", default="2,0", help="rect dx,dy per frame")
    p.add_argument("--rect-size", default="24x24", dest="rect_size")
    p.add_argument("--rect-start", default="40,100", dest="rect_start")

    p = sub.add_parser("evaluate", help="score predicted masks against ground truth")
    add_common(p)
    p.add_argument("--masks", help="printf-style predicted mask pattern")
    p.add_argument("--gt", help="printf-style ground-truth pattern")
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--count", type=int)
    p.add_argument("--indices", help="explicit comma-separated frame indices")

    p = sub.add_parser("psnr", help="estimate noise over a background-only range")
    add_common(p)
    p.add_argument("--frames", help="printf-style frame pattern or .y4m stream")
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--count", type=int)

    p = sub.add_parser("density", help="lane coverage and density state per frame")
    add_common(p)
    p.add_argument("--masks", help="printf-style mask pattern")
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--count", type=int)
    p.add_argument("--roi", help="ROI mask file or x,y,w,h rectangle")
    p.add_argument("--axis", choices=["x", "y"], default="y",
                   help="image axis along which the lane runs")
    p.add_argument("--bins", type=int, help="number of lane-axis bins "
                   "(default: one per pixel of the ROI extent)")
    p.add_argument("--min-area", type=int, dest="min_area",
                   help="drop components smaller than this (default: one block)")
    p.add_argument("--annotate", action="store_true",
                   help="also write masks with a coverage bar")

    return parser


def _parse_args(parser: argparse.ArgumentParser, argv) -> argparse.Namespace:
    # Two-pass parse so --config supplies defaults that flags still override.
    probe, _ = parser.parse_known_args(argv)
    config_path = getattr(probe, "config", None)
    if config_path:
        file_values = _load_config_file(config_path)
        unknown = set(file_values) - set(_CONFIG_KEYS)
        if unknown:
            raise ValueError(f"{config_path}: unknown config keys {sorted(unknown)}")
        parser.set_defaults(**{_CONFIG_KEYS[k]: v for k, v in file_values.items()})
    args = parser.parse_args(argv)
    # Values injected via set_defaults arrive as strings; coerce the numerics.
    for name, cast in (("start", int), ("count", int), ("frame_stride", int),
                       ("alpha", float), ("tradeoff", float), ("stride", int),
                       ("gain", int), ("v_min", int), ("seed", int),
                       ("width", int), ("height", int), ("sigma", float),
                       ("bins", int), ("min_area", int), ("snapshot_every", int)):
        value = getattr(args, name, None)
        if isinstance(value, str):
            setattr(args, name, cast(value))
    return args


def _require(args, *names) -> None:
    for name in names:
        if getattr(args, name, None) is None:
            raise ValueError(f"--{name.replace('_', '-')} is required")


def _run_dirs(out: str) -> tuple[Path, Path, Path]:
    root = Path(out)
    masks = root / "masks"
    reports = root / "reports"
    for d in (root, masks, reports):
        d.mkdir(parents=True, exist_ok=True)
    return root, masks, reports


def _echo_config(args: argparse.Namespace, root: Path) -> None:
    skip = {"config"}
    with open(root / "config.txt", "w") as f:
        for key in sorted(vars(args)):
            if key not in skip:
                f.write(f"{key}={getattr(args, key)}\n")


def _block_spec(args) -> BlockGridSpec:
    bw, bh = _parse_pair(args.block_size, "x", "--block-size")
    stride = args.stride
    if stride is None:
        stride_x, stride_y = max(bw // 2, 1), max(bh // 2, 1)
    else:
        stride_x = stride_y = stride
    return BlockGridSpec(bw, bh, stride_x, stride_y)


def cmd_detect(args) -> int:
    _require(args, "frames", "out")
    params = DetectorParams(alpha=args.alpha, tradeoff=args.tradeoff)
    spec = _block_spec(args)
    if args.frame_stride < 1:
        raise ValueError(f"--frame-stride must be >= 1, got {args.frame_stride}")

    if args.detector == "block-texture":
        if args.resume:
            detector = BlockTextureDetector.from_model(
                load_model(args.resume), params=params, combine=args.combine
            )
        else:
            detector = BlockTextureDetector(spec=spec, params=params, combine=args.combine)
    else:
        detector = make_detector("sigma-delta", gain=args.gain, v_min=args.v_min)

    trace_cell = None
    if args.trace_block:
        trace_cell = _parse_pair(args.trace_block, ",", "--trace-block")

    frames = load_sequence(args.frames, start=args.start, count=args.count)
    root, masks_dir, reports_dir = _run_dirs(args.out)
    _echo_config(args, root)

    trace_rows = []
    processed = 0
    compute_s = 0.0
    wall0 = time.perf_counter()
    for frame in frames[:: args.frame_stride]:
        t0 = time.perf_counter()
        mask = detector.process(frame)
        compute_s += time.perf_counter() - t0
        processed += 1
        if mask is not None:
            write_mask(mask, masks_dir / ("mask_%06d.pgm" % frame.index))
        if trace_cell is not None and getattr(detector, "last_map", None) is not None:
            r, c = trace_cell
            mm = detector.last_map
            trace_rows.append(
                [frame.index, "%.9g" % mm.likelihood[r, c], int(mm.moving[r, c])]
                + ["%.9g" % v for v in detector.model.values[r, c]]
            )
        if (
            args.snapshot_every
            and isinstance(detector, BlockTextureDetector)
            and detector.model is not None
            and processed % args.snapshot_every == 0
        ):
            save_model(detector.model, reports_dir / ("model_%06d.csv" % frame.index))
    wall_s = time.perf_counter() - wall0

    if isinstance(detector, BlockTextureDetector) and detector.model is not None:
        save_model(detector.model, reports_dir / "model.csv")
    if trace_rows:
        with open(reports_dir / "trace_block.csv", "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["frame", "likelihood", "moving", "c0", "c1", "c2", "c3", "c4"])
            writer.writerows(trace_rows)

    fps = processed / wall_s if wall_s > 0 else float("inf")
    compute_fps = processed / compute_s if compute_s > 0 else float("inf")
    summary = (
        f"processed {processed} frames in {wall_s:.3f}s "
        f"({fps:.1f} fps wall, {compute_fps:.1f} fps compute)"
    )
    if isinstance(detector, BlockTextureDetector):
        summary += (
            f"; max |texture component| {detector.stats.get('max_abs_component', 0.0):.4f}"
            f", peak likelihood {detector.stats.get('peak_likelihood', 0.0):.4f}"
        )
    print(summary)
    with open(reports_dir / "throughput.txt", "w") as f:
        f.write(summary + "\n")
    return EXIT_OK


def cmd_synth(args) -> int:
    _require(args, "out")
    dx, dy = _parse_pair(args.speed, ",", "--speed")
    rw, rh = _parse_pair(args.rect_size, "x", "--rect-size")
    rx, ry = _parse_pair(args.rect_start, ",", "--rect-start")
    kwargs = dict(count=args.count, width=args.width, height=args.height,
                  sigma=args.sigma, seed=args.seed)
    if args.scene == "static":
        result = synth.static_scene(**kwargs)
    elif args.scene == "moving-rect":
        result = synth.moving_rect(rect_w=rw, rect_h=rh, speed_x=dx, speed_y=dy,
                                   start_x=rx, start_y=ry, **kwargs)
    elif args.scene == "illumination-ramp":
        result = synth.illumination_scene(mode="ramp", **kwargs)
    elif args.scene == "illumination-step":
        result = synth.illumination_scene(mode="step", **kwargs)
    else:
        result = synth.oscillating_scene(**kwargs)

    root = Path(args.out)
    frames_dir = root / "frames"
    truth_dir = root / "truth"
    for d in (root, frames_dir, truth_dir):
        d.mkdir(parents=True, exist_ok=True)
    _echo_config(args, root)
    for frame, truth in zip(result.frames, result.truths):
        write_pgm(frame.data, frames_dir / ("f_%06d.pgm" % frame.index))
        write_mask(truth, truth_dir / ("gt_%06d.pgm" % frame.index))
    print(f"wrote {len(result.frames)} frames to {frames_dir} (truth in {truth_dir})")
    return EXIT_OK


def _frame_indices(args) -> list[int]:
    if args.indices:
        return [int(tok) for tok in args.indices.split(",") if tok.strip()]
    if args.count is None:
        raise ValueError("--count (or --indices) is required")
    return list(range(args.start, args.start + args.count))


def cmd_evaluate(args) -> int:
    _require(args, "masks", "gt", "out")
    indices = _frame_indices(args)
    rows = []
    for i in indices:
        gt_path = args.gt % i
        if not Path(gt_path).exists():
            raise FileNotFoundError(f"ground truth for frame {i} missing: {gt_path}")
        mask = load_mask(args.masks % i)
        truth = load_mask(gt_path)
        rows.append((i, confusion(mask, truth)))
    root, _, reports_dir = _run_dirs(args.out)
    _echo_config(args, root)
    write_confusion_csv(reports_dir / "confusion.csv", rows)
    pr = [precision_recall(c) for _, c in rows]
    acc = [accuracy(c) for _, c in rows]
    print(
        "frames=%d precision=%.4f recall=%.4f accuracy=%.4f"
        % (
            len(rows),
            float(np.mean([p for p, _ in pr])),
            float(np.mean([r for _, r in pr])),
            float(np.mean(acc)),
        )
    )
    return EXIT_OK


def cmd_psnr(args) -> int:
    _require(args, "frames", "out")
    if args.count is None and not args.frames.endswith(".y4m"):
        raise ValueError("--count is required for frame patterns")
    frames = load_sequence(args.frames, start=args.start, count=args.count)
    report = video_psnr([f.data for f in frames])
    root, _, reports_dir = _run_dirs(args.out)
    _echo_config(args, root)
    write_psnr_csv(reports_dir / "psnr.csv", report, n_frames=len(frames))
    print(
        "psnr=%.4f dB over %d frames (%d pixels, %d excluded)"
        % (report.psnr, len(frames), report.included, report.excluded)
    )
    return EXIT_OK


def cmd_density(args) -> int:
    _require(args, "masks", "roi", "out")
    indices = list(range(args.start, args.start + (args.count or 0)))
    if not indices:
        raise ValueError("--count must be >= 1")
    min_area = args.min_area
    if min_area is None:
        bw, bh = _parse_pair(getattr(args, "block_size", "8x8"), "x", "--block-size")
        min_area = bw * bh  # one default detector block

    roi = None
    rows = []
    root, _, reports_dir = _run_dirs(args.out)
    annotated_dir = root / "annotated"
    if args.annotate:
        annotated_dir.mkdir(exist_ok=True)
    for i in indices:
        mask = load_mask(args.masks % i)
        if roi is None:
            if "," in args.roi:
                parts = [int(t) for t in args.roi.split(",")]
                if len(parts) != 4:
                    raise ValueError(f"--roi rectangle must be x,y,w,h, got {args.roi!r}")
                roi = Roi.from_rect(*parts, frame_shape=mask.shape,
                                    axis=args.axis, bins=args.bins)
            else:
                roi = Roi.from_mask(load_mask(args.roi), axis=args.axis, bins=args.bins)
        labels, _ = label_components(mask)
        coverage = lane_coverage(labels, roi, min_area=min_area)
        state = classify(coverage)
        rows.append((i, coverage, state))
        if args.annotate:
            write_pgm(annotate_coverage(mask, coverage),
                      annotated_dir / ("a_%06d.pgm" % i))
    _echo_config(args, root)
    write_density_csv(
        reports_dir / "density.csv",
        rows,
        metadata={
            "axis": roi.axis,
            "bins": roi.bins,
            "min_area": min_area,
            "connectivity": 8,
            "projection": "occupied-axis-bins",
            "filter_order": "components-before-projection",
        },
    )
    for i, coverage, state in rows[-1:]:
        print(f"frame {i}: coverage={coverage:.3f} state={state.value}")
    return EXIT_OK


_COMMANDS = {
    "detect": cmd_detect,
    "synth": cmd_synth,
    "evaluate": cmd_evaluate,
    "psnr": cmd_psnr,
    "density": cmd_density,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _parse_args(parser, argv)
    except SystemExit as exc:  # argparse reports its own errors
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return _COMMANDS[args.command](args)
    except (FileNotFoundError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
