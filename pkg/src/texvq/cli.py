"""Command-line front end: features, score, eval, importance, bench."""

from __future__ import annotations

import argparse
import os
import sys

from . import evaluate, pipeline, texture, video_io
from .model import ModelFormatError, load_model


def _add_raw_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--width", type=int, help="frame width for raw YUV input")
    parser.add_argument("--height", type=int, help="frame height for raw YUV input")
    parser.add_argument(
        "--pixfmt",
        default=video_io.YUV420_8BIT,
        help="pixel format for raw YUV input (only yuv420p is supported)",
    )


def _add_threads_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--threads",
        type=int,
        default=os.cpu_count() or 1,
        help="worker thread budget (default: available cores)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="texvq",
        description=(
            "Reduced-reference video quality estimation from DCT texture "
            "energy and SSIM fused by an LSTM"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("features", help="write the per-frame feature CSV (frame,E,h,L)")
    p.add_argument("input", help="Y4M file or raw YUV file")
    p.add_argument("--out", required=True, help="output CSV path")
    _add_threads_flag(p)
    _add_raw_flags(p)

    p = sub.add_parser("score", help="score a reference/distorted pair")
    p.add_argument("ref", help="reference video")
    p.add_argument("dist", help="distorted video")
    p.add_argument("--model", required=True, help="model file path")
    p.add_argument("--out", help="score report JSON path")
    p.add_argument(
        "--chunk-size",
        type=int,
        help="frames per chunk; must match the model (default: from model)",
    )
    p.add_argument(
        "--features-out",
        help="also write the assembled per-frame feature CSV "
        "(pair_id,chunk,frame,r_E,r_h,r_L,ssim)",
    )
    p.add_argument("--pair-id", default=None, help="pair id used in --features-out rows")
    _add_threads_flag(p)
    _add_raw_flags(p)

    p = sub.add_parser("eval", help="evaluate a manifest against ground truth")
    p.add_argument("--manifest", required=True, help="CSV: id,ref_path,dist_path,ground_truth")
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True, help="evaluation report JSON path")
    p.add_argument("--csv-out", help="flat per-entry CSV (id,predicted,ground_truth)")
    p.add_argument("--chunk-size", type=int, help="must match the model (default: from model)")
    _add_threads_flag(p)
    _add_raw_flags(p)

    p = sub.add_parser("importance", help="univariate feature importance over a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True, help="importance report JSON path")
    p.add_argument("--chunk-size", type=int, help="must match the model (default: from model)")
    _add_threads_flag(p)
    _add_raw_flags(p)

    p = sub.add_parser("bench", help="stage-wise timing benchmark on one pair")
    p.add_argument("ref")
    p.add_argument("dist")
    p.add_argument("--model", required=True)
    p.add_argument("--out", help="benchmark report JSON path")
    p.add_argument("--repetitions", type=int, default=3)
    p.add_argument("--chunk-size", type=int, help="must match the model (default: from model)")
    _add_threads_flag(p)
    _add_raw_flags(p)

    return parser


def _check_common(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    if getattr(args, "threads", 1) < 1:
        parser.error("--threads must be >= 1")
    if args.pixfmt != video_io.YUV420_8BIT:
        parser.error(f"unsupported --pixfmt {args.pixfmt!r} (only yuv420p)")
    for path_arg in ("input", "ref", "dist"):
        path = getattr(args, path_arg, None)
        if path is not None and not str(path).lower().endswith(".y4m"):
            if args.width is None or args.height is None:
                parser.error(f"raw YUV input {path!r} requires --width and --height")


def _cmd_features(args: argparse.Namespace) -> int:
    _, frames = video_io.read_video(args.input, args.width, args.height, args.pixfmt)
    if not frames:
        raise ValueError(f"no frames in {args.input!r}")
    features = texture.extract_segment_features(frames, args.threads)
    pipeline.write_text(texture.features_to_csv(features), args.out)
    return 0


def _load_model_checked(args: argparse.Namespace):
    bundle = load_model(args.model)
    chunk_size = getattr(args, "chunk_size", None)
    if chunk_size is not None and chunk_size != bundle.chunk_size:
        raise ValueError(
            f"--chunk-size {chunk_size} conflicts with model chunk size "
            f"{bundle.chunk_size}"
        )
    return bundle


def _cmd_score(args: argparse.Namespace) -> int:
    bundle = _load_model_checked(args)
    result = pipeline.score_pair(
        args.ref, args.dist, bundle, args.threads, args.width, args.height
    )
    if args.out:
        pipeline.write_report(result.report.to_dict(), args.out)
    if args.features_out:
        pair_id = args.pair_id
        if pair_id is None:
            pair_id = os.path.splitext(os.path.basename(args.dist))[0]
        pipeline.write_text(
            pipeline.assembled_features_csv(result, pair_id), args.features_out
        )
    print(f"{result.report.segment_score!r}")
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    bundle = _load_model_checked(args)
    manifest = evaluate.load_manifest(args.manifest)
    report = evaluate.run_eval(manifest, bundle, args.threads, args.width, args.height)
    pipeline.write_report(report.to_dict(), args.out)
    if args.csv_out:
        pipeline.write_text(report.to_csv(), args.csv_out)
    return 0


def _cmd_importance(args: argparse.Namespace) -> int:
    bundle = _load_model_checked(args)
    manifest = evaluate.load_manifest(args.manifest)
    report = evaluate.importance_from_manifest(
        manifest, bundle, args.threads, args.width, args.height
    )
    pipeline.write_report(report.to_dict(), args.out)
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    bundle = _load_model_checked(args)
    report = evaluate.bench_pipeline(
        args.ref,
        args.dist,
        bundle,
        args.threads,
        args.repetitions,
        args.width,
        args.height,
    )
    if args.out:
        pipeline.write_report(report.to_dict(), args.out)
    return 0


_COMMANDS = {
    "features": _cmd_features,
    "score": _cmd_score,
    "eval": _cmd_eval,
    "importance": _cmd_importance,
    "bench": _cmd_bench,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _check_common(parser, args)
    try:
        return _COMMANDS[args.command](args)
    except (
        OSError,
        ValueError,
        ModelFormatError,
        video_io.VideoFormatError,
        video_io.PairMismatchError,
        RuntimeError,
    ) as exc:
        print(f"texvq {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
