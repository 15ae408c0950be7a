"""End-to-end scoring of an original/reconstructed pair with stage timing.

Stages run in order: texture extraction (both streams concurrently, each
with half the thread budget), frame-wise SSIM, then fusion. Chunk scores
are gathered in chunk-index order, so output is deterministic for any
thread count.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import fusion, metrics, texture, video_io
from .model import ModelBundle


@dataclass(frozen=True)
class StageTimings:
    texture_s: float
    ssim_s: float
    fusion_s: float
    total_s: float

    def to_dict(self) -> dict:
        return {
            "texture_s": self.texture_s,
            "ssim_s": self.ssim_s,
            "fusion_s": self.fusion_s,
            "total_s": self.total_s,
        }


@dataclass(frozen=True)
class ScoreReport:
    chunk_scores: list[float]
    segment_score: float
    timing: StageTimings

    def to_dict(self) -> dict:
        return {
            "chunks": self.chunk_scores,
            "segment": self.segment_score,
            "timing": self.timing.to_dict(),
        }


@dataclass(frozen=True)
class PairResult:
    """Score report plus the intermediates the eval tooling reuses."""

    report: ScoreReport
    chunk_matrices: list[np.ndarray] = field(repr=False)
    chunk_frame_indices: list[list[int]] = field(repr=False)
    ref_features: list[texture.FrameFeatures] = field(repr=False)
    dist_features: list[texture.FrameFeatures] = field(repr=False)
    residuals: list[fusion.ResidualTriple] = field(repr=False)
    pair_scores: list[metrics.FramePairScore] = field(repr=False)
    frame_count: int = 0


def score_pair_frames(
    ref_frames: list[video_io.Frame],
    dist_frames: list[video_io.Frame],
    bundle: ModelBundle,
    threads: int = 1,
) -> PairResult:
    if len(ref_frames) != len(dist_frames):
        raise video_io.PairMismatchError(
            f"frame count mismatch: {len(ref_frames)} vs {len(dist_frames)}"
        )
    if not ref_frames:
        raise ValueError("cannot score an empty frame pair")

    start_total = time.perf_counter()

    start = time.perf_counter()
    per_stream = max(1, threads // 2)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=2) as pool:
            ref_future = pool.submit(
                texture.extract_segment_features, ref_frames, per_stream
            )
            dist_future = pool.submit(
                texture.extract_segment_features, dist_frames, per_stream
            )
            ref_features = ref_future.result()
            dist_features = dist_future.result()
    else:
        ref_features = texture.extract_segment_features(ref_frames, 1)
        dist_features = texture.extract_segment_features(dist_frames, 1)
    texture_s = time.perf_counter() - start

    start = time.perf_counter()
    pair_scores = metrics.segment_pair_scores(ref_frames, dist_frames, threads)
    ssim_s = time.perf_counter() - start

    start = time.perf_counter()
    residuals = fusion.compute_residuals(ref_features, dist_features)
    chunks = video_io.chunk_segment(ref_frames, bundle.chunk_size)
    matrices = []
    frame_indices = []
    for chunk in chunks:
        rows = [residuals[frame.index] for frame in chunk.frames]
        ssim_values = [pair_scores[frame.index].ssim for frame in chunk.frames]
        matrices.append(fusion.assemble_chunk_matrix(rows, ssim_values))
        frame_indices.append([frame.index for frame in chunk.frames])
    chunk_scores = [fusion.predict_chunk_score(m, bundle) for m in matrices]
    segment = fusion.score_segment(chunk_scores)
    fusion_s = time.perf_counter() - start

    total_s = time.perf_counter() - start_total
    report = ScoreReport(
        chunk_scores=chunk_scores,
        segment_score=segment,
        timing=StageTimings(texture_s, ssim_s, fusion_s, total_s),
    )
    return PairResult(
        report=report,
        chunk_matrices=matrices,
        chunk_frame_indices=frame_indices,
        ref_features=ref_features,
        dist_features=dist_features,
        residuals=residuals,
        pair_scores=pair_scores,
        frame_count=len(ref_frames),
    )


def score_pair(
    ref_path: str | os.PathLike,
    dist_path: str | os.PathLike,
    bundle: ModelBundle,
    threads: int = 1,
    width: int | None = None,
    height: int | None = None,
) -> PairResult:
    ref_info, ref_frames = video_io.read_video(ref_path, width, height)
    dist_info, dist_frames = video_io.read_video(dist_path, width, height)
    video_io.validate_pair(ref_info, dist_info)
    return score_pair_frames(ref_frames, dist_frames, bundle, threads)


def json_safe(value):
    """Map non-finite floats to strings so reports stay valid JSON."""
    if isinstance(value, float):
        if value == float("inf"):
            return "inf"
        if value == float("-inf"):
            return "-inf"
        if value != value:
            return "nan"
        return value
    if isinstance(value, dict):
        return {k: json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(v) for v in value]
    return value


def write_report(doc: dict, path: str | os.PathLike) -> None:
    """Atomic report write: temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    tmp_path = os.path.join(directory, f".{os.path.basename(path)}.tmp{os.getpid()}")
    with open(tmp_path, "w", encoding="utf-8") as handle:
        json.dump(json_safe(doc), handle, indent=2)
        handle.write("\n")
    os.replace(tmp_path, path)


def write_text(content: str, path: str | os.PathLike) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    tmp_path = os.path.join(directory, f".{os.path.basename(path)}.tmp{os.getpid()}")
    with open(tmp_path, "w", encoding="utf-8") as handle:
        handle.write(content)
    os.replace(tmp_path, path)


ASSEMBLED_CSV_HEADER = "pair_id,chunk,frame,r_E,r_h,r_L,ssim"


def assembled_features_csv(result: PairResult, pair_id: str) -> str:
    """Per-frame fused inputs, one row per chunk row, full float precision."""
    lines = [ASSEMBLED_CSV_HEADER]
    for chunk_index, matrix in enumerate(result.chunk_matrices):
        indices = result.chunk_frame_indices[chunk_index]
        for row_index in range(matrix.shape[0]):
            r_e, r_h, r_l, ssim = (float(v) for v in matrix[row_index])
            lines.append(
                f"{pair_id},{chunk_index},{indices[row_index]},"
                f"{r_e!r},{r_h!r},{r_l!r},{ssim!r}"
            )
    return "\n".join(lines) + "\n"
