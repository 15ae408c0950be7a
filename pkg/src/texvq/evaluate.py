"""Dataset evaluation: accuracy statistics, metric correlation, feature
importance, and the stage-wise timing benchmark.

Ground-truth scores are always ingested from manifests, never computed
here.
"""

from __future__ import annotations

import csv
import os
import statistics
from dataclasses import dataclass, field

import numpy as np

from .model import FEATURE_ORDER, INPUT_DIM, ModelBundle
from .pipeline import PairResult, score_pair

MANIFEST_CSV_HEADER = "id,ref_path,dist_path,ground_truth"


class StatisticUndefinedError(ValueError):
    """Statistic has no defined value on this input (e.g. zero variance)."""


def pcc(a: list[float] | np.ndarray, b: list[float] | np.ndarray) -> float:
    """Sample Pearson correlation coefficient."""
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.size} vs {y.size}")
    if x.size < 2:
        raise StatisticUndefinedError("correlation needs at least 2 points")
    dx = x - x.mean()
    dy = y - y.mean()
    denom = np.sqrt((dx * dx).sum() * (dy * dy).sum())
    if denom == 0.0:
        raise StatisticUndefinedError("correlation undefined for zero-variance input")
    return float((dx * dy).sum() / denom)


def mae(a: list[float] | np.ndarray, b: list[float] | np.ndarray) -> float:
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.size} vs {y.size}")
    if x.size == 0:
        raise ValueError("mean absolute error of empty input")
    return float(np.abs(x - y).mean())


def max_abs_dev(a: list[float] | np.ndarray, b: list[float] | np.ndarray) -> float:
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.size} vs {y.size}")
    if x.size == 0:
        raise ValueError("maximum deviation of empty input")
    return float(np.abs(x - y).max())


def metric_correlation_matrix(
    columns: dict[str, list[float]]
) -> tuple[list[str], np.ndarray]:
    """Pairwise Pearson correlation of named metric columns."""
    names = list(columns)
    if len(names) < 1:
        raise ValueError("need at least one column")
    matrix = np.ones((len(names), len(names)), dtype=np.float64)
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            value = pcc(columns[names[i]], columns[names[j]])
            matrix[i, j] = value
            matrix[j, i] = value
    return names, matrix


@dataclass(frozen=True)
class ManifestEntry:
    id: str
    ref_path: str
    dist_path: str
    ground_truth: float | None = None

    def __post_init__(self) -> None:
        if not self.ref_path or not self.dist_path:
            raise ValueError(f"manifest entry {self.id!r} has an empty path")
        if self.ground_truth is not None and not (0.0 <= self.ground_truth <= 100.0):
            raise ValueError(
                f"manifest entry {self.id!r}: ground truth {self.ground_truth} "
                "outside [0, 100]"
            )


def load_manifest(path: str | os.PathLike) -> list[ManifestEntry]:
    entries = []
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        required = {"id", "ref_path", "dist_path"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise ValueError(f"manifest must carry columns {MANIFEST_CSV_HEADER}")
        for row in reader:
            raw_truth = (row.get("ground_truth") or "").strip()
            entries.append(
                ManifestEntry(
                    id=row["id"].strip(),
                    ref_path=row["ref_path"].strip(),
                    dist_path=row["dist_path"].strip(),
                    ground_truth=float(raw_truth) if raw_truth else None,
                )
            )
    if not entries:
        raise ValueError("manifest holds no entries")
    return entries


@dataclass(frozen=True)
class EvalReport:
    pcc: float | None
    mae: float
    max_abs_dev: float
    per_entry: list[dict] = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "pcc": self.pcc,
            "mae": self.mae,
            "max_abs_dev": self.max_abs_dev,
            "per_entry": self.per_entry,
        }

    def to_csv(self) -> str:
        lines = ["id,predicted,ground_truth"]
        for row in self.per_entry:
            lines.append(f"{row['id']},{row['predicted']!r},{row['ground_truth']!r}")
        return "\n".join(lines) + "\n"


def run_eval(
    manifest: list[ManifestEntry],
    bundle: ModelBundle,
    threads: int = 1,
    width: int | None = None,
    height: int | None = None,
    collect_results: list[PairResult] | None = None,
) -> EvalReport:
    """Score every manifest pair end-to-end and compare with ground truth."""
    missing = [e.id for e in manifest if e.ground_truth is None]
    if missing:
        raise ValueError(f"entries without ground truth: {', '.join(missing)}")
    predicted = []
    truth = []
    per_entry = []
    for entry in manifest:
        try:
            result = score_pair(
                entry.ref_path, entry.dist_path, bundle, threads, width, height
            )
        except (OSError, ValueError) as exc:
            raise RuntimeError(f"entry {entry.id!r} failed: {exc}") from exc
        if collect_results is not None:
            collect_results.append(result)
        predicted.append(result.report.segment_score)
        truth.append(entry.ground_truth)
        per_entry.append(
            {
                "id": entry.id,
                "predicted": result.report.segment_score,
                "ground_truth": entry.ground_truth,
            }
        )
    try:
        correlation: float | None = pcc(predicted, truth)
    except StatisticUndefinedError:
        correlation = None
    return EvalReport(
        pcc=correlation,
        mae=mae(predicted, truth),
        max_abs_dev=max_abs_dev(predicted, truth),
        per_entry=per_entry,
    )


@dataclass(frozen=True)
class ImportanceReport:
    features: tuple[str, ...]
    raw: list[float]
    normalized: list[float]
    degenerate_range: bool

    def to_dict(self) -> dict:
        return {
            "features": list(self.features),
            "raw": self.raw,
            "normalized": self.normalized,
            "degenerate_range": self.degenerate_range,
        }


def feature_importance(
    bundle: ModelBundle,
    matrices: list[np.ndarray],
    targets: list[float],
) -> ImportanceReport:
    """Univariate ablation: neutralize one input column, measure the MAE shift.

    A column is neutralized by substituting its frozen normalization mean,
    i.e. the value whose z-score is zero at the model input.
    """
    if not matrices:
        raise ValueError("feature importance needs a non-empty dataset")
    if len(matrices) != len(targets):
        raise ValueError(f"matrix/target length mismatch: {len(matrices)} vs {len(targets)}")
    from .fusion import predict_chunk_score

    base = [predict_chunk_score(m, bundle) for m in matrices]
    mae_full = mae(base, targets)
    raw = []
    for column in range(INPUT_DIM):
        ablated_scores = []
        for matrix in matrices:
            ablated = matrix.copy()
            ablated[:, column] = bundle.norm_mean[column]
            ablated_scores.append(predict_chunk_score(ablated, bundle))
        raw.append(abs(mae(ablated_scores, targets) - mae_full))
    low, high = min(raw), max(raw)
    if high == low:
        normalized = [0.0] * INPUT_DIM
        degenerate = True
    else:
        normalized = [(value - low) / (high - low) for value in raw]
        degenerate = False
    return ImportanceReport(
        features=FEATURE_ORDER, raw=raw, normalized=normalized, degenerate_range=degenerate
    )


def importance_from_manifest(
    manifest: list[ManifestEntry],
    bundle: ModelBundle,
    threads: int = 1,
    width: int | None = None,
    height: int | None = None,
) -> ImportanceReport:
    """Build the chunk-level dataset from a manifest, then rank features.

    Every chunk of an entry inherits the entry's ground-truth score.
    """
    results: list[PairResult] = []
    run_eval(manifest, bundle, threads, width, height, collect_results=results)
    matrices = []
    targets = []
    for entry, result in zip(manifest, results):
        for matrix in result.chunk_matrices:
            matrices.append(matrix)
            targets.append(entry.ground_truth)
    return feature_importance(bundle, matrices, targets)


@dataclass(frozen=True)
class BenchReport:
    threads: int
    repetitions: int
    frames: int
    stages: dict[str, float]
    fps: dict[str, float]
    segment_score: float

    def to_dict(self) -> dict:
        return {
            "threads": self.threads,
            "repetitions": self.repetitions,
            "frames": self.frames,
            "stages": self.stages,
            "fps": self.fps,
            "segment_score": self.segment_score,
        }


def bench_pipeline(
    ref_path: str | os.PathLike,
    dist_path: str | os.PathLike,
    bundle: ModelBundle,
    threads: int = 1,
    repetitions: int = 3,
    width: int | None = None,
    height: int | None = None,
) -> BenchReport:
    """Median wall-clock stage times over repeated end-to-end runs."""
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    timings = []
    result = None
    for _ in range(repetitions):
        result = score_pair(ref_path, dist_path, bundle, threads, width, height)
        timings.append(result.report.timing)
    stages = {
        "texture_s": statistics.median(t.texture_s for t in timings),
        "ssim_s": statistics.median(t.ssim_s for t in timings),
        "fusion_s": statistics.median(t.fusion_s for t in timings),
        "total_s": statistics.median(t.total_s for t in timings),
    }
    frames = result.frame_count
    fps = {
        "texture": frames / stages["texture_s"] if stages["texture_s"] > 0 else float("inf"),
        "ssim": frames / stages["ssim_s"] if stages["ssim_s"] > 0 else float("inf"),
        "total": frames / stages["total_s"] if stages["total_s"] > 0 else float("inf"),
    }
    return BenchReport(
        threads=threads,
        repetitions=repetitions,
        frames=frames,
        stages=stages,
        fps=fps,
        segment_score=result.report.segment_score,
    )
