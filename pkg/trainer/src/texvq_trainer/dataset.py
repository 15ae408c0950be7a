"""Training-set assembly from feature CSVs, and grouped train/val/test splits.

Chunk matrices are assembled with the same rules the inference pipeline
uses: residuals are original minus reconstructed, rows are
[r_E, r_h, r_L, ssim], a trailing remainder shorter than one chunk is
dropped, and an input shorter than one chunk is padded by repeating its
last frame's values.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field

import numpy as np

FEATURE_COLUMNS = ("r_E", "r_h", "r_L", "ssim")


@dataclass(frozen=True)
class TrainingExample:
    matrix: np.ndarray = field(repr=False)  # (chunk_size, 4) raw values
    target: float = 0.0
    group: str = ""
    chunk_index: int = 0

    def __post_init__(self) -> None:
        if self.matrix.ndim != 2 or self.matrix.shape[1] != len(FEATURE_COLUMNS):
            raise ValueError(f"chunk matrix must be (chunk_size, 4), got {self.matrix.shape}")
        if not 0.0 <= self.target <= 100.0:
            raise ValueError(f"target {self.target} outside [0, 100]")


@dataclass(frozen=True)
class SplitSpec:
    train: float = 0.75
    validation: float = 0.05
    test: float = 0.20
    seed: int = 0

    def __post_init__(self) -> None:
        total = self.train + self.validation + self.test
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"split fractions sum to {total}, expected 1")
        if min(self.train, self.validation, self.test) < 0:
            raise ValueError("split fractions must be non-negative")


def load_feature_csv(path: str | os.PathLike) -> np.ndarray:
    """Read the per-frame feature CSV (frame,E,h,L) into an (N, 3) array."""
    rows = []
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        needed = {"frame", "E", "h", "L"}
        if reader.fieldnames is None or not needed.issubset(reader.fieldnames):
            raise ValueError(f"{path}: expected columns frame,E,h,L")
        for record in reader:
            rows.append((int(record["frame"]), float(record["E"]), float(record["h"]), float(record["L"])))
    rows.sort(key=lambda r: r[0])
    if not rows:
        raise ValueError(f"{path}: no feature rows")
    if [r[0] for r in rows] != list(range(len(rows))):
        raise ValueError(f"{path}: frame indices are not contiguous from 0")
    return np.array([r[1:] for r in rows], dtype=np.float64)


def load_ssim_csv(path: str | os.PathLike) -> np.ndarray:
    """Read a per-frame SSIM CSV (frame,ssim) into an (N,) array."""
    rows = []
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None or not {"frame", "ssim"}.issubset(reader.fieldnames):
            raise ValueError(f"{path}: expected columns frame,ssim")
        for record in reader:
            rows.append((int(record["frame"]), float(record["ssim"])))
    rows.sort(key=lambda r: r[0])
    if not rows:
        raise ValueError(f"{path}: no ssim rows")
    return np.array([r[1] for r in rows], dtype=np.float64)


def assemble_pair_matrices(
    orig: np.ndarray, recon: np.ndarray, ssim: np.ndarray, chunk_size: int
) -> list[np.ndarray]:
    """Chunk matrices for one pair from per-frame features and SSIM."""
    if chunk_size < 1:
        raise ValueError("chunk_size must be >= 1")
    if orig.shape != recon.shape:
        raise ValueError(f"feature shape mismatch: {orig.shape} vs {recon.shape}")
    if orig.shape[0] != ssim.shape[0]:
        raise ValueError(
            f"frame count mismatch: {orig.shape[0]} features vs {ssim.shape[0]} ssim"
        )
    frames = orig.shape[0]
    if frames == 0:
        raise ValueError("pair has no frames")
    residual = orig - recon
    rows = np.concatenate([residual, ssim[:, None]], axis=1)
    if frames < chunk_size:
        pad = np.repeat(rows[-1:], chunk_size - frames, axis=0)
        return [np.concatenate([rows, pad], axis=0)]
    return [
        rows[i * chunk_size : (i + 1) * chunk_size].copy()
        for i in range(frames // chunk_size)
    ]


@dataclass(frozen=True)
class PairRecord:
    pair_id: str
    orig: np.ndarray = field(repr=False)  # (N, 3) E,h,L
    recon: np.ndarray = field(repr=False)
    ssim: np.ndarray = field(repr=False)  # (N,)


def load_pair_record(
    pair_id: str,
    orig_csv: str | os.PathLike,
    recon_csv: str | os.PathLike,
    ssim_csv: str | os.PathLike,
) -> PairRecord:
    return PairRecord(
        pair_id=pair_id,
        orig=load_feature_csv(orig_csv),
        recon=load_feature_csv(recon_csv),
        ssim=load_ssim_csv(ssim_csv),
    )


def load_targets_csv(path: str | os.PathLike) -> dict:
    """Ground-truth scores: pair_id,target rows or pair_id,chunk,target rows.

    Returns a mapping pair_id -> float, or (pair_id, chunk) -> float when a
    chunk column is present.
    """
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None or "pair_id" not in reader.fieldnames:
            raise ValueError(f"{path}: expected a pair_id column")
        if "target" not in reader.fieldnames:
            raise ValueError(f"{path}: expected a target column")
        per_chunk = "chunk" in reader.fieldnames
        targets = {}
        for record in reader:
            value = float(record["target"])
            if per_chunk:
                targets[(record["pair_id"], int(record["chunk"]))] = value
            else:
                targets[record["pair_id"]] = value
    if not targets:
        raise ValueError(f"{path}: no target rows")
    return targets


def _target_for(targets: dict, pair_id: str, chunk: int) -> float:
    if (pair_id, chunk) in targets:
        return targets[(pair_id, chunk)]
    if pair_id in targets:
        return targets[pair_id]
    raise ValueError(f"no ground truth for pair {pair_id!r} chunk {chunk}")


def build_dataset(
    pairs: list[PairRecord], targets: dict, chunk_size: int
) -> list[TrainingExample]:
    """Assemble one TrainingExample per chunk across all pairs."""
    examples = []
    for pair in pairs:
        matrices = assemble_pair_matrices(pair.orig, pair.recon, pair.ssim, chunk_size)
        for chunk_index, matrix in enumerate(matrices):
            examples.append(
                TrainingExample(
                    matrix=matrix,
                    target=_target_for(targets, pair.pair_id, chunk_index),
                    group=pair.pair_id,
                    chunk_index=chunk_index,
                )
            )
    if not examples:
        raise ValueError("dataset is empty")
    return examples


def load_assembled_csv(path: str | os.PathLike) -> dict[str, list[np.ndarray]]:
    """Read a pre-assembled pair_id,chunk,frame,r_E,r_h,r_L,ssim CSV.

    Rows must appear in file order within each chunk; the frame column is
    informational (padding repeats the last frame index).
    """
    per_chunk: dict[tuple[str, int], list[list[float]]] = {}
    pair_order: list[str] = []
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        needed = {"pair_id", "chunk", "frame", "r_E", "r_h", "r_L", "ssim"}
        if reader.fieldnames is None or not needed.issubset(reader.fieldnames):
            raise ValueError(f"{path}: expected columns pair_id,chunk,frame,r_E,r_h,r_L,ssim")
        for record in reader:
            key = (record["pair_id"], int(record["chunk"]))
            if key not in per_chunk:
                per_chunk[key] = []
                if record["pair_id"] not in pair_order:
                    pair_order.append(record["pair_id"])
            per_chunk[key].append(
                [float(record[c]) for c in FEATURE_COLUMNS]
            )
    if not per_chunk:
        raise ValueError(f"{path}: no rows")
    out: dict[str, list[np.ndarray]] = {}
    for pair_id in pair_order:
        chunks = sorted(c for p, c in per_chunk if p == pair_id)
        out[pair_id] = [
            np.array(per_chunk[(pair_id, c)], dtype=np.float64) for c in chunks
        ]
    return out


def examples_from_assembled(
    assembled: dict[str, list[np.ndarray]], targets: dict
) -> list[TrainingExample]:
    examples = []
    for pair_id, matrices in assembled.items():
        for chunk_index, matrix in enumerate(matrices):
            examples.append(
                TrainingExample(
                    matrix=matrix,
                    target=_target_for(targets, pair_id, chunk_index),
                    group=pair_id,
                    chunk_index=chunk_index,
                )
            )
    return examples


def split_examples(
    examples: list[TrainingExample], spec: SplitSpec
) -> tuple[list[TrainingExample], list[TrainingExample], list[TrainingExample]]:
    """Partition by group id so no source sequence straddles partitions."""
    groups = sorted({e.group for e in examples})
    rng = np.random.default_rng(spec.seed)
    rng.shuffle(groups)
    n = len(groups)
    n_train = int(round(spec.train * n))
    n_val = int(round(spec.validation * n))
    n_train = min(n_train, n)
    n_val = min(n_val, n - n_train)
    train_groups = set(groups[:n_train])
    val_groups = set(groups[n_train : n_train + n_val])
    test_groups = set(groups[n_train + n_val :])
    train = [e for e in examples if e.group in train_groups]
    val = [e for e in examples if e.group in val_groups]
    test = [e for e in examples if e.group in test_groups]
    return train, val, test
