"""Per-frame DCT-energy texture features over non-overlapping 32x32 luma blocks.

Three features per frame: average texture energy E (weighted sum of AC
DCT magnitudes, per-pixel normalized), its temporal gradient h, and the
average brightness L of the analyzed region. Edge blocks that do not fill
32x32 are dropped.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .video_io import Frame

BLOCK_SIZE = 32

FEATURE_CSV_HEADER = "frame,E,h,L"


def _dct_basis(n: int) -> np.ndarray:
    # Orthonormal DCT-II: row k is a_k * cos((2x+1) k pi / 2n)
    x = np.arange(n, dtype=np.float64)
    k = x[:, None]
    basis = np.cos((2.0 * x[None, :] + 1.0) * k * np.pi / (2.0 * n))
    basis *= np.sqrt(2.0 / n)
    basis[0, :] = np.sqrt(1.0 / n)
    return basis


def _energy_weights(n: int) -> np.ndarray:
    # exp(|(i*j/n^2)^2 - 1|) per coefficient, DC excluded.
    idx = np.arange(n, dtype=np.float64)
    ij = np.outer(idx, idx) / (n * n)
    weights = np.exp(np.abs(ij * ij - 1.0))
    weights[0, 0] = 0.0
    return weights


_DCT32 = _dct_basis(BLOCK_SIZE)
_WEIGHTS32 = _energy_weights(BLOCK_SIZE)


@dataclass(frozen=True)
class BlockGrid:
    """Row-major per-block texture energies for one frame."""

    blocks_x: int
    blocks_y: int
    energies: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class FrameFeatures:
    energy: float
    gradient: float
    brightness: float
    frame_index: int


def dct2d_32(block: np.ndarray) -> np.ndarray:
    """Orthonormal 2-D DCT-II of one 32x32 block."""
    if block.shape != (BLOCK_SIZE, BLOCK_SIZE):
        raise ValueError(f"expected a {BLOCK_SIZE}x{BLOCK_SIZE} block, got {block.shape}")
    samples = np.asarray(block, dtype=np.float64)
    return _DCT32 @ samples @ _DCT32.T


def block_texture_energy(coeffs: np.ndarray) -> float:
    """Weighted sum of AC coefficient magnitudes of one transformed block."""
    return float(np.sum(np.abs(coeffs) * _WEIGHTS32))


def _block_energies(luma: np.ndarray) -> np.ndarray:
    """Texture energies of all complete blocks, row-major order.

    The per-block mean is removed before the transform; this leaves every
    AC coefficient unchanged (only DC shifts) but makes flat blocks yield
    an exact zero instead of rounding noise.
    """
    blocks_y = luma.shape[0] // BLOCK_SIZE
    blocks_x = luma.shape[1] // BLOCK_SIZE
    region = luma[: blocks_y * BLOCK_SIZE, : blocks_x * BLOCK_SIZE].astype(np.float64)
    blocks = (
        region.reshape(blocks_y, BLOCK_SIZE, blocks_x, BLOCK_SIZE)
        .transpose(0, 2, 1, 3)
        .reshape(blocks_y * blocks_x, BLOCK_SIZE, BLOCK_SIZE)
    )
    blocks = blocks - blocks.mean(axis=(1, 2), keepdims=True)
    coeffs = _DCT32 @ blocks @ _DCT32.T
    return (np.abs(coeffs) * _WEIGHTS32).sum(axis=(1, 2))


def _frame_stats(luma: np.ndarray) -> tuple[BlockGrid, float]:
    blocks_y = luma.shape[0] // BLOCK_SIZE
    blocks_x = luma.shape[1] // BLOCK_SIZE
    if blocks_y == 0 or blocks_x == 0:
        raise ValueError(
            f"frame {luma.shape[1]}x{luma.shape[0]} has no complete "
            f"{BLOCK_SIZE}x{BLOCK_SIZE} block"
        )
    grid = BlockGrid(blocks_x=blocks_x, blocks_y=blocks_y, energies=_block_energies(luma))
    region = luma[: blocks_y * BLOCK_SIZE, : blocks_x * BLOCK_SIZE]
    return grid, float(region.mean(dtype=np.float64))


def frame_features(
    frame: Frame, prev: BlockGrid | None = None
) -> tuple[FrameFeatures, BlockGrid]:
    """Features of one frame; `prev` is the preceding frame's block grid."""
    grid, brightness = _frame_stats(frame.luma)
    per_pixel = grid.energies.size * BLOCK_SIZE * BLOCK_SIZE
    energy = float(grid.energies.sum() / per_pixel)
    if prev is None:
        gradient = 0.0
    else:
        if (prev.blocks_x, prev.blocks_y) != (grid.blocks_x, grid.blocks_y):
            raise ValueError(
                f"block grid mismatch: previous {prev.blocks_x}x{prev.blocks_y} "
                f"vs current {grid.blocks_x}x{grid.blocks_y}"
            )
        gradient = float(np.abs(grid.energies - prev.energies).sum() / per_pixel)
    features = FrameFeatures(
        energy=energy, gradient=gradient, brightness=brightness, frame_index=frame.index
    )
    return features, grid


def extract_segment_features(frames: list[Frame], threads: int = 1) -> list[FrameFeatures]:
    """Features for every frame, gradients threaded through in input order.

    Per-frame statistics may be computed in parallel; the temporal
    reduction always runs sequentially in frame order, so the output is
    identical for any worker count.
    """
    if not frames:
        raise ValueError("cannot extract features from an empty frame list")
    if threads <= 1 or len(frames) == 1:
        stats = [_frame_stats(frame.luma) for frame in frames]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            stats = list(pool.map(_frame_stats, (frame.luma for frame in frames)))

    features = []
    prev: BlockGrid | None = None
    for frame, (grid, brightness) in zip(frames, stats):
        per_pixel = grid.energies.size * BLOCK_SIZE * BLOCK_SIZE
        if prev is None:
            gradient = 0.0
        elif (prev.blocks_x, prev.blocks_y) != (grid.blocks_x, grid.blocks_y):
            raise ValueError("frames in one segment must share block grid geometry")
        else:
            gradient = float(np.abs(grid.energies - prev.energies).sum() / per_pixel)
        features.append(
            FrameFeatures(
                energy=float(grid.energies.sum() / per_pixel),
                gradient=gradient,
                brightness=brightness,
                frame_index=frame.index,
            )
        )
        prev = grid
    return features


def features_to_csv(features: list[FrameFeatures]) -> str:
    lines = [FEATURE_CSV_HEADER]
    for f in features:
        lines.append(
            f"{f.frame_index},{f.energy:.6f},{f.gradient:.6f},{f.brightness:.6f}"
        )
    return "\n".join(lines) + "\n"
