"""Frame-wise luma SSIM and PSNR for original/reconstructed pairs.

SSIM follows the original single-scale definition: 11x11 Gaussian window
(sigma 1.5), C1 = (0.01*255)^2, C2 = (0.03*255)^2, evaluated only at
window positions fully inside the frame, no downsampling prefilter.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .video_io import Frame

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
_C1 = (0.01 * 255.0) ** 2
_C2 = (0.03 * 255.0) ** 2

PSNR_PEAK = 255.0


def _gaussian_kernel(size: int, sigma: float) -> np.ndarray:
    offsets = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    kernel = np.exp(-(offsets * offsets) / (2.0 * sigma * sigma))
    return kernel / kernel.sum()


_KERNEL = _gaussian_kernel(SSIM_WINDOW, SSIM_SIGMA)


def _filter_valid(image: np.ndarray) -> np.ndarray:
    """Separable Gaussian filter at full-overlap positions only."""
    taps = _KERNEL.size
    rows = image.shape[0] - taps + 1
    cols = image.shape[1] - taps + 1
    horiz = _KERNEL[0] * image[:, 0:cols]
    for k in range(1, taps):
        horiz = horiz + _KERNEL[k] * image[:, k : k + cols]
    out = _KERNEL[0] * horiz[0:rows, :]
    for k in range(1, taps):
        out = out + _KERNEL[k] * horiz[k : k + rows, :]
    return out


@dataclass(frozen=True)
class FramePairScore:
    ssim: float
    psnr: float
    frame_index: int


def frame_ssim(ref: Frame, dist: Frame) -> float:
    """Mean SSIM between two luma planes of identical geometry."""
    a, b = _as_float_pair(ref, dist)
    if a.shape[0] < SSIM_WINDOW or a.shape[1] < SSIM_WINDOW:
        raise ValueError(f"frame smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} SSIM window")
    mu_a = _filter_valid(a)
    mu_b = _filter_valid(b)
    mu_ab = mu_a * mu_b
    mu_aa = mu_a * mu_a
    mu_bb = mu_b * mu_b
    var_a = _filter_valid(a * a) - mu_aa
    var_b = _filter_valid(b * b) - mu_bb
    cov = _filter_valid(a * b) - mu_ab
    ssim_map = ((2.0 * mu_ab + _C1) * (2.0 * cov + _C2)) / (
        (mu_aa + mu_bb + _C1) * (var_a + var_b + _C2)
    )
    return float(ssim_map.mean())


def frame_psnr(ref: Frame, dist: Frame) -> float:
    """10*log10(255^2 / MSE); identical frames map to infinity."""
    a, b = _as_float_pair(ref, dist)
    diff = a - b
    mse = float((diff * diff).mean())
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(PSNR_PEAK * PSNR_PEAK / mse)


def _as_float_pair(ref: Frame, dist: Frame) -> tuple[np.ndarray, np.ndarray]:
    if ref.luma.shape != dist.luma.shape:
        raise ValueError(
            f"dimension mismatch: {ref.luma.shape[1]}x{ref.luma.shape[0]} "
            f"vs {dist.luma.shape[1]}x{dist.luma.shape[0]}"
        )
    return ref.luma.astype(np.float64), dist.luma.astype(np.float64)


def _pair_score(pair: tuple[Frame, Frame]) -> FramePairScore:
    ref, dist = pair
    return FramePairScore(
        ssim=frame_ssim(ref, dist), psnr=frame_psnr(ref, dist), frame_index=ref.index
    )


def segment_pair_scores(
    ref_frames: list[Frame], dist_frames: list[Frame], threads: int = 1
) -> list[FramePairScore]:
    """One score per frame index, deterministic for any worker count."""
    if len(ref_frames) != len(dist_frames):
        raise ValueError(
            f"frame list length mismatch: {len(ref_frames)} vs {len(dist_frames)}"
        )
    pairs = list(zip(ref_frames, dist_frames))
    if threads <= 1 or len(pairs) <= 1:
        return [_pair_score(pair) for pair in pairs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(_pair_score, pairs))
