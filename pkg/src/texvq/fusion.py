"""Residual assembly and the LSTM + dense forward pass producing chunk scores.

A chunk matrix has one row per frame in fixed column order
[r_E, r_h, r_L, ssim]; rows are z-scored with the model's frozen
statistics, run through a single unidirectional LSTM (final hidden state
readout, no peepholes), then a dense layer, and clamped to [0, 100].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import INPUT_DIM, ModelBundle
from .texture import FrameFeatures

SCORE_MIN = 0.0
SCORE_MAX = 100.0


@dataclass(frozen=True)
class ResidualTriple:
    """Original-minus-reconstructed texture feature differences."""

    energy: float
    gradient: float
    brightness: float
    frame_index: int


def compute_residuals(
    orig: list[FrameFeatures], recon: list[FrameFeatures]
) -> list[ResidualTriple]:
    if len(orig) != len(recon):
        raise ValueError(f"feature list length mismatch: {len(orig)} vs {len(recon)}")
    residuals = []
    for a, b in zip(orig, recon):
        if a.frame_index != b.frame_index:
            raise ValueError(
                f"frame index mismatch: {a.frame_index} vs {b.frame_index}"
            )
        residuals.append(
            ResidualTriple(
                energy=a.energy - b.energy,
                gradient=a.gradient - b.gradient,
                brightness=a.brightness - b.brightness,
                frame_index=a.frame_index,
            )
        )
    return residuals


def assemble_chunk_matrix(
    residuals: list[ResidualTriple], ssim_values: list[float]
) -> np.ndarray:
    """Stack per-frame rows [r_E, r_h, r_L, ssim] into one chunk matrix."""
    if len(residuals) != len(ssim_values):
        raise ValueError(
            f"residual/ssim length mismatch: {len(residuals)} vs {len(ssim_values)}"
        )
    if not residuals:
        raise ValueError("cannot assemble an empty chunk matrix")
    matrix = np.empty((len(residuals), INPUT_DIM), dtype=np.float64)
    for row, (r, s) in enumerate(zip(residuals, ssim_values)):
        matrix[row, 0] = r.energy
        matrix[row, 1] = r.gradient
        matrix[row, 2] = r.brightness
        matrix[row, 3] = s
    return matrix


def normalize_inputs(matrix: np.ndarray, bundle: ModelBundle) -> np.ndarray:
    return (matrix - bundle.norm_mean) / bundle.norm_std


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def lstm_forward(matrix: np.ndarray, bundle: ModelBundle) -> np.ndarray:
    """Run the LSTM recurrence over the rows; returns the final hidden state."""
    w, u, b = bundle.lstm.weights, bundle.lstm.recurrent, bundle.lstm.bias
    hidden = np.zeros(bundle.hidden_dim, dtype=np.float64)
    cell = np.zeros(bundle.hidden_dim, dtype=np.float64)
    for x in matrix:
        gate_in = _sigmoid(w["input"] @ x + u["input"] @ hidden + b["input"])
        gate_forget = _sigmoid(w["forget"] @ x + u["forget"] @ hidden + b["forget"])
        candidate = np.tanh(w["candidate"] @ x + u["candidate"] @ hidden + b["candidate"])
        gate_out = _sigmoid(w["output"] @ x + u["output"] @ hidden + b["output"])
        cell = gate_forget * cell + gate_in * candidate
        hidden = gate_out * np.tanh(cell)
    return hidden


def predict_chunk_score(matrix: np.ndarray, bundle: ModelBundle) -> float:
    """Normalize, run the LSTM and dense layer, clamp to [0, 100]."""
    if matrix.shape != (bundle.chunk_size, INPUT_DIM):
        raise ValueError(
            f"chunk matrix shape {matrix.shape} does not match "
            f"model input ({bundle.chunk_size}, {INPUT_DIM})"
        )
    hidden = lstm_forward(normalize_inputs(matrix, bundle), bundle)
    raw = float(hidden @ bundle.dense_weight + bundle.dense_bias)
    return min(SCORE_MAX, max(SCORE_MIN, raw))


def score_segment(chunk_scores: list[float]) -> float:
    """Arithmetic mean of the chunk scores (sequential sum)."""
    if not chunk_scores:
        raise ValueError("cannot average an empty chunk score list")
    return sum(chunk_scores) / len(chunk_scores)
