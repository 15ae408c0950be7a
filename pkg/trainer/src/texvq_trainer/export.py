"""Export trained parameters to the portable model file and emit
forward-pass parity vectors for cross-implementation checks.

The file schema matches what the inference toolkit loads: JSON with a
format_version gate, z-score statistics, gate tables keyed input,
forget, candidate, output, and a dense readout. Only single-layer
networks are exportable; that is the inference contract.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .network import GATES, INPUT_DIM, LayerParams, NetworkParams, predict
from .training import NormStats, TrainResult

FORMAT_VERSION = 1
FEATURE_ORDER = ("r_E", "r_h", "r_L", "ssim")


class ExportError(ValueError):
    """Parameters cannot be written as a valid model file."""


def _check_exportable(params: NetworkParams, norm: NormStats, chunk_size: int) -> None:
    if len(params.layers) != 1:
        raise ExportError(
            f"model file holds a single LSTM layer; got {len(params.layers)} layers"
        )
    layer = params.layers[0]
    if layer.input_dim != INPUT_DIM:
        raise ExportError(f"layer input_dim {layer.input_dim} != {INPUT_DIM}")
    if params.dense_weight.shape != (layer.hidden_dim,):
        raise ExportError(
            f"dense weight shape {params.dense_weight.shape} inconsistent "
            f"with hidden_dim {layer.hidden_dim}"
        )
    if norm.mean.shape != (INPUT_DIM,) or norm.std.shape != (INPUT_DIM,):
        raise ExportError("normalization statistics must hold 4 values each")
    if not np.all(norm.std > 0):
        raise ExportError("normalization std must be positive")
    if chunk_size < 1:
        raise ExportError(f"chunk_size must be >= 1, got {chunk_size}")


def model_document(
    params: NetworkParams,
    norm: NormStats,
    chunk_size: int,
    provenance: str = "",
) -> dict:
    _check_exportable(params, norm, chunk_size)
    layer = params.layers[0]
    return {
        "format_version": FORMAT_VERSION,
        "chunk_size": chunk_size,
        "feature_order": list(FEATURE_ORDER),
        "normalization": {"mean": norm.mean.tolist(), "std": norm.std.tolist()},
        "lstm": {
            "input_dim": layer.input_dim,
            "hidden_dim": layer.hidden_dim,
            "weights": {g: layer.weights[g].tolist() for g in GATES},
            "recurrent": {g: layer.recurrent[g].tolist() for g in GATES},
            "bias": {g: layer.bias[g].tolist() for g in GATES},
        },
        "dense": {
            "weight": params.dense_weight.tolist(),
            "bias": float(params.dense_bias),
        },
        "provenance": provenance,
    }


def export_model(
    params: NetworkParams,
    norm: NormStats,
    chunk_size: int,
    path: str | os.PathLike,
    provenance: str = "",
) -> None:
    doc = model_document(params, norm, chunk_size, provenance)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(doc, handle, indent=1)
        handle.write("\n")


def export_result(result: TrainResult, path: str | os.PathLike, provenance: str = "") -> None:
    export_model(result.params, result.norm, result.chunk_size, path, provenance)


def import_model(path: str | os.PathLike) -> tuple[NetworkParams, NormStats, int]:
    """Re-import an exported file; round trips must be bit-exact."""
    with open(path, "r", encoding="utf-8") as handle:
        doc = json.load(handle)
    if doc.get("format_version") != FORMAT_VERSION:
        raise ExportError(f"unknown format_version {doc.get('format_version')!r}")
    lstm = doc["lstm"]
    layer = LayerParams(
        weights={g: np.asarray(lstm["weights"][g], dtype=np.float64) for g in GATES},
        recurrent={g: np.asarray(lstm["recurrent"][g], dtype=np.float64) for g in GATES},
        bias={g: np.asarray(lstm["bias"][g], dtype=np.float64) for g in GATES},
    )
    params = NetworkParams(
        layers=[layer],
        dense_weight=np.asarray(doc["dense"]["weight"], dtype=np.float64),
        dense_bias=float(doc["dense"]["bias"]),
    )
    norm = NormStats(
        mean=np.asarray(doc["normalization"]["mean"], dtype=np.float64),
        std=np.asarray(doc["normalization"]["std"], dtype=np.float64),
    )
    return params, norm, int(doc["chunk_size"])


def export_test_vectors(
    params: NetworkParams,
    norm: NormStats,
    chunk_size: int,
    count: int,
    path: str | os.PathLike,
    seed: int = 0,
) -> list[dict]:
    """Random raw input matrices with this implementation's own predictions.

    Vector 0 is always the identical-pair chunk ([0, 0, 0, 1] rows). The
    recorded output is the clamped score, matching deployment behaviour.
    """
    _check_exportable(params, norm, chunk_size)
    if count < 1:
        raise ValueError("need at least one vector")
    rng = np.random.default_rng(seed)
    matrices = [np.tile([0.0, 0.0, 0.0, 1.0], (chunk_size, 1))]
    for _ in range(count - 1):
        columns = [
            rng.normal(0.0, 5.0, chunk_size),
            rng.normal(0.0, 2.0, chunk_size),
            rng.normal(0.0, 3.0, chunk_size),
            rng.uniform(0.5, 1.0, chunk_size),
        ]
        matrices.append(np.stack(columns, axis=1))
    vectors = []
    for matrix in matrices:
        normalized = (matrix - norm.mean) / norm.std
        output = float(predict(params, normalized[None])[0])
        vectors.append({"input": matrix.tolist(), "output": output})
    doc = {
        "format_version": FORMAT_VERSION,
        "chunk_size": chunk_size,
        "seed": seed,
        "source": "texvq-trainer forward pass",
        "vectors": vectors,
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(doc, handle, indent=1)
        handle.write("\n")
    return vectors
