"""Portable fusion-model file: LSTM + dense weights and normalization stats.

The on-disk form is a single JSON document with nested row-major arrays
and full round-trip float precision, gated by a format_version field.
Gate order is fixed as input, forget, candidate, output.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

FORMAT_VERSION = 1
FEATURE_ORDER = ("r_E", "r_h", "r_L", "ssim")
GATE_ORDER = ("input", "forget", "candidate", "output")
INPUT_DIM = len(FEATURE_ORDER)


class ModelFormatError(ValueError):
    """Model file missing fields or violating shape/value invariants."""


@dataclass(frozen=True)
class LstmWeights:
    """Single-layer LSTM parameters keyed by gate name."""

    input_dim: int
    hidden_dim: int
    weights: dict[str, np.ndarray] = field(repr=False)  # gate -> (hidden, input)
    recurrent: dict[str, np.ndarray] = field(repr=False)  # gate -> (hidden, hidden)
    bias: dict[str, np.ndarray] = field(repr=False)  # gate -> (hidden,)


@dataclass(frozen=True)
class ModelBundle:
    format_version: int
    chunk_size: int
    feature_order: tuple[str, ...]
    norm_mean: np.ndarray = field(repr=False)
    norm_std: np.ndarray = field(repr=False)
    lstm: LstmWeights = field(repr=False)
    dense_weight: np.ndarray = field(repr=False)
    dense_bias: float = 0.0
    provenance: str = ""

    @property
    def hidden_dim(self) -> int:
        return self.lstm.hidden_dim


def validate_bundle(bundle: ModelBundle) -> None:
    if bundle.format_version != FORMAT_VERSION:
        raise ModelFormatError(f"unknown format_version {bundle.format_version}")
    if bundle.chunk_size < 1:
        raise ModelFormatError(f"chunk_size must be >= 1, got {bundle.chunk_size}")
    if tuple(bundle.feature_order) != FEATURE_ORDER:
        raise ModelFormatError(
            f"feature_order must be {list(FEATURE_ORDER)}, got {list(bundle.feature_order)}"
        )
    if bundle.norm_mean.shape != (INPUT_DIM,) or bundle.norm_std.shape != (INPUT_DIM,):
        raise ModelFormatError("norm_mean and norm_std must each hold 4 values")
    if not np.all(bundle.norm_std > 0):
        raise ModelFormatError("norm_std entries must be > 0")
    lstm = bundle.lstm
    if lstm.input_dim != INPUT_DIM:
        raise ModelFormatError(f"lstm input_dim must be {INPUT_DIM}, got {lstm.input_dim}")
    if lstm.hidden_dim < 1:
        raise ModelFormatError("lstm hidden_dim must be >= 1")
    for table, shape, what in (
        (lstm.weights, (lstm.hidden_dim, lstm.input_dim), "weights"),
        (lstm.recurrent, (lstm.hidden_dim, lstm.hidden_dim), "recurrent"),
        (lstm.bias, (lstm.hidden_dim,), "bias"),
    ):
        if set(table) != set(GATE_ORDER):
            raise ModelFormatError(f"lstm {what} must cover gates {list(GATE_ORDER)}")
        for gate in GATE_ORDER:
            if table[gate].shape != shape:
                raise ModelFormatError(
                    f"lstm {what}[{gate}] has shape {table[gate].shape}, expected {shape}"
                )
    if bundle.dense_weight.shape != (lstm.hidden_dim,):
        raise ModelFormatError(
            f"dense weight length {bundle.dense_weight.shape} "
            f"inconsistent with hidden_dim {lstm.hidden_dim}"
        )


def _require(doc: dict, key: str, where: str = "model"):
    if key not in doc:
        raise ModelFormatError(f"missing field {key!r} in {where}")
    return doc[key]


def _gate_arrays(section: dict, what: str) -> dict[str, np.ndarray]:
    out = {}
    for gate in GATE_ORDER:
        out[gate] = np.asarray(_require(section, gate, f"lstm.{what}"), dtype=np.float64)
    return out


def bundle_from_dict(doc: dict) -> ModelBundle:
    try:
        lstm_doc = _require(doc, "lstm")
        dense_doc = _require(doc, "dense")
        norm_doc = _require(doc, "normalization")
        bundle = ModelBundle(
            format_version=int(_require(doc, "format_version")),
            chunk_size=int(_require(doc, "chunk_size")),
            feature_order=tuple(_require(doc, "feature_order")),
            norm_mean=np.asarray(_require(norm_doc, "mean", "normalization"), dtype=np.float64),
            norm_std=np.asarray(_require(norm_doc, "std", "normalization"), dtype=np.float64),
            lstm=LstmWeights(
                input_dim=int(_require(lstm_doc, "input_dim", "lstm")),
                hidden_dim=int(_require(lstm_doc, "hidden_dim", "lstm")),
                weights=_gate_arrays(_require(lstm_doc, "weights", "lstm"), "weights"),
                recurrent=_gate_arrays(_require(lstm_doc, "recurrent", "lstm"), "recurrent"),
                bias=_gate_arrays(_require(lstm_doc, "bias", "lstm"), "bias"),
            ),
            dense_weight=np.asarray(_require(dense_doc, "weight", "dense"), dtype=np.float64),
            dense_bias=float(_require(dense_doc, "bias", "dense")),
            provenance=str(doc.get("provenance", "")),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ModelFormatError):
            raise
        raise ModelFormatError(f"malformed model document: {exc}") from exc
    validate_bundle(bundle)
    return bundle


def bundle_to_dict(bundle: ModelBundle) -> dict:
    return {
        "format_version": bundle.format_version,
        "chunk_size": bundle.chunk_size,
        "feature_order": list(bundle.feature_order),
        "normalization": {
            "mean": bundle.norm_mean.tolist(),
            "std": bundle.norm_std.tolist(),
        },
        "lstm": {
            "input_dim": bundle.lstm.input_dim,
            "hidden_dim": bundle.lstm.hidden_dim,
            "weights": {g: bundle.lstm.weights[g].tolist() for g in GATE_ORDER},
            "recurrent": {g: bundle.lstm.recurrent[g].tolist() for g in GATE_ORDER},
            "bias": {g: bundle.lstm.bias[g].tolist() for g in GATE_ORDER},
        },
        "dense": {
            "weight": bundle.dense_weight.tolist(),
            "bias": bundle.dense_bias,
        },
        "provenance": bundle.provenance,
    }


def load_model(path: str | os.PathLike) -> ModelBundle:
    with open(path, "r", encoding="utf-8") as handle:
        try:
            doc = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"model file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ModelFormatError("model file must contain a JSON object")
    return bundle_from_dict(doc)


def save_model(bundle: ModelBundle, path: str | os.PathLike) -> None:
    validate_bundle(bundle)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(bundle_to_dict(bundle), handle, indent=1)
        handle.write("\n")
