#!/usr/bin/env python3
"""Fallback generator for the bundled reference model and parity vectors.

Writes a seeded random 200-cell model whose vector outputs are computed
with the scalar reference recurrence from the test suite, so the fixture
stays independent of the production forward pass. The preferred path is
trainer/tools/train_reference_model.py, which exports a trained model and
vectors produced by the trainer's own implementation.
"""

import json
import os
import sys

import numpy as np

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, os.path.join(ROOT, "tests"))
sys.path.insert(0, os.path.join(ROOT, "src"))

from reference_impls import scalar_lstm_predict  # noqa: E402

from texvq.model import (  # noqa: E402
    FEATURE_ORDER,
    FORMAT_VERSION,
    GATE_ORDER,
    LstmWeights,
    ModelBundle,
    save_model,
)

HIDDEN = 200
CHUNK = 8
SEED = 20240811
VECTORS = 32


def build_bundle(rng: np.random.Generator) -> ModelBundle:
    scale = 1.0 / np.sqrt(HIDDEN)
    weights = {g: rng.normal(0.0, 0.5, (HIDDEN, 4)) for g in GATE_ORDER}
    recurrent = {g: rng.normal(0.0, scale, (HIDDEN, HIDDEN)) for g in GATE_ORDER}
    bias = {g: rng.normal(0.0, 0.1, HIDDEN) for g in GATE_ORDER}
    bias["forget"] += 1.0
    return ModelBundle(
        format_version=FORMAT_VERSION,
        chunk_size=CHUNK,
        feature_order=FEATURE_ORDER,
        norm_mean=np.array([0.0, 0.0, 0.0, 0.9]),
        norm_std=np.array([5.0, 2.0, 3.0, 0.08]),
        lstm=LstmWeights(
            input_dim=4, hidden_dim=HIDDEN, weights=weights, recurrent=recurrent, bias=bias
        ),
        dense_weight=rng.normal(0.0, 4.0 * scale, HIDDEN),
        dense_bias=55.0,
        provenance=f"synthetic reference weights, seed {SEED}",
    )


def draw_inputs(rng: np.random.Generator) -> list[list[list[float]]]:
    matrices = [[[0.0, 0.0, 0.0, 1.0]] * CHUNK]  # identical-pair chunk first
    for _ in range(VECTORS - 1):
        r_e = rng.normal(0.0, 5.0, CHUNK)
        r_h = rng.normal(0.0, 2.0, CHUNK)
        r_l = rng.normal(0.0, 3.0, CHUNK)
        ssim = rng.uniform(0.5, 1.0, CHUNK)
        matrices.append(
            [[float(r_e[i]), float(r_h[i]), float(r_l[i]), float(ssim[i])] for i in range(CHUNK)]
        )
    return matrices


def main() -> None:
    rng = np.random.default_rng(SEED)
    bundle = build_bundle(rng)
    assets = os.path.join(ROOT, "src", "texvq", "assets")
    os.makedirs(assets, exist_ok=True)
    save_model(bundle, os.path.join(assets, "reference_model.json"))

    vectors = []
    for matrix in draw_inputs(rng):
        vectors.append({"input": matrix, "output": scalar_lstm_predict(matrix, bundle)})
    doc = {
        "format_version": FORMAT_VERSION,
        "chunk_size": CHUNK,
        "seed": SEED,
        "source": "scalar reference recurrence",
        "vectors": vectors,
    }
    with open(os.path.join(assets, "reference_vectors.json"), "w", encoding="utf-8") as out:
        json.dump(doc, out, indent=1)
        out.write("\n")
    outputs = [v["output"] for v in vectors]
    print(f"wrote {len(vectors)} vectors, outputs in [{min(outputs):.2f}, {max(outputs):.2f}]")


if __name__ == "__main__":
    main()
