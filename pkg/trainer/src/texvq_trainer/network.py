"""LSTM regression network: forward pass, backpropagation through time,
mean-absolute-error loss, and an Adam optimizer.

Everything is float64 numpy. Layers may be stacked; only the final step's
hidden state of the top layer feeds the dense output unit. Gate math
matches the inference contract: sigmoid input/forget/output gates, tanh
candidate and cell activation, no peepholes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

GATES = ("input", "forget", "candidate", "output")
INPUT_DIM = 4


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


@dataclass
class LayerParams:
    weights: dict[str, np.ndarray]  # gate -> (hidden, input)
    recurrent: dict[str, np.ndarray]  # gate -> (hidden, hidden)
    bias: dict[str, np.ndarray]  # gate -> (hidden,)

    @property
    def hidden_dim(self) -> int:
        return self.bias["input"].shape[0]

    @property
    def input_dim(self) -> int:
        return self.weights["input"].shape[1]


@dataclass
class NetworkParams:
    layers: list[LayerParams]
    dense_weight: np.ndarray  # (hidden of top layer,)
    dense_bias: float

    def copy(self) -> "NetworkParams":
        return NetworkParams(
            layers=[
                LayerParams(
                    weights={g: p.weights[g].copy() for g in GATES},
                    recurrent={g: p.recurrent[g].copy() for g in GATES},
                    bias={g: p.bias[g].copy() for g in GATES},
                )
                for p in self.layers
            ],
            dense_weight=self.dense_weight.copy(),
            dense_bias=float(self.dense_bias),
        )


def _orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(0.0, 1.0, (n, n)))
    return q * np.sign(np.diag(r))


def init_params(
    rng: np.random.Generator,
    hidden_dims: list[int],
    input_dim: int = INPUT_DIM,
    output_bias: float = 0.0,
) -> NetworkParams:
    """Glorot-uniform input kernels, orthogonal recurrent kernels, zero biases
    with a unit forget-gate bias; the dense bias can be seeded with the
    training-target mean so the output starts on scale."""
    layers = []
    fan_in = input_dim
    for hidden in hidden_dims:
        limit = np.sqrt(6.0 / (fan_in + hidden))
        layers.append(
            LayerParams(
                weights={g: rng.uniform(-limit, limit, (hidden, fan_in)) for g in GATES},
                recurrent={g: _orthogonal(rng, hidden) for g in GATES},
                bias={
                    g: (np.ones(hidden) if g == "forget" else np.zeros(hidden))
                    for g in GATES
                },
            )
        )
        fan_in = hidden
    top = hidden_dims[-1]
    limit = np.sqrt(6.0 / (top + 1))
    return NetworkParams(
        layers=layers,
        dense_weight=rng.uniform(-limit, limit, top),
        dense_bias=float(output_bias),
    )


@dataclass
class _LayerCache:
    inputs: list[np.ndarray] = field(default_factory=list)
    h_prev: list[np.ndarray] = field(default_factory=list)
    c_prev: list[np.ndarray] = field(default_factory=list)
    gates: list[dict[str, np.ndarray]] = field(default_factory=list)
    cell: list[np.ndarray] = field(default_factory=list)
    tanh_cell: list[np.ndarray] = field(default_factory=list)


def _layer_forward(
    layer: LayerParams, inputs: np.ndarray, cache: _LayerCache | None
) -> np.ndarray:
    """Inputs (B, T, D) -> hidden sequence (B, T, H)."""
    batch, steps, _ = inputs.shape
    hidden = np.zeros((batch, layer.hidden_dim))
    cell = np.zeros((batch, layer.hidden_dim))
    outputs = np.empty((batch, steps, layer.hidden_dim))
    for t in range(steps):
        x = inputs[:, t, :]
        pre = {
            g: x @ layer.weights[g].T + hidden @ layer.recurrent[g].T + layer.bias[g]
            for g in GATES
        }
        gate = {
            "input": _sigmoid(pre["input"]),
            "forget": _sigmoid(pre["forget"]),
            "candidate": np.tanh(pre["candidate"]),
            "output": _sigmoid(pre["output"]),
        }
        new_cell = gate["forget"] * cell + gate["input"] * gate["candidate"]
        tanh_cell = np.tanh(new_cell)
        new_hidden = gate["output"] * tanh_cell
        if cache is not None:
            cache.inputs.append(x)
            cache.h_prev.append(hidden)
            cache.c_prev.append(cell)
            cache.gates.append(gate)
            cache.cell.append(new_cell)
            cache.tanh_cell.append(tanh_cell)
        hidden, cell = new_hidden, new_cell
        outputs[:, t, :] = hidden
    return outputs


def forward(params: NetworkParams, inputs: np.ndarray) -> np.ndarray:
    """Raw (unclamped) predictions for a batch of (B, T, 4) inputs."""
    seq = inputs
    for layer in params.layers:
        seq = _layer_forward(layer, seq, None)
    return seq[:, -1, :] @ params.dense_weight + params.dense_bias


def predict(params: NetworkParams, inputs: np.ndarray) -> np.ndarray:
    """Deployment-consistent predictions, clamped to [0, 100]."""
    return np.clip(forward(params, inputs), 0.0, 100.0)


def mae_loss(pred: np.ndarray, target: np.ndarray) -> float:
    return float(np.abs(pred - target).mean())


@dataclass
class Gradients:
    layers: list[LayerParams]
    dense_weight: np.ndarray
    dense_bias: float


def _zero_like(layer: LayerParams) -> LayerParams:
    return LayerParams(
        weights={g: np.zeros_like(layer.weights[g]) for g in GATES},
        recurrent={g: np.zeros_like(layer.recurrent[g]) for g in GATES},
        bias={g: np.zeros_like(layer.bias[g]) for g in GATES},
    )


def _layer_backward(
    layer: LayerParams, cache: _LayerCache, d_out_seq: np.ndarray
) -> tuple[LayerParams, np.ndarray]:
    """Backprop one layer given gradients for each step's hidden output."""
    grads = _zero_like(layer)
    batch, steps, _ = d_out_seq.shape
    d_hidden = np.zeros((batch, layer.hidden_dim))
    d_cell = np.zeros((batch, layer.hidden_dim))
    d_inputs = np.empty((batch, steps, layer.input_dim))
    for t in reversed(range(steps)):
        d_h = d_hidden + d_out_seq[:, t, :]
        gate = cache.gates[t]
        tanh_cell = cache.tanh_cell[t]
        d_o = d_h * tanh_cell
        d_c = d_cell + d_h * gate["output"] * (1.0 - tanh_cell * tanh_cell)
        d_f = d_c * cache.c_prev[t]
        d_i = d_c * gate["candidate"]
        d_g = d_c * gate["input"]
        d_pre = {
            "input": d_i * gate["input"] * (1.0 - gate["input"]),
            "forget": d_f * gate["forget"] * (1.0 - gate["forget"]),
            "candidate": d_g * (1.0 - gate["candidate"] * gate["candidate"]),
            "output": d_o * gate["output"] * (1.0 - gate["output"]),
        }
        x = cache.inputs[t]
        h_prev = cache.h_prev[t]
        d_x = np.zeros((batch, layer.input_dim))
        d_hidden = np.zeros((batch, layer.hidden_dim))
        for g in GATES:
            grads.weights[g] += d_pre[g].T @ x
            grads.recurrent[g] += d_pre[g].T @ h_prev
            grads.bias[g] += d_pre[g].sum(axis=0)
            d_x += d_pre[g] @ layer.weights[g]
            d_hidden += d_pre[g] @ layer.recurrent[g]
        d_inputs[:, t, :] = d_x
        d_cell = d_c * gate["forget"]
    return grads, d_inputs


def loss_and_gradients(
    params: NetworkParams, inputs: np.ndarray, targets: np.ndarray
) -> tuple[float, Gradients]:
    """MAE loss and its gradients over one batch."""
    caches = []
    seq = inputs
    for layer in params.layers:
        cache = _LayerCache()
        seq = _layer_forward(layer, seq, cache)
        caches.append(cache)
    final_hidden = seq[:, -1, :]
    pred = final_hidden @ params.dense_weight + params.dense_bias
    batch = inputs.shape[0]
    loss = mae_loss(pred, targets)
    d_pred = np.sign(pred - targets) / batch
    d_dense_w = final_hidden.T @ d_pred
    d_dense_b = float(d_pred.sum())
    d_out_seq = np.zeros_like(seq)
    d_out_seq[:, -1, :] = d_pred[:, None] * params.dense_weight
    layer_grads: list[LayerParams] = [None] * len(params.layers)  # type: ignore[list-item]
    for idx in reversed(range(len(params.layers))):
        grads, d_out_seq = _layer_backward(params.layers[idx], caches[idx], d_out_seq)
        layer_grads[idx] = grads
    return loss, Gradients(layers=layer_grads, dense_weight=d_dense_w, dense_bias=d_dense_b)


def _param_arrays(params: NetworkParams) -> list[np.ndarray]:
    arrays = []
    for layer in params.layers:
        for table in (layer.weights, layer.recurrent, layer.bias):
            for g in GATES:
                arrays.append(table[g])
    arrays.append(params.dense_weight)
    return arrays


def _grad_arrays(grads: Gradients) -> list[np.ndarray]:
    arrays = []
    for layer in grads.layers:
        for table in (layer.weights, layer.recurrent, layer.bias):
            for g in GATES:
                arrays.append(table[g])
    arrays.append(grads.dense_weight)
    return arrays


class Adam:
    def __init__(
        self,
        params: NetworkParams,
        learning_rate: float = 1e-3,
        beta1: float = 0.9,
        beta2: float = 0.999,
        epsilon: float = 1e-8,
    ) -> None:
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.step_count = 0
        arrays = _param_arrays(params)
        self._m = [np.zeros_like(a) for a in arrays]
        self._v = [np.zeros_like(a) for a in arrays]
        self._mb = 0.0
        self._vb = 0.0

    def step(self, params: NetworkParams, grads: Gradients) -> None:
        self.step_count += 1
        t = self.step_count
        bias_fix1 = 1.0 - self.beta1**t
        bias_fix2 = 1.0 - self.beta2**t
        for slot, (param, grad) in enumerate(zip(_param_arrays(params), _grad_arrays(grads))):
            m = self._m[slot]
            v = self._v[slot]
            m *= self.beta1
            m += (1.0 - self.beta1) * grad
            v *= self.beta2
            v += (1.0 - self.beta2) * grad * grad
            param -= self.learning_rate * (m / bias_fix1) / (np.sqrt(v / bias_fix2) + self.epsilon)
        self._mb = self.beta1 * self._mb + (1.0 - self.beta1) * grads.dense_bias
        self._vb = self.beta2 * self._vb + (1.0 - self.beta2) * grads.dense_bias**2
        params.dense_bias -= self.learning_rate * (self._mb / bias_fix1) / (
            np.sqrt(self._vb / bias_fix2) + self.epsilon
        )
