"""Training loop with MAE loss, Adam, early stopping, and grid search."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .dataset import SplitSpec, TrainingExample, split_examples
from .network import Adam, NetworkParams, forward, init_params, mae_loss, loss_and_gradients, predict


class TrainingDivergedError(RuntimeError):
    """Loss became non-finite; training aborted."""


@dataclass(frozen=True)
class Hyperparams:
    hidden_dims: tuple[int, ...] = (200,)
    learning_rate: float = 1e-3
    batch_size: int = 64
    epochs: int = 200
    patience: int = 20
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.hidden_dims or min(self.hidden_dims) < 1:
            raise ValueError("hidden_dims must name at least one positive layer width")
        if self.batch_size < 1 or self.epochs < 0 or self.patience < 0:
            raise ValueError("batch_size >= 1, epochs >= 0 and patience >= 0 required")


@dataclass(frozen=True)
class NormStats:
    mean: np.ndarray = field(repr=False)
    std: np.ndarray = field(repr=False)


@dataclass
class TrainResult:
    params: NetworkParams
    norm: NormStats
    chunk_size: int
    hyperparams: Hyperparams
    train_mae: float
    validation_mae: float
    test_pcc: float | None
    test_mae: float | None
    history: list[dict]
    epochs_run: int


def _stack(examples: list[TrainingExample]) -> tuple[np.ndarray, np.ndarray]:
    inputs = np.stack([e.matrix for e in examples]).astype(np.float64)
    targets = np.array([e.target for e in examples], dtype=np.float64)
    return inputs, targets


def compute_norm_stats(examples: list[TrainingExample]) -> NormStats:
    """Per-column z-score statistics over all frames of the given examples.

    A constant column gets unit scale so normalization stays well-defined
    and the exported std remains positive.
    """
    rows = np.concatenate([e.matrix for e in examples], axis=0)
    mean = rows.mean(axis=0)
    std = rows.std(axis=0)
    std[std < 1e-12] = 1.0
    return NormStats(mean=mean, std=std)


def _normalize(inputs: np.ndarray, norm: NormStats) -> np.ndarray:
    return (inputs - norm.mean) / norm.std


def _pearson(a: np.ndarray, b: np.ndarray) -> float | None:
    if a.size < 2:
        return None
    da = a - a.mean()
    db = b - b.mean()
    denom = math.sqrt(float((da * da).sum()) * float((db * db).sum()))
    if denom == 0.0:
        return None
    return float((da * db).sum() / denom)


def train_model(
    examples: list[TrainingExample],
    split: SplitSpec | None = None,
    hyperparams: Hyperparams | None = None,
    chunk_size: int | None = None,
) -> TrainResult:
    """Train the fusion network and report train/val MAE and test PCC/MAE.

    Normalization statistics come from the training partition only and are
    frozen into the result. Early stopping restores the best-validation
    parameters; with no validation split the final parameters are kept.
    """
    split = split or SplitSpec()
    hp = hyperparams or Hyperparams()
    train, val, test = split_examples(examples, split)
    if not train:
        raise ValueError("training split is empty")
    sizes = {e.matrix.shape[0] for e in examples}
    if len(sizes) != 1:
        raise ValueError(f"examples disagree on chunk size: {sorted(sizes)}")
    inferred = sizes.pop()
    if chunk_size is not None and chunk_size != inferred:
        raise ValueError(f"chunk_size {chunk_size} but matrices have {inferred} rows")

    norm = compute_norm_stats(train)
    train_x, train_y = _stack(train)
    train_x = _normalize(train_x, norm)
    if val:
        val_x, val_y = _stack(val)
        val_x = _normalize(val_x, norm)

    rng = np.random.default_rng(hp.seed)
    params = init_params(rng, list(hp.hidden_dims), output_bias=float(train_y.mean()))
    optimizer = Adam(params, learning_rate=hp.learning_rate)

    best_params = params.copy()
    best_val = math.inf
    stale = 0
    history: list[dict] = []
    epochs_run = 0
    for epoch in range(hp.epochs):
        order = rng.permutation(train_x.shape[0])
        epoch_losses = []
        for start in range(0, order.size, hp.batch_size):
            batch = order[start : start + hp.batch_size]
            loss, grads = loss_and_gradients(params, train_x[batch], train_y[batch])
            if not math.isfinite(loss):
                raise TrainingDivergedError(
                    f"non-finite loss {loss} at epoch {epoch}, step {start // hp.batch_size}"
                )
            optimizer.step(params, grads)
            epoch_losses.append(loss)
        epochs_run = epoch + 1
        train_mae_epoch = mae_loss(forward(params, train_x), train_y)
        record = {"epoch": epoch, "train_mae": train_mae_epoch}
        if val:
            val_mae_epoch = mae_loss(predict(params, val_x), val_y)
            record["validation_mae"] = val_mae_epoch
            if val_mae_epoch < best_val:
                best_val = val_mae_epoch
                best_params = params.copy()
                stale = 0
            else:
                stale += 1
        history.append(record)
        if val and stale > hp.patience:
            break

    if val and best_val < math.inf:
        params = best_params
        validation_mae = best_val
    elif val:
        validation_mae = mae_loss(predict(params, val_x), val_y)
    else:
        validation_mae = math.nan

    train_mae = mae_loss(forward(params, train_x), train_y)
    test_pcc = test_mae = None
    if test:
        test_x, test_y = _stack(test)
        test_pred = predict(params, _normalize(test_x, norm))
        test_pcc = _pearson(test_pred, test_y)
        test_mae = mae_loss(test_pred, test_y)

    return TrainResult(
        params=params,
        norm=norm,
        chunk_size=inferred,
        hyperparams=hp,
        train_mae=train_mae,
        validation_mae=validation_mae,
        test_pcc=test_pcc,
        test_mae=test_mae,
        history=history,
        epochs_run=epochs_run,
    )


def tune(
    examples: list[TrainingExample],
    grid: list[Hyperparams],
    split: SplitSpec | None = None,
) -> tuple[Hyperparams, TrainResult, list[dict]]:
    """Exhaustive grid search; lowest validation MAE wins, ties keep grid order."""
    if not grid:
        raise ValueError("hyperparameter grid is empty")
    best: tuple[Hyperparams, TrainResult] | None = None
    trials = []
    for hp in grid:
        result = train_model(examples, split=split, hyperparams=hp)
        trials.append(
            {
                "hyperparams": hp,
                "validation_mae": result.validation_mae,
                "train_mae": result.train_mae,
            }
        )
        if best is None or result.validation_mae < best[1].validation_mae:
            best = (hp, result)
    assert best is not None
    return best[0], best[1], trials


def retrain_reference(
    examples: list[TrainingExample],
    hyperparams: Hyperparams | None = None,
    split: SplitSpec | None = None,
) -> TrainResult:
    """Reference configuration: single 200-cell layer, 4 inputs."""
    hp = hyperparams or Hyperparams()
    if hp.hidden_dims != (200,):
        hp = replace(hp, hidden_dims=(200,))
    return train_model(examples, split=split, hyperparams=hp)
