import math

import numpy as np
import pytest

from texvq_trainer.dataset import SplitSpec
from texvq_trainer.network import forward
from texvq_trainer.training import (
    Hyperparams,
    TrainingDivergedError,
    compute_norm_stats,
    train_model,
    tune,
)

from conftest import ssim_only_examples, synthetic_examples


FAST = Hyperparams(hidden_dims=(12,), learning_rate=0.005, batch_size=16, epochs=8, patience=8, seed=2)


class TestNormStats:
    def test_mean_and_std(self, small_examples):
        norm = compute_norm_stats(small_examples)
        rows = np.concatenate([e.matrix for e in small_examples], axis=0)
        assert np.allclose(norm.mean, rows.mean(axis=0))
        assert np.allclose(norm.std, rows.std(axis=0))
        assert np.all(norm.std > 0)

    def test_constant_column_gets_unit_scale(self, small_examples):
        frozen = []
        for e in small_examples:
            m = e.matrix.copy()
            m[:, 1] = 7.0
            frozen.append(type(e)(matrix=m, target=e.target, group=e.group, chunk_index=e.chunk_index))
        norm = compute_norm_stats(frozen)
        assert norm.std[1] == 1.0


class TestTrainModel:
    def test_zero_epochs_keeps_initialization(self, small_examples):
        hp = Hyperparams(hidden_dims=(6,), epochs=0, seed=4)
        result = train_model(small_examples, split=SplitSpec(seed=1), hyperparams=hp)
        from texvq_trainer.network import init_params

        rng = np.random.default_rng(4)
        train, _, _ = __import__("texvq_trainer.dataset", fromlist=["split_examples"]).split_examples(
            small_examples, SplitSpec(seed=1)
        )
        targets = np.array([e.target for e in train])
        fresh = init_params(rng, [6], output_bias=float(targets.mean()))
        x = np.random.default_rng(0).normal(0.0, 1.0, (3, 4, 4))
        assert np.array_equal(forward(result.params, x), forward(fresh, x))

    def test_empty_train_split_rejected(self, small_examples):
        with pytest.raises(ValueError, match="sum"):
            train_model(small_examples, split=SplitSpec(train=0.0, validation=0.0, test=0.0))

    def test_reference_configuration_shape(self, small_examples):
        hp = Hyperparams(epochs=0, seed=1)  # default single layer of 200 cells
        result = train_model(small_examples, hyperparams=hp)
        assert result.params.layers[0].hidden_dim == 200
        assert result.params.layers[0].input_dim == 4
        assert result.params.dense_weight.shape == (200,)

    def test_reports_metrics(self, small_examples):
        result = train_model(small_examples, split=SplitSpec(seed=2), hyperparams=FAST)
        assert result.train_mae >= 0.0
        assert math.isfinite(result.validation_mae)
        assert result.test_mae is not None and result.test_mae >= 0.0
        assert result.test_pcc is None or -1.0 <= result.test_pcc <= 1.0
        assert result.epochs_run == len(result.history)

    def test_history_monotone_on_noiseless_ssim_target(self):
        examples = ssim_only_examples(300, groups=30)
        hp = Hyperparams(hidden_dims=(48,), learning_rate=0.004, batch_size=32, epochs=5, patience=5, seed=3)
        result = train_model(examples, split=SplitSpec(seed=9), hyperparams=hp)
        val = [h["validation_mae"] for h in result.history[:5]]
        assert len(val) == 5
        assert all(a > b for a, b in zip(val, val[1:]))

    def test_noiseless_ssim_target_reaches_low_mae(self):
        examples = ssim_only_examples(400, groups=40)
        hp = Hyperparams(hidden_dims=(48,), learning_rate=0.004, batch_size=32, epochs=120, patience=25, seed=3)
        result = train_model(examples, split=SplitSpec(seed=9), hyperparams=hp)
        assert result.validation_mae <= 1.0

    def test_divergence_detected(self, small_examples):
        poisoned = list(small_examples)
        bad = poisoned[0].matrix.copy()
        bad[0, 0] = np.nan
        poisoned[0] = type(poisoned[0])(
            matrix=bad, target=poisoned[0].target, group=poisoned[0].group, chunk_index=0
        )
        with pytest.raises(TrainingDivergedError):
            train_model(poisoned, split=SplitSpec(train=1.0, validation=0.0, test=0.0), hyperparams=FAST)

    def test_mixed_chunk_sizes_rejected(self, small_examples):
        mixed = list(small_examples)
        wrong = np.zeros((6, 4))
        mixed.append(type(mixed[0])(matrix=wrong, target=50.0, group="odd", chunk_index=0))
        with pytest.raises(ValueError, match="chunk size"):
            train_model(mixed, hyperparams=FAST)


class TestTune:
    def test_single_point_grid(self, small_examples):
        best_hp, best_result, trials = tune(small_examples, [FAST], split=SplitSpec(seed=2))
        assert best_hp == FAST
        assert len(trials) == 1

    def test_known_good_config_wins(self):
        examples = ssim_only_examples(200, groups=20)
        good = Hyperparams(hidden_dims=(32,), learning_rate=0.004, batch_size=32, epochs=40, patience=40, seed=3)
        bad = Hyperparams(hidden_dims=(2,), learning_rate=1e-5, batch_size=64, epochs=2, patience=2, seed=3)
        best_hp, best_result, trials = tune(examples, [bad, good], split=SplitSpec(seed=9))
        assert best_hp == good
        assert best_result.validation_mae == min(t["validation_mae"] for t in trials)

    def test_tie_break_keeps_grid_order(self, small_examples):
        best_hp, _, trials = tune(small_examples, [FAST, FAST], split=SplitSpec(seed=2))
        assert best_hp is trials[0]["hyperparams"]
        assert trials[0]["validation_mae"] == trials[1]["validation_mae"]

    def test_empty_grid(self, small_examples):
        with pytest.raises(ValueError, match="empty"):
            tune(small_examples, [])

    def test_layer_count_dimension(self, small_examples):
        shallow = Hyperparams(hidden_dims=(8,), epochs=2, patience=2, seed=5)
        deep = Hyperparams(hidden_dims=(8, 8), epochs=2, patience=2, seed=5)
        best_hp, _, trials = tune(small_examples, [shallow, deep], split=SplitSpec(seed=2))
        assert len(trials) == 2
        assert best_hp in (shallow, deep)
