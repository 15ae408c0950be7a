import numpy as np
import pytest

from texvq_trainer.network import (
    Adam,
    GATES,
    _grad_arrays,
    _param_arrays,
    forward,
    init_params,
    loss_and_gradients,
    mae_loss,
    predict,
)


@pytest.fixture
def rng():
    return np.random.default_rng(42)


class TestInit:
    def test_shapes_single_layer(self, rng):
        params = init_params(rng, [16])
        layer = params.layers[0]
        for g in GATES:
            assert layer.weights[g].shape == (16, 4)
            assert layer.recurrent[g].shape == (16, 16)
            assert layer.bias[g].shape == (16,)
        assert params.dense_weight.shape == (16,)

    def test_shapes_stacked(self, rng):
        params = init_params(rng, [8, 5])
        assert params.layers[1].weights["input"].shape == (5, 8)
        assert params.dense_weight.shape == (5,)

    def test_forget_bias_is_one(self, rng):
        params = init_params(rng, [6])
        assert np.all(params.layers[0].bias["forget"] == 1.0)
        assert np.all(params.layers[0].bias["input"] == 0.0)

    def test_recurrent_orthogonal(self, rng):
        params = init_params(rng, [10])
        u = params.layers[0].recurrent["candidate"]
        assert np.allclose(u @ u.T, np.eye(10), atol=1e-10)

    def test_output_bias_seed(self, rng):
        params = init_params(rng, [4], output_bias=63.0)
        assert forward(params, np.zeros((1, 3, 4)))[0] != 0.0
        assert params.dense_bias == 63.0


class TestForward:
    def test_batch_matches_single(self, rng):
        params = init_params(rng, [6], output_bias=10.0)
        x = rng.normal(0.0, 1.0, (5, 8, 4))
        batched = forward(params, x)
        singles = np.array([forward(params, x[i : i + 1])[0] for i in range(5)])
        assert np.allclose(batched, singles, atol=1e-12)

    def test_predict_clamps(self, rng):
        params = init_params(rng, [4], output_bias=150.0)
        x = np.zeros((2, 3, 4))
        assert np.all(predict(params, x) == 100.0)
        params.dense_bias = -40.0
        assert np.all(predict(params, x) == 0.0)

    def test_deterministic(self, rng):
        params = init_params(rng, [6])
        x = rng.normal(0.0, 1.0, (3, 4, 4))
        assert np.array_equal(forward(params, x), forward(params, x))


class TestGradients:
    @pytest.mark.parametrize("hidden_dims", [[5], [4, 3]])
    def test_matches_finite_differences(self, hidden_dims):
        rng = np.random.default_rng(7)
        params = init_params(rng, hidden_dims, output_bias=50.0)
        x = rng.normal(0.0, 1.0, (4, 5, 4))
        y = rng.uniform(10.0, 90.0, 4)
        _, grads = loss_and_gradients(params, x, y)

        def numeric(arr, flat_index, step=1e-5):
            flat = arr.reshape(-1)
            old = flat[flat_index]
            flat[flat_index] = old + step
            plus, _ = loss_and_gradients(params, x, y)
            flat[flat_index] = old - step
            minus, _ = loss_and_gradients(params, x, y)
            flat[flat_index] = old
            return (plus - minus) / (2.0 * step)

        check = np.random.default_rng(11)
        worst = 0.0
        for p_arr, g_arr in zip(_param_arrays(params), _grad_arrays(grads)):
            for _ in range(3):
                i = int(check.integers(0, p_arr.size))
                worst = max(worst, abs(numeric(p_arr, i) - g_arr.reshape(-1)[i]))
        assert worst < 1e-8

    def test_dense_bias_gradient(self):
        rng = np.random.default_rng(8)
        params = init_params(rng, [3], output_bias=0.0)
        x = rng.normal(0.0, 1.0, (6, 2, 4))
        y = np.full(6, 90.0)  # predictions start far below targets
        _, grads = loss_and_gradients(params, x, y)
        assert grads.dense_bias == pytest.approx(-1.0)  # mean of sign(pred - y)


class TestAdam:
    def test_loss_decreases_on_toy_problem(self):
        rng = np.random.default_rng(9)
        x = rng.normal(0.0, 1.0, (32, 4, 4))
        y = 10.0 * x[:, :, 3].mean(axis=1) + 50.0
        params = init_params(rng, [8], output_bias=float(y.mean()))
        optimizer = Adam(params, learning_rate=0.01)
        first, grads = loss_and_gradients(params, x, y)
        for _ in range(200):
            loss, grads = loss_and_gradients(params, x, y)
            optimizer.step(params, grads)
        final = mae_loss(forward(params, x), y)
        assert final < first * 0.2

    def test_step_is_deterministic(self):
        results = []
        for _ in range(2):
            rng = np.random.default_rng(10)
            params = init_params(rng, [4], output_bias=5.0)
            x = rng.normal(0.0, 1.0, (8, 3, 4))
            y = rng.uniform(0.0, 100.0, 8)
            optimizer = Adam(params, learning_rate=0.005)
            for _ in range(5):
                _, grads = loss_and_gradients(params, x, y)
                optimizer.step(params, grads)
            results.append(forward(params, x).copy())
        assert np.array_equal(results[0], results[1])
