import numpy as np
import pytest

from texvq.fusion import (
    ResidualTriple,
    assemble_chunk_matrix,
    compute_residuals,
    lstm_forward,
    normalize_inputs,
    predict_chunk_score,
    score_segment,
)
from texvq.texture import FrameFeatures

from conftest import make_bundle
from reference_impls import scalar_lstm_predict


def features(values, index):
    energy, gradient, brightness = values
    return FrameFeatures(energy=energy, gradient=gradient, brightness=brightness, frame_index=index)


def triples(rows):
    return [
        ResidualTriple(energy=r[0], gradient=r[1], brightness=r[2], frame_index=i)
        for i, r in enumerate(rows)
    ]


class TestComputeResiduals:
    def test_identical_features_give_exact_zero(self):
        orig = [features((10.5, 2.25, 128.0), i) for i in range(4)]
        recon = [features((10.5, 2.25, 128.0), i) for i in range(4)]
        for r in compute_residuals(orig, recon):
            assert (r.energy, r.gradient, r.brightness) == (0.0, 0.0, 0.0)

    def test_original_minus_reconstructed(self):
        orig = [features((10.0, 3.0, 120.0), 0)]
        recon = [features((4.0, 1.0, 100.0), 0)]
        r = compute_residuals(orig, recon)[0]
        assert (r.energy, r.gradient, r.brightness) == (6.0, 2.0, 20.0)

    def test_length_mismatch(self):
        orig = [features((0, 0, 0), i) for i in range(8)]
        recon = [features((0, 0, 0), i) for i in range(7)]
        with pytest.raises(ValueError, match="length"):
            compute_residuals(orig, recon)

    def test_index_mismatch(self):
        orig = [features((0, 0, 0), 0)]
        recon = [features((0, 0, 0), 5)]
        with pytest.raises(ValueError, match="index"):
            compute_residuals(orig, recon)


class TestAssembleChunkMatrix:
    def test_identical_video_rows(self):
        matrix = assemble_chunk_matrix(triples([(0, 0, 0)] * 8), [1.0] * 8)
        assert matrix.shape == (8, 4)
        assert np.array_equal(matrix, np.tile([0.0, 0.0, 0.0, 1.0], (8, 1)))

    def test_column_order(self):
        matrix = assemble_chunk_matrix(triples([(1.0, 2.0, 3.0)]), [0.5])
        assert matrix.tolist() == [[1.0, 2.0, 3.0, 0.5]]

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            assemble_chunk_matrix(triples([(0, 0, 0)] * 7), [1.0] * 8)


class TestNormalizeInputs:
    def test_identity_stats(self):
        bundle = make_bundle(hidden=2, chunk_size=2)
        matrix = np.array([[1.0, 2.0, 3.0, 4.0], [5.0, 6.0, 7.0, 8.0]])
        assert np.array_equal(normalize_inputs(matrix, bundle), matrix)

    def test_zscore(self):
        bundle = make_bundle(hidden=2, chunk_size=1, norm_mean=[5, 5, 5, 5], norm_std=[2, 2, 2, 2])
        matrix = np.array([[5.0, 9.0, 1.0, 7.0]])
        assert normalize_inputs(matrix, bundle).tolist() == [[0.0, 2.0, -2.0, 1.0]]


class TestLstmForward:
    def test_zero_weights_give_zero_state(self):
        bundle = make_bundle(hidden=4, chunk_size=3)
        matrix = np.ones((3, 4))
        assert np.all(lstm_forward(matrix, bundle) == 0.0)

    def test_blocked_forget_and_zero_candidate(self):
        bundle = make_bundle(hidden=4, chunk_size=3)
        bundle.lstm.bias["forget"][:] = -50.0
        matrix = np.full((3, 4), 2.5)
        assert np.all(lstm_forward(matrix, bundle) == 0.0)

    @pytest.mark.parametrize("hidden,chunk", [(3, 2), (1, 1), (8, 8)])
    def test_matches_scalar_reference(self, hidden, chunk):
        bundle = make_bundle(hidden=hidden, chunk_size=chunk, seed=hidden * 10 + chunk)
        rng = np.random.default_rng(99)
        matrix = rng.normal(0.0, 1.0, (chunk, 4))
        got = predict_chunk_score(matrix, bundle)
        want = scalar_lstm_predict(matrix.tolist(), bundle)
        assert got == pytest.approx(want, abs=1e-12)


class TestPredictChunkScore:
    def test_bias_only(self):
        bundle = make_bundle(hidden=4, chunk_size=8, dense_bias=42.0)
        matrix = np.zeros((8, 4))
        assert predict_chunk_score(matrix, bundle) == 42.0

    def test_clamped_high(self):
        bundle = make_bundle(hidden=4, chunk_size=8, dense_bias=150.0)
        assert predict_chunk_score(np.zeros((8, 4)), bundle) == 100.0

    def test_clamped_low(self):
        bundle = make_bundle(hidden=4, chunk_size=8, dense_bias=-7.0)
        assert predict_chunk_score(np.zeros((8, 4)), bundle) == 0.0

    def test_shape_mismatch(self):
        bundle = make_bundle(hidden=4, chunk_size=8)
        with pytest.raises(ValueError, match="shape"):
            predict_chunk_score(np.zeros((7, 4)), bundle)


class TestScoreSegment:
    def test_mean(self):
        assert score_segment([80.0, 90.0]) == 85.0

    def test_single(self):
        assert score_segment([63.2]) == 63.2

    def test_empty(self):
        with pytest.raises(ValueError, match="empty"):
            score_segment([])
