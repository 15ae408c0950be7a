import numpy as np
import pytest

from texvq.model import (
    FEATURE_ORDER,
    FORMAT_VERSION,
    GATE_ORDER,
    LstmWeights,
    ModelBundle,
)
from texvq.video_io import Frame, StreamInfo, write_y4m


def make_constant_frame(value: int, index: int = 0, size: tuple[int, int] = (64, 64)) -> Frame:
    return Frame(luma=np.full(size, value, dtype=np.uint8), index=index)


def make_noise_frame(
    seed: int,
    index: int = 0,
    size: tuple[int, int] = (64, 64),
    base: int = 128,
    amplitude: float = 64.0,
) -> Frame:
    rng = np.random.default_rng(seed)
    unit = rng.uniform(-1.0, 1.0, size)
    samples = np.clip(np.rint(base + amplitude * unit), 0, 255).astype(np.uint8)
    return Frame(luma=samples, index=index)


def make_gradient_frames(
    count: int, size: tuple[int, int] = (64, 64), seed: int = 5
) -> list[Frame]:
    """Deterministic moving-texture sequence with real temporal activity."""
    rng = np.random.default_rng(seed)
    base = rng.integers(0, 256, size, dtype=np.uint8)
    return [Frame(luma=np.roll(base, shift=3 * t, axis=1), index=t) for t in range(count)]


def offset_frame(frame: Frame, offset: int) -> Frame:
    shifted = np.clip(frame.luma.astype(np.int32) + offset, 0, 255).astype(np.uint8)
    return Frame(luma=shifted, index=frame.index)


def make_bundle(
    hidden: int = 4,
    chunk_size: int = 8,
    seed: int | None = None,
    scale: float = 0.4,
    dense_bias: float = 0.0,
    norm_mean=None,
    norm_std=None,
    provenance: str = "test bundle",
) -> ModelBundle:
    """Random or all-zero (seed None) model bundle for tests."""
    if seed is None:
        weights = {g: np.zeros((hidden, 4)) for g in GATE_ORDER}
        recurrent = {g: np.zeros((hidden, hidden)) for g in GATE_ORDER}
        bias = {g: np.zeros(hidden) for g in GATE_ORDER}
        dense_weight = np.zeros(hidden)
    else:
        rng = np.random.default_rng(seed)
        weights = {g: rng.normal(0.0, scale, (hidden, 4)) for g in GATE_ORDER}
        recurrent = {g: rng.normal(0.0, scale, (hidden, hidden)) for g in GATE_ORDER}
        bias = {g: rng.normal(0.0, scale, hidden) for g in GATE_ORDER}
        dense_weight = rng.normal(0.0, 1.0, hidden)
    return ModelBundle(
        format_version=FORMAT_VERSION,
        chunk_size=chunk_size,
        feature_order=FEATURE_ORDER,
        norm_mean=np.zeros(4) if norm_mean is None else np.asarray(norm_mean, dtype=np.float64),
        norm_std=np.ones(4) if norm_std is None else np.asarray(norm_std, dtype=np.float64),
        lstm=LstmWeights(
            input_dim=4,
            hidden_dim=hidden,
            weights=weights,
            recurrent=recurrent,
            bias=bias,
        ),
        dense_weight=dense_weight,
        dense_bias=dense_bias,
        provenance=provenance,
    )


def write_test_y4m(path, frames: list[Frame], frame_rate=(30, 1)) -> None:
    height, width = frames[0].luma.shape
    write_y4m(path, frames, StreamInfo(width=width, height=height, frame_rate=frame_rate))


@pytest.fixture
def constant_video(tmp_path):
    """3-frame constant-128 64x64 Y4M file."""
    path = tmp_path / "constant.y4m"
    frames = [make_constant_frame(128, i) for i in range(3)]
    write_test_y4m(path, frames)
    return path
