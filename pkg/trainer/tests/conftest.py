import numpy as np
import pytest

from texvq_trainer.dataset import TrainingExample


def synthetic_examples(
    n_chunks: int,
    chunk_size: int = 8,
    seed: int = 123,
    noise: float = 1.0,
    groups: int | None = None,
    ssim_low: float = 0.5,
    ssim_weight: float = 100.0,
    energy_weight: float = 20.0,
) -> list[TrainingExample]:
    """Seeded chunks whose target is a pooled function of the SSIM and |r_E|
    columns plus Gaussian noise, the stand-in for a real encode corpus."""
    groups = groups or max(1, n_chunks // 10)
    rng = np.random.default_rng(seed)
    r_e = rng.normal(0.0, 5.0, (n_chunks, chunk_size))
    r_h = rng.normal(0.0, 2.0, (n_chunks, chunk_size))
    r_l = rng.normal(0.0, 3.0, (n_chunks, chunk_size))
    ssim = rng.uniform(ssim_low, 1.0, (n_chunks, chunk_size))
    max_abs_re = np.abs(r_e).max()
    base = np.clip(
        ssim_weight * ssim.mean(axis=1)
        - energy_weight * np.abs(r_e).mean(axis=1) / max_abs_re,
        0.0,
        100.0,
    )
    if noise > 0:
        base = np.clip(base + rng.normal(0.0, noise, n_chunks), 0.0, 100.0)
    examples = []
    for k in range(n_chunks):
        matrix = np.stack([r_e[k], r_h[k], r_l[k], ssim[k]], axis=1)
        examples.append(
            TrainingExample(
                matrix=matrix,
                target=float(base[k]),
                group=f"g{k % groups}",
                chunk_index=k,
            )
        )
    return examples


def ssim_only_examples(
    n_chunks: int, chunk_size: int = 8, seed: int = 77, groups: int | None = None
) -> list[TrainingExample]:
    """Noiseless chunks whose target depends only on the SSIM column."""
    groups = groups or max(1, n_chunks // 10)
    rng = np.random.default_rng(seed)
    r_e = rng.normal(0.0, 5.0, (n_chunks, chunk_size))
    r_h = rng.normal(0.0, 2.0, (n_chunks, chunk_size))
    r_l = rng.normal(0.0, 3.0, (n_chunks, chunk_size))
    ssim = rng.uniform(0.5, 1.0, (n_chunks, chunk_size))
    target = 100.0 * ssim.mean(axis=1)
    examples = []
    for k in range(n_chunks):
        matrix = np.stack([r_e[k], r_h[k], r_l[k], ssim[k]], axis=1)
        examples.append(
            TrainingExample(
                matrix=matrix,
                target=float(target[k]),
                group=f"g{k % groups}",
                chunk_index=k,
            )
        )
    return examples


@pytest.fixture
def small_examples():
    return synthetic_examples(60, chunk_size=4, seed=9, groups=12)
