"""AWGN channel and reproducible per-trial random streams."""

from __future__ import annotations

import numpy as np

__all__ = [
    "ebn0_to_noise_var",
    "awgn",
    "trial_rng",
]


def ebn0_to_noise_var(ebn0_db: float, spectral_eff: float) -> float:
    """Per-dimension noise variance for unit-energy symbols.

    Es/N0 = eta * Eb/N0, and N0 = 2 * sigma^2 per complex symbol, so
    sigma^2 = 1 / (2 * eta * 10^(Eb/N0[dB]/10)).
    """
    if spectral_eff <= 0:
        raise ValueError(f"spectral efficiency must be positive, got {spectral_eff}")
    return 1.0 / (2.0 * spectral_eff * 10.0 ** (ebn0_db / 10.0))


def awgn(symbols: np.ndarray, noise_var: float, rng: np.random.Generator) -> np.ndarray:
    """Add circular complex Gaussian noise with the given per-dimension
    variance."""
    if noise_var < 0:
        raise ValueError(f"noise variance must be non-negative, got {noise_var}")
    scale = np.sqrt(noise_var)
    noise = rng.normal(0.0, scale, symbols.shape) + 1j * rng.normal(
        0.0, scale, symbols.shape
    )
    return symbols + noise


def trial_rng(master_seed: int, point_idx: int, trial_idx: int) -> np.random.Generator:
    """Independent substream for one (sweep point, trial) pair.

    Spawn keys make the stream a pure function of the coordinates, so
    results do not depend on worker count or scheduling order.
    """
    ss = np.random.SeedSequence(entropy=master_seed,
                                spawn_key=(point_idx, trial_idx))
    return np.random.default_rng(ss)
