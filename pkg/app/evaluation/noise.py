from __future__ import annotations

import numpy as np
from scipy.special import ndtri

from app.bidding.sampling import make_rng
from app.models.evaluation import NoiseModel

# keeps ndtri finite at the ends of the uniform stream
_UNIFORM_EPS = 2.0**-53


def paired_draws(seed: int, chunk_index: int, size: int) -> tuple[np.ndarray, np.ndarray]:
    """(lambda, z) for one chunk: uniform offsets and standard normals by inverse CDF."""
    rng = make_rng(seed, chunk_index)
    lam = rng.random(size)
    z = ndtri(np.clip(rng.random(size), _UNIFORM_EPS, 1.0 - _UNIFORM_EPS))
    return lam, z


def thresholds(noise: NoiseModel, z: np.ndarray) -> np.ndarray:
    """u = u_hat * base**(sigma * z); the median of u is u_hat."""
    return noise.u_hat * np.exp(noise.log_sigma * z)
