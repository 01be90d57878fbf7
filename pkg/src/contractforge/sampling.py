"""Latin hypercube sampling for the schedulability sweeps."""

from __future__ import annotations

from typing import Sequence

import numpy as np


def latin_hypercube_sample(
    n: int, dims: Sequence[tuple[float, float]], seed: int | np.random.Generator = 0
) -> np.ndarray:
    """``n`` points stratified independently along each dimension.

    Each dimension's ``n`` values land in distinct equal-width strata of
    [low, high); the position inside a stratum is uniform.  Deterministic
    for a fixed seed.  Returns an (n, len(dims)) array.
    """
    if n < 1:
        raise ValueError("need at least one sample")
    for low, high in dims:
        if not low < high:
            raise ValueError(f"empty dimension range [{low}, {high}]")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    out = np.empty((n, len(dims)))
    for d, (low, high) in enumerate(dims):
        order = rng.permutation(n)
        jitter = rng.random(n)
        out[:, d] = low + (order + jitter) * (high - low) / n
    return out
