"""Random single-qubit unitaries for the experiments."""

from __future__ import annotations

import numpy as np

from ..linalg.sampling import SeedLike, as_generator, haar_unitary


def haar_random_unitary(seed: SeedLike = None) -> np.ndarray:
    """A Haar-distributed 2 x 2 unitary."""
    return haar_unitary(2, as_generator(seed))


def haar_random_unitaries(n: int, seed: SeedLike = None) -> list[np.ndarray]:
    rng = as_generator(seed)
    return [haar_unitary(2, rng) for _ in range(n)]
