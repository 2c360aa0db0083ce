"""APEP versus magic capacity over random single-qubit unitaries."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..core.clifford_moments import avg_apep_infinite
from ..core.magic_capacity import magic_capacity
from ..linalg.channels import unitary_channel
from ..linalg.sampling import spawn_seeds
from ..models import SweepRow
from .sampling import haar_random_unitary

logger = logging.getLogger(__name__)


def sweep_unitary(index: int, u: np.ndarray, k_max: int) -> list[SweepRow]:
    """Capacity of u and its large-L Clifford APEP for k = 1..k_max."""
    capacity = magic_capacity(unitary_channel(u))
    return [SweepRow(index, capacity, k, avg_apep_infinite(u, k)) for k in range(1, k_max + 1)]


def sweep_apep_vs_capacity(
    n_unitaries: int = 1000,
    k_max: int = 20,
    seed: int | None = None,
    threads: int = 1,
    unitaries: list[np.ndarray] | None = None,
) -> list[SweepRow]:
    """Rows ordered by unitary index, then k.

    Unitary i is drawn from child stream i of the seed, so the dataset does not
    depend on the thread count. Passing `unitaries` skips the sampling.
    """
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    if unitaries is None:
        if n_unitaries < 1:
            raise ValueError(f"n_unitaries must be >= 1, got {n_unitaries}")
        unitaries = [haar_random_unitary(s) for s in spawn_seeds(seed, n_unitaries)]

    def task(item: tuple[int, np.ndarray]) -> list[SweepRow]:
        index, u = item
        rows = sweep_unitary(index, u, k_max)
        if (index + 1) % 100 == 0:
            logger.info("Sweep: %d/%d unitaries done", index + 1, len(unitaries))
        return rows

    items = list(enumerate(unitaries))
    if threads <= 1:
        chunks = [task(item) for item in items]
    else:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            chunks = list(executor.map(task, items))
    return [row for chunk in chunks for row in chunk]
