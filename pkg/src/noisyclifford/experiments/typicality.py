"""Typicality scans: how much the metrics vary across random Clifford encoders as L grows."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.stats import permutation_test, spearmanr

from ..core.nonlocal_magic import apep_single_copy
from ..core.scrambling import aotoc_state_sample
from ..linalg.channels import encode_decode_channel, unitary_channel
from ..linalg.sampling import haar_state, haar_unitary, spawn_seeds
from ..models import Bipartition, TypicalityRecord
from ..stabilizer.tableau import random_clifford

logger = logging.getLogger(__name__)

# Dense Clifford synthesis for the A-OTOC estimator goes up to L = 8
AOTOC_TABLEAU_CAP = 8


def _check_ranges(l_values: Sequence[int], k_values: Sequence[int], **counts: int) -> None:
    if not l_values or not k_values:
        raise ValueError("L and k ranges must be nonempty")
    if min(l_values) < 1 or min(k_values) < 1:
        raise ValueError("L and k values must be >= 1")
    for name, value in counts.items():
        if value < 2 and name.startswith("n_c"):
            raise ValueError(f"{name} must be >= 2 to form a variance, got {value}")
        if value < 1:
            raise ValueError(f"{name} must be >= 1, got {value}")


def apep_clifford_values(u: np.ndarray, k: int, n_qubits: int, n_c: int, rng: np.random.Generator) -> np.ndarray:
    """Single-copy APEP of C^dagger (u^{(x)k} (x) I) for n_c random Cliffords C."""
    cut = Bipartition.symmetric(n_qubits)
    return np.array(
        [apep_single_copy(random_clifford(n_qubits, rng), u, k, n_qubits, cut) for _ in range(n_c)]
    )


def aotoc_clifford_values(
    v: np.ndarray,
    k: int,
    n_qubits: int,
    n_c: int,
    n_psi: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """State-form A-OTOC estimate of the channel C^dagger (V^{(x)k} (x) id) C for n_c random Cliffords."""
    cut = Bipartition.symmetric(n_qubits)
    noise = unitary_channel(v)
    out = np.empty(n_c)
    for i in range(n_c):
        c = random_clifford(n_qubits, rng).to_dense(cap=AOTOC_TABLEAU_CAP).matrix
        channel = encode_decode_channel(c, noise, k, n_qubits)
        out[i] = np.mean([aotoc_state_sample(channel, cut, haar_state(cut.d_A, rng)) for _ in range(n_psi)])
    return out


def _scan(
    name: str,
    l_values: Sequence[int],
    k_values: Sequence[int],
    n_unitaries: int,
    per_unitary: Callable[[np.ndarray, int, int, np.random.Generator], np.ndarray],
    seed: int | None,
    threads: int,
    unitaries: Sequence[np.ndarray] | None,
) -> list[TypicalityRecord]:
    pairs = [(n, k) for n in l_values for k in k_values if k <= n]
    streams = spawn_seeds(seed, len(pairs))
    records = []
    for (n, k), stream in zip(pairs, streams):
        children = stream.spawn(n_unitaries)

        def task(j: int) -> float:
            rng = np.random.default_rng(children[j])
            u = unitaries[j] if unitaries is not None else haar_unitary(2, rng)
            return float(np.var(per_unitary(u, k, n, rng), ddof=1))

        if threads <= 1:
            variances = [task(j) for j in range(n_unitaries)]
        else:
            with ThreadPoolExecutor(max_workers=threads) as executor:
                variances = list(executor.map(task, range(n_unitaries)))

        arr = np.array(variances)
        stderr = float(arr.std(ddof=1) / np.sqrt(len(arr))) if len(arr) > 1 else 0.0
        record = TypicalityRecord(L=n, k=k, variances=variances, mean_variance=float(arr.mean()), stderr_of_mean_variance=stderr)
        logger.info("%s typicality L=%d k=%d: mean variance %.6g +- %.2g", name, n, k, record.mean_variance, stderr)
        records.append(record)
    return records


def typicality_apep(
    l_values: Iterable[int] = range(3, 9),
    n_u: int = 4,
    n_c: int = 12,
    k_values: Iterable[int] = range(1, 4),
    seed: int | None = None,
    threads: int = 1,
    unitaries: Sequence[np.ndarray] | None = None,
) -> list[TypicalityRecord]:
    """Per (L, k): variance over n_c Cliffords of the single-copy APEP, averaged over n_u unitaries.

    Pairs with k > L are skipped. Passing `unitaries` (length n_u) replaces the
    Haar draws.
    """
    l_values, k_values = list(l_values), list(k_values)
    _check_ranges(l_values, k_values, n_u=n_u, n_c=n_c)
    if unitaries is not None and len(unitaries) != n_u:
        raise ValueError(f"expected {n_u} unitaries, got {len(unitaries)}")

    def per_unitary(u: np.ndarray, k: int, n: int, rng: np.random.Generator) -> np.ndarray:
        return apep_clifford_values(u, k, n, n_c, rng)

    return _scan("APEP", l_values, k_values, n_u, per_unitary, seed, threads, unitaries)


def typicality_aotoc(
    l_values: Iterable[int] = range(4, 9),
    n_psi: int = 8,
    n_c: int = 50,
    n_v: int = 10,
    k_values: Iterable[int] = range(1, 4),
    seed: int | None = None,
    threads: int = 1,
    unitaries: Sequence[np.ndarray] | None = None,
) -> list[TypicalityRecord]:
    """Per (L, k): variance over n_c Cliffords of the state-form A-OTOC, averaged over n_v noise unitaries."""
    l_values, k_values = list(l_values), list(k_values)
    _check_ranges(l_values, k_values, n_psi=n_psi, n_c=n_c, n_v=n_v)
    if max(l_values) > AOTOC_TABLEAU_CAP:
        raise ValueError(f"A-OTOC typicality supports L <= {AOTOC_TABLEAU_CAP}, got {max(l_values)}")
    if unitaries is not None and len(unitaries) != n_v:
        raise ValueError(f"expected {n_v} noise unitaries, got {len(unitaries)}")

    def per_unitary(v: np.ndarray, k: int, n: int, rng: np.random.Generator) -> np.ndarray:
        return aotoc_clifford_values(v, k, n, n_c, n_psi, rng)

    return _scan("A-OTOC", l_values, k_values, n_v, per_unitary, seed, threads, unitaries)


def decreasing_trend(l_values: Sequence[int], values: Sequence[float]) -> tuple[float, float]:
    """Spearman rho of values against L and its exact one-sided p-value for a decrease.

    The p-value enumerates every reordering of `values` (n! of them), so it is
    exact at the handful of sizes a scan covers, where the asymptotic
    t-approximation is not: with four sizes the smallest attainable p is 1/24.
    """
    x = np.asarray(l_values, dtype=float)
    y = np.asarray(values, dtype=float)
    if np.ptp(y) == 0.0:
        return float("nan"), 1.0

    def rho(sample: np.ndarray) -> float:
        return float(spearmanr(x, sample)[0])

    result = permutation_test(
        (y,), rho, permutation_type="pairings", alternative="less", n_resamples=np.inf, vectorized=False
    )
    return float(result.statistic), float(result.pvalue)


def spearman_trend(records: Sequence[TypicalityRecord]) -> dict[int, tuple[float, float]]:
    """Per k: (rho, exact one-sided p) of mean variance against L."""
    by_k: dict[int, list[TypicalityRecord]] = {}
    for r in records:
        by_k.setdefault(r.k, []).append(r)
    out = {}
    for k, rows in sorted(by_k.items()):
        if len(rows) < 3:
            raise ValueError(f"need at least 3 values of L for k={k}, got {len(rows)}")
        rows = sorted(rows, key=lambda r: r.L)
        out[k] = decreasing_trend([r.L for r in rows], [r.mean_variance for r in rows])
        logger.debug("Spearman trend k=%d: rho=%.3f p=%.4g", k, *out[k])
    return out
