"""Joint Levenberg-Marquardt fit of APEP = 1 - |cos(a (K - 1))|^(b k) and its block bootstrap."""

from __future__ import annotations

import logging
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Sequence

import numpy as np
from scipy.optimize import least_squares

from ..errors import FitError
from ..linalg.sampling import as_generator, spawn_seeds
from ..models import FitResult, SweepRow

logger = logging.getLogger(__name__)

DEFAULT_START = (1.25, 1.0)
FIT_TOL = 1e-10
MAX_NFEV = 500
COS_FLOOR = 1e-300


def ansatz(capacity: np.ndarray, k: np.ndarray, a: float, b: float) -> np.ndarray:
    c = np.maximum(np.abs(np.cos(a * (capacity - 1.0))), COS_FLOOR)
    return 1.0 - c ** (b * k)


def _arrays(rows: Sequence[SweepRow]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if not rows:
        raise FitError("cannot fit an empty dataset")
    capacity = np.array([r.capacity for r in rows], dtype=float)
    k = np.array([r.k for r in rows], dtype=float)
    y = np.array([r.apep for r in rows], dtype=float)
    if not (np.all(np.isfinite(capacity)) and np.all(np.isfinite(y))):
        raise FitError("dataset contains non-finite values")
    return capacity, k, y


def _jacobian(params: np.ndarray, capacity: np.ndarray, k: np.ndarray) -> np.ndarray:
    a, b = params
    phase = a * (capacity - 1.0)
    cos = np.cos(phase)
    c = np.maximum(np.abs(cos), COS_FLOOR)
    e = b * k
    # d|x|/dx taken as sign(x); the kink at cos = 0 is ignored
    d_a = e * c ** (e - 1.0) * np.sign(cos) * np.sin(phase) * (capacity - 1.0)
    d_b = -(c ** e) * np.log(c) * k
    return np.column_stack([d_a, d_b])


def fit_apep_capacity(
    rows: Sequence[SweepRow],
    start: tuple[float, float] = DEFAULT_START,
    tol: float = FIT_TOL,
    max_nfev: int = MAX_NFEV,
) -> FitResult:
    """Unweighted least squares over every (capacity, k, apep) row at once."""
    capacity, k, y = _arrays(rows)

    def residuals(params: np.ndarray) -> np.ndarray:
        return ansatz(capacity, k, params[0], params[1]) - y

    result = least_squares(
        residuals,
        np.asarray(start, dtype=float),
        jac=lambda p: _jacobian(p, capacity, k),
        method="lm",
        ftol=tol,
        xtol=tol,
        max_nfev=max_nfev,
    )
    a, b = (float(v) for v in result.x)
    if not (np.isfinite(a) and np.isfinite(b)):
        raise FitError(f"fit diverged: {result.message}")
    rss = float(np.sum(result.fun ** 2))
    dof = max(len(y) - 2, 1)
    jac = result.jac
    cov = np.linalg.pinv(jac.T @ jac) * (rss / dof)
    a_err, b_err = (float(np.sqrt(max(v, 0.0))) for v in np.diag(cov))
    converged = bool(result.success)
    if not converged:
        logger.warning("APEP fit did not converge after %d evaluations: %s", result.nfev, result.message)
    return FitResult(
        a=a,
        b=b,
        a_stderr=a_err,
        b_stderr=b_err,
        rss=rss,
        converged=converged,
        n_evaluations=int(result.nfev),
        message=str(result.message),
    )


def multi_start_fit(
    rows: Sequence[SweepRow],
    n_starts: int = 10,
    seed: int | None = None,
    low: float = 0.5,
    high: float = 2.0,
) -> list[FitResult]:
    """Fits from uniformly drawn starts in (low, high)^2."""
    rng = as_generator(seed)
    starts = rng.uniform(low, high, size=(n_starts, 2))
    return [fit_apep_capacity(rows, start=(float(a), float(b))) for a, b in starts]


def _blocks(rows: Sequence[SweepRow]) -> list[list[SweepRow]]:
    grouped: dict[int, list[SweepRow]] = defaultdict(list)
    for row in rows:
        grouped[row.unitary_index].append(row)
    return [grouped[i] for i in sorted(grouped)]


def _percentile_ci(samples: np.ndarray, point: float) -> tuple[float, float]:
    lo, hi = np.percentile(samples, [2.5, 97.5])
    return float(min(lo, point)), float(max(hi, point))


def bootstrap_fit(
    rows: Sequence[SweepRow],
    resamples: int = 1000,
    seed: int | None = None,
    threads: int = 1,
    base: FitResult | None = None,
) -> FitResult:
    """Refit on unitary-level resamples and attach percentile 95% intervals.

    All k rows of a unitary move together. Failed refits are excluded and
    counted in `bootstrap_failures`.
    """
    if resamples < 1:
        raise ValueError(f"resamples must be >= 1, got {resamples}")
    base = base or fit_apep_capacity(rows)
    blocks = _blocks(rows)
    start = (base.a, base.b)

    def one(child: np.random.SeedSequence) -> tuple[float, float] | None:
        rng = np.random.default_rng(child)
        picks = rng.integers(0, len(blocks), size=len(blocks))
        sample = [row for i in picks for row in blocks[i]]
        try:
            fit = fit_apep_capacity(sample, start=start)
        except (FitError, ValueError, np.linalg.LinAlgError) as e:
            logger.debug("Bootstrap resample dropped: %s", e)
            return None
        if not fit.converged:
            logger.debug("Bootstrap resample dropped: %s", fit.message)
            return None
        return fit.a, fit.b

    children = spawn_seeds(seed, resamples)
    if threads <= 1:
        outcomes = [one(c) for c in children]
    else:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            outcomes = list(executor.map(one, children))

    samples = [o for o in outcomes if o is not None]
    failures = resamples - len(samples)
    if not samples:
        raise FitError(f"all {resamples} bootstrap refits failed")
    arr = np.array(samples)
    logger.info("Bootstrap: %d/%d resamples kept", len(samples), resamples)
    return replace(
        base,
        a_ci95=_percentile_ci(arr[:, 0], base.a),
        b_ci95=_percentile_ci(arr[:, 1], base.b),
        bootstrap_samples=[(float(a), float(b)) for a, b in samples],
        bootstrap_failures=failures,
    )
