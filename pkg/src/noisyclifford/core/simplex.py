"""Dense two-phase tableau simplex with Bland's rule and a primal-dual certificate.

Solves   minimize c.x   subject to   A x = b,  x >= 0.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import InfeasibleError, NumericalError, UnboundedError

logger = logging.getLogger(__name__)

PIVOT_TOL = 1e-10
CERTIFICATE_TOL = 1e-8


@dataclass
class LPResult:
    x: np.ndarray
    objective: float
    dual: np.ndarray
    duality_gap: float
    residual: float
    iterations: int


def _pivot(t: np.ndarray, row: int, col: int) -> None:
    t[row] /= t[row, col]
    for r in range(t.shape[0]):
        if r != row and t[r, col] != 0.0:
            t[r] -= t[r, col] * t[row]


def _iterate(t: np.ndarray, basis: list[int], n_cols: int, tol: float, max_iter: int) -> int:
    """Pivot until no reduced cost in t[-1, :n_cols] is negative."""
    iterations = 0
    while True:
        negative = np.nonzero(t[-1, :n_cols] < -tol)[0]
        if negative.size == 0:
            return iterations
        entering = int(negative[0])  # Bland: lowest index
        col = t[:-1, entering]
        rows = np.nonzero(col > tol)[0]
        if rows.size == 0:
            raise UnboundedError(f"objective unbounded along column {entering}")
        ratios = t[rows, -1] / col[rows]
        ties = rows[ratios <= ratios.min() + tol]
        leaving = int(min(ties, key=lambda r: basis[r]))
        _pivot(t, leaving, entering)
        logger.debug("pivot %d: column %d enters, row %d (var %d) leaves", iterations, entering, leaving, basis[leaving])
        basis[leaving] = entering
        iterations += 1
        if iterations > max_iter:
            raise NumericalError(f"simplex did not terminate within {max_iter} pivots")


def solve_lp(
    c: np.ndarray,
    a_eq: np.ndarray,
    b_eq: np.ndarray,
    tol: float = CERTIFICATE_TOL,
    max_iter: int = 10_000,
) -> LPResult:
    """Solve a standard-form LP and certify optimality through the dual."""
    c = np.asarray(c, dtype=float)
    a = np.asarray(a_eq, dtype=float).copy()
    b = np.asarray(b_eq, dtype=float).copy()
    m, n = a.shape
    if c.shape != (n,) or b.shape != (m,):
        raise ValueError(f"shape mismatch: c {c.shape}, A {a.shape}, b {b.shape}")

    sign = np.where(b < 0, -1.0, 1.0)
    a *= sign[:, None]
    b *= sign

    # Phase 1: artificial basis, minimize the artificial sum
    t = np.zeros((m + 1, n + m + 1))
    t[:m, :n] = a
    t[:m, n:n + m] = np.eye(m)
    t[:m, -1] = b
    t[-1, :n] = -a.sum(axis=0)
    t[-1, -1] = -b.sum()
    basis = list(range(n, n + m))
    it1 = _iterate(t, basis, n + m, PIVOT_TOL, max_iter)
    infeasibility = -t[-1, -1]
    if infeasibility > tol * max(1.0, float(np.abs(b).max(initial=0.0))):
        raise InfeasibleError(f"no feasible point (phase-1 objective {infeasibility:.3e})")

    # Drive remaining artificials out; rows where that is impossible are redundant
    keep = []
    for r in range(m):
        if basis[r] >= n:
            candidates = np.nonzero(np.abs(t[r, :n]) > PIVOT_TOL)[0]
            if candidates.size == 0:
                logger.debug("dropping redundant constraint row %d", r)
                continue
            _pivot(t, r, int(candidates[0]))
            basis[r] = int(candidates[0])
        keep.append(r)

    # Phase 2 on the original columns
    t2 = np.zeros((len(keep) + 1, n + 1))
    t2[:-1, :n] = t[keep, :n]
    t2[:-1, -1] = t[keep, -1]
    basis = [basis[r] for r in keep]
    c_b = c[basis]
    t2[-1, :n] = c - c_b @ t2[:-1, :n]
    t2[-1, -1] = -c_b @ t2[:-1, -1]
    it2 = _iterate(t2, basis, n, PIVOT_TOL, max_iter)

    # Certificate: refit the basic solution and the duals from the original data
    a_k, b_k = a[keep], b[keep]
    basis_matrix = a_k[:, basis]
    try:
        x_b = np.linalg.solve(basis_matrix, b_k)
        y_k = np.linalg.solve(basis_matrix.T, c[basis])
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"singular optimal basis: {e}") from e
    if x_b.min(initial=0.0) < -tol:
        raise NumericalError(f"basic solution infeasible by {-x_b.min():.3e}")
    x = np.zeros(n)
    x[basis] = np.clip(x_b, 0.0, None)
    reduced = c - a_k.T @ y_k
    if reduced.min(initial=0.0) < -tol:
        raise NumericalError(f"dual infeasible by {-reduced.min():.3e}")
    objective = float(c @ x)
    gap = abs(objective - float(b_k @ y_k))
    residual = float(np.abs(a @ x - b).max(initial=0.0))
    if gap > tol * max(1.0, abs(objective)) or residual > tol:
        raise NumericalError(f"uncertified optimum: duality gap {gap:.3e}, residual {residual:.3e}")

    dual = np.zeros(m)
    dual[keep] = y_k
    dual *= sign
    logger.debug("LP solved: %d + %d pivots, objective %.12g, gap %.2e", it1, it2, objective, gap)
    return LPResult(x=x, objective=objective, dual=dual, duality_gap=gap, residual=residual, iterations=it1 + it2)
