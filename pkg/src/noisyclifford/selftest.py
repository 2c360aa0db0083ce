"""Oracle-equivalence checks behind `noisyclifford selftest`."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core.clifford_moments import (
    avg_aotoc_finite_L,
    avg_aotoc_infinite,
    avg_apep_infinite,
    general_axis_aotoc_closed_form,
    maximize_aotoc_over_rotations,
    phi_clifford_4,
    rz_aotoc_closed_form,
    rz_apep_closed_form,
    s4,
    twirl_exhaustive,
)
from .core.magic_capacity import enumerate_stabilizer_states, magic_capacity, robustness
from .core.nonlocal_magic import (
    apep_enumeration,
    apep_four_copy,
    apep_single_copy,
    clifford_preprocessing_invariance_check,
)
from .core.scrambling import aotoc_exact, depolarizing_haar_closed_form, haar_avg_aotoc_infinite
from .linalg.channels import (
    axis_rotation,
    depolarizing,
    encode_decode_channel,
    encode_only_unitary,
    natural_representation,
    rz,
    unitary_channel,
)
from .linalg.operators import DenseOperator
from .linalg.sampling import haar_unitary
from .models import Bipartition
from .stabilizer.tableau import random_clifford

logger = logging.getLogger(__name__)

S_GATE = np.diag([1.0, 1j])
H_GATE = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / math.sqrt(2.0)


@dataclass
class CheckResult:
    name: str
    ok: bool
    discrepancy: float
    tolerance: float
    detail: str = ""


def _result(name: str, discrepancy: float, tolerance: float) -> CheckResult:
    return CheckResult(name, discrepancy <= tolerance, discrepancy, tolerance)


# ── Oracles ───────────────────────────────────────────────────────────────


def check_characters(rng: np.random.Generator, full: bool) -> CheckResult:
    s4().check_orthogonality()
    return _result("S4 character table", 0.0, 0.0)


def check_rz_aotoc(rng: np.random.Generator, full: bool) -> CheckResult:
    gap = max(
        abs(avg_aotoc_infinite(unitary_channel(rz(theta)), k) - rz_aotoc_closed_form(theta, k))
        for theta in np.linspace(0.0, math.pi, 9)
        for k in range(1, 5)
    )
    return _result("Rz A-OTOC closed form", gap, 1e-10)


def check_rz_apep(rng: np.random.Generator, full: bool) -> CheckResult:
    gap = max(
        abs(avg_apep_infinite(rz(theta), k) - rz_apep_closed_form(theta, k))
        for theta in np.linspace(0.0, math.pi, 9)
        for k in range(1, 5)
    )
    return _result("Rz APEP closed form", gap, 1e-10)


def check_general_axis(rng: np.random.Generator, full: bool) -> CheckResult:
    gap = 0.0
    for _ in range(50 if full else 10):
        theta, gamma, phi = rng.uniform(0.0, 2 * math.pi, size=3)
        k = int(rng.integers(1, 4))
        engine = avg_aotoc_infinite(unitary_channel(axis_rotation(theta, gamma, phi)), k)
        gap = max(gap, abs(engine - general_axis_aotoc_closed_form(theta, gamma, phi, k)))
    return _result("General-axis A-OTOC closed form", gap, 1e-8)


def check_maximal_scrambling(rng: np.random.Generator, full: bool) -> CheckResult:
    best = maximize_aotoc_over_rotations(1, n_starts=8 if full else 3, seed=rng)
    result = _result("Maximal rotation scrambling is 3/4", abs(best.value - 0.75), 1e-6)
    result.detail = f"theta={best.theta:.6f} axis=({best.axis[0]:.4f}, {best.axis[1]:.4f}, {best.axis[2]:.4f})"
    return result


def check_haar_depolarizing(rng: np.random.Generator, full: bool) -> CheckResult:
    gap = max(
        abs(haar_avg_aotoc_infinite(natural_representation(depolarizing(p)), k) - depolarizing_haar_closed_form(p, k))
        for p in (0.1, 0.5, 1.0)
        for k in (1, 2)
    )
    return _result("Haar depolarizing baseline", gap, 1e-12)


def check_depolarizing_clifford(rng: np.random.Generator, full: bool) -> CheckResult:
    sizes = (4, 6) if full else (4,)
    gap = max(
        abs(avg_aotoc_finite_L(depolarizing(p), k, n))
        for p in (0.1, 0.5, 1.0)
        for k in (1, 2)
        for n in sizes
    )
    noise = depolarizing(0.5)
    cut = Bipartition.symmetric(4)
    for _ in range(20 if full else 5):
        c = random_clifford(4, rng).to_dense().matrix
        gap = max(gap, abs(aotoc_exact(encode_decode_channel(c, noise, 2, 4), cut)))
    return _result("Depolarizing noise does not scramble", gap, 1e-10)


def check_apep_triangle(rng: np.random.Generator, full: bool) -> CheckResult:
    gap = 0.0
    for _ in range(10 if full else 3):
        n = int(rng.integers(2, 4))
        k = int(rng.integers(1, n + 1))
        u = haar_unitary(2, rng)
        tab = random_clifford(n, rng)
        cut = Bipartition.symmetric(n)
        full_u = DenseOperator.qubits(encode_only_unitary(tab.to_dense().matrix, u, k, n))
        values = (
            apep_enumeration(full_u, cut),
            apep_four_copy(full_u, cut),
            apep_single_copy(tab, u, k, n, cut),
        )
        gap = max(gap, max(values) - min(values))
    return _result("APEP enumeration = four-copy = single-copy", gap, 1e-10)


def check_clifford_invariance(rng: np.random.Generator, full: bool) -> CheckResult:
    failures = 0
    for _ in range(20 if full else 5):
        u = DenseOperator.qubits(haar_unitary(4, rng))
        if not clifford_preprocessing_invariance_check(u, random_clifford(2, rng)):
            failures += 1
    return _result("Clifford pre-processing invariance", float(failures), 0.0)


def check_stabilizer_robustness(rng: np.random.Generator, full: bool) -> CheckResult:
    basis = enumerate_stabilizer_states(1)
    gap = max(abs(robustness(rho, basis).value - 1.0) for rho in basis.states)
    return _result("Stabilizer states have robustness 1", gap, 1e-8)


def check_t_state(rng: np.random.Generator, full: bool) -> CheckResult:
    psi = np.array([1.0, np.exp(0.25j * math.pi)]) / math.sqrt(2.0)
    value = robustness(np.outer(psi, psi.conj()), enumerate_stabilizer_states(1)).value
    return _result("Robustness of T|+> is sqrt(2)", abs(value - math.sqrt(2.0)), 1e-6)


def check_clifford_capacity(rng: np.random.Generator, full: bool) -> CheckResult:
    gates = [S_GATE, H_GATE]
    if full:
        gates += [random_clifford(1, rng).to_dense().matrix for _ in range(5)]
    gap = max(abs(magic_capacity(unitary_channel(g)) - 1.0) for g in gates)
    return _result("Clifford gates have magic capacity 1", gap, 1e-6)


def check_moment_oracle(rng: np.random.Generator, full: bool) -> CheckResult:
    n = 2 if full else 1
    gap = 0.0
    for _ in range(5 if full else 2):
        side = 16 ** n
        m = rng.standard_normal((side, side)) + 1j * rng.standard_normal((side, side))
        op = DenseOperator(m, (2,) * (4 * n))
        gap = max(gap, float(np.abs(phi_clifford_4(op, n).matrix - twirl_exhaustive(op, n).matrix).max()))
    return _result(f"Weingarten twirl = exhaustive twirl (L={n})", gap, 1e-8)


def check_finite_l_convergence(rng: np.random.Generator, full: bool) -> CheckResult:
    noise = unitary_channel(rz(math.pi / 2))
    limit = avg_aotoc_infinite(noise, 1)
    gaps = [abs(avg_aotoc_finite_L(noise, 1, n) - limit) for n in (4, 8, 16, 32)]
    monotone = all(b < a for a, b in zip(gaps, gaps[1:]))
    result = _result("Finite-L A-OTOC approaches the L -> infinity value", gaps[-1], 1e-3)
    if not monotone:
        result.ok = False
        result.detail = "gaps not decreasing: " + ", ".join(f"{g:.3e}" for g in gaps)
    return result


CHECKS: tuple[Callable[[np.random.Generator, bool], CheckResult], ...] = (
    check_characters,
    check_rz_aotoc,
    check_rz_apep,
    check_general_axis,
    check_maximal_scrambling,
    check_haar_depolarizing,
    check_depolarizing_clifford,
    check_apep_triangle,
    check_clifford_invariance,
    check_stabilizer_robustness,
    check_t_state,
    check_clifford_capacity,
    check_moment_oracle,
    check_finite_l_convergence,
)


def run_selftest(seed: int | None = 0, full: bool = False) -> list[CheckResult]:
    """Run every oracle; an exception counts as a failed check."""
    rng = np.random.default_rng(seed)
    results = []
    for check in CHECKS:
        name = check.__name__.removeprefix("check_").replace("_", " ")
        try:
            result = check(rng, full)
        except Exception as e:
            logger.debug("Check %s raised", name, exc_info=True)
            result = CheckResult(name, False, math.inf, 0.0, f"{type(e).__name__}: {e}")
        logger.debug("Check %s: ok=%s discrepancy=%.3e", result.name, result.ok, result.discrepancy)
        results.append(result)
    return results
