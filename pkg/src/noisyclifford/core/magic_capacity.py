"""Robustness of magic over stabilizer states and the magic capacity of single-qubit channels."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import check_cap
from ..linalg.channels import QuantumChannel
from ..linalg.operators import DenseOperator, partial_trace
from ..models import RobustnessSolution
from ..stabilizer.pauli import PauliString
from .simplex import CERTIFICATE_TOL, solve_lp

logger = logging.getLogger(__name__)

STABILIZER_QUBIT_CAP = 3


# ── Stabilizer states ─────────────────────────────────────────────────────


def _symplectic_product(u: int, v: int, n: int) -> int:
    """Commutation parity of Paulis encoded as (x << n) | z."""
    mask = (1 << n) - 1
    ux, uz = u >> n, u & mask
    vx, vz = v >> n, v & mask
    return bin((ux & vz) ^ (uz & vx)).count("1") & 1


def _span(generators: tuple[int, ...]) -> frozenset[int]:
    out = {0}
    for g in generators:
        out |= {v ^ g for v in out}
    return frozenset(out)


def lagrangian_subspaces(n: int) -> list[tuple[int, ...]]:
    """Generators of every maximal isotropic subspace of F_2^{2n}, in a fixed order."""
    level: dict[frozenset[int], tuple[int, ...]] = {frozenset({0}): ()}
    for _ in range(n):
        nxt: dict[frozenset[int], tuple[int, ...]] = {}
        for span, gens in level.items():
            for v in range(1, 4 ** n):
                if v in span or any(_symplectic_product(v, g, n) for g in gens):
                    continue
                new_gens = gens + (v,)
                key = _span(new_gens)
                if key not in nxt:
                    nxt[key] = new_gens
        level = nxt
    return sorted(level.values(), key=lambda gens: sorted(_span(gens)))


@dataclass(frozen=True, eq=False)
class StabilizerStateSet:
    """Pure stabilizer states as density matrices, with their generators."""

    n_qubits: int
    states: tuple[np.ndarray, ...]
    generators: tuple[tuple[PauliString, ...], ...]

    def __len__(self) -> int:
        return len(self.states)

    def matrix(self) -> np.ndarray:
        """Stack of shape (N, 2^n, 2^n)."""
        return np.stack(self.states)


@lru_cache(maxsize=None)
def enumerate_stabilizer_states(n: int, cap: int = STABILIZER_QUBIT_CAP) -> StabilizerStateSet:
    """All n-qubit stabilizer states: 6, 60, 1080 for n = 1, 2, 3."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    check_cap("stabilizer-state qubits", n, cap)
    d = 1 << n
    states = []
    generators = []
    for gens in lagrangian_subspaces(n):
        paulis = [PauliString.from_index(g, n) for g in gens]
        dense = [p.to_dense().matrix for p in paulis]
        for signs in range(d):
            rho = np.eye(d, dtype=complex)
            signed = []
            for j, (p, m) in enumerate(zip(paulis, dense)):
                s = -1 if (signs >> j) & 1 else 1
                rho = rho @ (np.eye(d) + s * m) / 2.0
                signed.append(p.with_phase(0 if s > 0 else 2))
            states.append(rho)
            generators.append(tuple(signed))
    logger.debug("enumerated %d stabilizer states on %d qubit(s)", len(states), n)
    return StabilizerStateSet(n, tuple(states), tuple(generators))


# ── Robustness ────────────────────────────────────────────────────────────


def _entry_rows(mats: np.ndarray) -> np.ndarray:
    """Real linear functionals of Hermitian matrices: diagonal, then Re and Im of the upper triangle."""
    d = mats.shape[-1]
    iu = np.triu_indices(d, k=1)
    diag = np.real(np.diagonal(mats, axis1=-2, axis2=-1))
    upper = mats[..., iu[0], iu[1]]
    return np.concatenate([diag, upper.real, upper.imag], axis=-1)


def _check_density_matrix(rho: np.ndarray, atol: float = 1e-10) -> None:
    if not np.allclose(rho, rho.conj().T, atol=atol):
        raise ValueError("rho is not Hermitian")
    if abs(np.trace(rho) - 1.0) > atol:
        raise ValueError(f"rho has trace {np.trace(rho).real:.12g}, expected 1")
    if np.linalg.eigvalsh(rho).min() < -atol:
        raise ValueError("rho is not positive semidefinite")


def robustness(
    rho: np.ndarray,
    basis: StabilizerStateSet,
    tol: float = CERTIFICATE_TOL,
) -> RobustnessSolution:
    """min ||q||_1 subject to sum_i q_i |phi_i><phi_i| = rho, as an LP in q = q+ - q-."""
    rho = np.asarray(rho, dtype=complex)
    d = 1 << basis.n_qubits
    if rho.shape != (d, d):
        raise ValueError(f"rho has shape {rho.shape}, basis needs {(d, d)}")
    _check_density_matrix(rho)
    columns = _entry_rows(basis.matrix()).T  # (rows, N)
    a_eq = np.hstack([columns, -columns])
    b_eq = _entry_rows(rho)
    n_states = len(basis)
    result = solve_lp(np.ones(2 * n_states), a_eq, b_eq, tol=tol)
    q = result.x[:n_states] - result.x[n_states:]
    recon = np.tensordot(q, basis.matrix(), axes=1)
    residual = float(np.abs(recon - rho).max())
    return RobustnessSolution(
        value=float(np.abs(q).sum()),
        q=q.tolist(),
        residual=residual,
        duality_gap=result.duality_gap,
    )


# ── Magic capacity ────────────────────────────────────────────────────────


def _extend(channel: QuantumChannel) -> QuantumChannel:
    """M (x) id on one extra qubit."""
    eye = np.eye(2, dtype=complex)
    return QuantumChannel(tuple(np.kron(k, eye) for k in channel.kraus), channel.dims + (2,))


def _output(extended: QuantumChannel, rho: np.ndarray) -> np.ndarray:
    out = sum(k @ rho @ k.conj().T for k in extended.kraus)
    return 0.5 * (out + out.conj().T)


def capacity_profile(
    channel: QuantumChannel,
    threads: int = 1,
    tol: float = CERTIFICATE_TOL,
) -> list[float]:
    """Robustness of (M (x) id)(phi) for each of the 60 two-qubit stabilizer inputs, in order."""
    if channel.dims != (2,):
        raise ValueError("magic capacity is implemented for single-qubit channels")
    inputs = enumerate_stabilizer_states(2)
    extended = _extend(channel)

    def solve(rho: np.ndarray) -> float:
        return robustness(_output(extended, rho), inputs, tol=tol).value

    if threads <= 1:
        return [solve(rho) for rho in inputs.states]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(solve, inputs.states))


def magic_capacity(channel: QuantumChannel, threads: int = 1, tol: float = CERTIFICATE_TOL) -> float:
    """K(M) = max over two-qubit stabilizer inputs of R((M (x) id)(phi))."""
    values = capacity_profile(channel, threads=threads, tol=tol)
    best = max(values)
    logger.debug("magic capacity %.12g (input %d of %d)", best, values.index(best), len(values))
    return best


def maximally_entangled_inputs(atol: float = 1e-12) -> list[int]:
    """Indices of two-qubit stabilizer states whose first-qubit marginal is I/2."""
    states = enumerate_stabilizer_states(2).states
    out = []
    for i, rho in enumerate(states):
        marginal = partial_trace(DenseOperator(rho, (2, 2)), [0]).matrix
        if np.allclose(marginal, np.eye(2) / 2.0, atol=atol):
            out.append(i)
    return out


def magic_capacity_maximally_entangled(channel: QuantumChannel, tol: float = CERTIFICATE_TOL) -> float:
    """The capacity maximization restricted to maximally entangled stabilizer inputs."""
    if channel.dims != (2,):
        raise ValueError("magic capacity is implemented for single-qubit channels")
    inputs = enumerate_stabilizer_states(2)
    extended = _extend(channel)
    return max(
        robustness(_output(extended, inputs.states[i]), inputs, tol=tol).value
        for i in maximally_entangled_inputs()
    )
