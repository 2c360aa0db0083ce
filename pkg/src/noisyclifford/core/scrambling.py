"""Bipartite A-OTOC: swap form, definition-level Monte Carlo, state-form estimator, Haar baseline."""

from __future__ import annotations

import logging

import numpy as np

from ..errors import check_cap
from ..linalg.channels import NaturalRep, QuantumChannel, apply_channel_batch
from ..linalg.operators import DenseOperator, embed, partial_trace
from ..linalg.sampling import SeedLike, as_generator, haar_state, haar_unitary
from ..models import Bipartition, Estimate

logger = logging.getLogger(__name__)

TWO_COPY_CAP = 6
DEFINITION_MC_CAP = 4
STATE_ESTIMATOR_CAP = 8


def _check_cut(channel: QuantumChannel, cut: Bipartition) -> None:
    if channel.dims != cut.dims:
        raise ValueError(f"channel dims {channel.dims} do not match cut dims {cut.dims}")


def aotoc_exact(channel: QuantumChannel, cut: Bipartition, cap: int = TWO_COPY_CAP) -> float:
    """G = (1/d^2) Tr((d_B S - S_AA') E^{(x)2}(S_AA')).

    S_AA' = sum_ij (e_ij (x) I_B) (x) (e_ji (x) I_B'), so with F_ij = E(e_ij (x) I_B)
    the two-copy trace reduces to sum_ij d_B Tr(F_ij F_ji) - Tr(Tr_B F_ij Tr_B F_ji).
    """
    _check_cut(channel, cut)
    check_cap("A-OTOC qubits", cut.n_sites, cap)
    d_a, d_b = cut.d_A, cut.d_B
    d = d_a * d_b
    a_sites = list(cut.a_sites)
    a_dims = tuple(cut.dims[i] for i in a_sites)

    units = np.zeros((d_a * d_a, d, d), dtype=complex)
    for i in range(d_a):
        for j in range(d_a):
            e_ij = np.zeros((d_a, d_a), dtype=complex)
            e_ij[i, j] = 1.0
            units[i * d_a + j] = embed(DenseOperator(e_ij, a_dims), a_sites, cut.dims).matrix
    f = apply_channel_batch(channel, units).reshape(d_a, d_a, d, d)
    f_swapped = f.transpose(1, 0, 2, 3)

    full = np.einsum("ijab,ijba->", f, f_swapped)
    reduced = np.stack([
        partial_trace(DenseOperator(f[i, j], cut.dims), a_sites).matrix
        for i in range(d_a) for j in range(d_a)
    ]).reshape(d_a, d_a, d_a, d_a)
    reduced_term = np.einsum("ijab,jiba->", reduced, reduced)
    value = float(np.real(d_b * full - reduced_term)) / d ** 2
    logger.debug("aotoc_exact: d_A=%d d_B=%d G=%.12g", d_a, d_b, value)
    return value


def aotoc_definition_mc(
    channel: QuantumChannel,
    cut: Bipartition,
    n_samples: int,
    seed: SeedLike = None,
    cap: int = DEFINITION_MC_CAP,
) -> Estimate:
    """(1/2d) E ||[X_A (x) I_B, E(I_A (x) Y_B)]||_2^2 over Haar unitaries X, Y."""
    _check_cut(channel, cut)
    check_cap("definition Monte Carlo qubits", cut.n_sites, cap)
    if n_samples < 2:
        raise ValueError(f"n_samples must be >= 2, got {n_samples}")
    rng = as_generator(seed)
    d = cut.d_A * cut.d_B
    a_sites, b_sites = list(cut.a_sites), list(cut.b_sites)
    a_dims = tuple(cut.dims[i] for i in a_sites)
    b_dims = tuple(cut.dims[i] for i in b_sites)

    samples = np.empty(n_samples)
    for t in range(n_samples):
        x = embed(DenseOperator(haar_unitary(cut.d_A, rng), a_dims), a_sites, cut.dims).matrix
        if b_sites:
            y = embed(DenseOperator(haar_unitary(cut.d_B, rng), b_dims), b_sites, cut.dims).matrix
        else:
            y = np.eye(d, dtype=complex)
        ey = apply_channel_batch(channel, y[None])[0]
        comm = x @ ey - ey @ x
        samples[t] = float(np.vdot(comm, comm).real) / (2 * d)
    return Estimate(float(samples.mean()), float(samples.std(ddof=1) / np.sqrt(n_samples)), n_samples)


def _linear_entropy(rho: np.ndarray) -> float:
    return 1.0 - float(np.vdot(rho, rho).real)


def aotoc_state_sample(channel: QuantumChannel, cut: Bipartition, psi: np.ndarray) -> float:
    """One term of the state-form estimator for a pure state psi on A."""
    d_b = cut.d_B
    a_sites = list(cut.a_sites)
    a_dims = tuple(cut.dims[i] for i in a_sites)
    rho_a = np.outer(psi, psi.conj())
    inp = embed(DenseOperator(rho_a, a_dims), a_sites, cut.dims).matrix / d_b
    out = apply_channel_batch(channel, inp[None])[0]
    reduced = partial_trace(DenseOperator(out, cut.dims), a_sites).matrix
    s_min = 1.0 - 1.0 / d_b
    return cut.n_a_normalizer * (_linear_entropy(reduced) - d_b * (_linear_entropy(out) - s_min))


def aotoc_state_estimator(
    channel: QuantumChannel,
    cut: Bipartition,
    n_psi: int,
    seed: SeedLike = None,
    cap: int = STATE_ESTIMATOR_CAP,
) -> Estimate:
    """N_A E_psi[S_L(Tr_B W(psi)) - d_B (S_L(W(psi)) - S_L^min)], W(X) = Omega(X (x) I/d_B)."""
    _check_cut(channel, cut)
    check_cap("state estimator qubits", cut.n_sites, cap)
    if n_psi < 1:
        raise ValueError(f"n_psi must be >= 1, got {n_psi}")
    rng = as_generator(seed)
    samples = np.array([aotoc_state_sample(channel, cut, haar_state(cut.d_A, rng)) for _ in range(n_psi)])
    stderr = float(samples.std(ddof=1) / np.sqrt(n_psi)) if n_psi > 1 else 0.0
    return Estimate(float(samples.mean()), stderr, n_psi)


def haar_avg_aotoc_infinite(rep: NaturalRep, k: int) -> float:
    """||X/2||_2^{2k} - (Tr(X)/4)^{2k} for a single-qubit natural representation."""
    if rep.X.dim != 4:
        raise ValueError(f"expected a single-qubit natural representation (4x4), got {rep.X.dim}x{rep.X.dim}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    a = rep.hs_half_norm_sq
    t = rep.trace.real / 4.0
    return a ** k - t ** (2 * k)


def depolarizing_haar_closed_form(p: float, k: int) -> float:
    return (1 - 1.5 * p + 0.75 * p * p) ** k - (1 - 0.75 * p) ** (2 * k)
