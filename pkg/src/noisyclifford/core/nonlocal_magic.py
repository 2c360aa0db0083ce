"""Operator entanglement and the average Pauli entanglement power (APEP).

P_E(U) = E_P E_lin(U P U^dagger) over the 4^L phaseless Pauli strings, with
E_lin(O) = 1 - sum_i lambda_i^2 from the operator Schmidt weights. Three
evaluators agree wherever their domains overlap: plain enumeration, the
four-copy trace 1 - Tr(T^A_(12)(34) U^{(x)4} Q U^{dagger (x)4}) / d^2, and a
single-copy tableau path for encoding circuits C^dagger (u^{(x)k} (x) I).
"""

from __future__ import annotations

import logging
from functools import lru_cache

import numpy as np
from scipy.linalg import svdvals

from ..errors import check_cap
from ..linalg.channels import PAULIS
from ..linalg.operators import (
    DenseOperator,
    apply_permutation_to_vectors,
    kron_all,
    operator_schmidt,
    site_to_copy_major,
)
from ..models import Bipartition
from ..stabilizer.pauli import PauliString, enumerate_paulis
from ..stabilizer.tableau import CliffordTableau, conjugate_pauli

logger = logging.getLogger(__name__)

APEP_ENUMERATION_CAP = 6
FOUR_COPY_CAP = 3
DENSE_Q_CAP = 2
SINGLE_COPY_CAP = 10
EXHAUSTIVE_SINGLE_COPY_CAP = 8
UNITARITY_ATOL = 1e-8

_SWAP_12_34 = (1, 0, 3, 2)


# ── Four-copy projectors ──────────────────────────────────────────────────


@lru_cache(maxsize=1)
def _lambda_site() -> np.ndarray:
    lam = sum(kron_all([DenseOperator(p, (2,))] * 4).matrix for p in PAULIS)
    lam.setflags(write=False)
    return lam


def lambda_site() -> np.ndarray:
    """Lambda = sum_{P in I,X,Y,Z} P^{(x)4}, a 16 x 16 matrix with (Lambda/4)^2 = Lambda/4."""
    return _lambda_site().copy()


def q_projector(n_qubits: int, cap: int = DENSE_Q_CAP) -> DenseOperator:
    """Q = (1/4^L) sum_P P^{(x)4} on 4L qubits, copy-major."""
    check_cap("dense Q qubits", n_qubits, cap)
    q_site = DenseOperator(_lambda_site() / 4.0, (2,) * 4)
    site_major = kron_all([q_site] * n_qubits)
    return site_to_copy_major(site_major, n_qubits, 4)


@lru_cache(maxsize=1)
def _q_site_basis() -> np.ndarray:
    vals, vecs = np.linalg.eigh(_lambda_site() / 4.0)
    basis = vecs[:, vals > 0.5]
    if basis.shape[1] != 4:
        raise ArithmeticError(f"single-site Q should have rank 4, got {basis.shape[1]}")
    basis.setflags(write=False)
    return basis


def q_range_basis(n_qubits: int) -> np.ndarray:
    """Orthonormal columns spanning the range of Q, copy-major, shape (16^L, 4^L)."""
    v = np.ones((1, 1), dtype=complex)
    for _ in range(n_qubits):
        v = np.kron(v, _q_site_basis())
    r = v.shape[1]
    # site-major axis 4s + c becomes copy-major axis cL + s
    t = v.reshape((2,) * (4 * n_qubits) + (r,))
    order = [4 * s + c for c in range(4) for s in range(n_qubits)]
    return t.transpose(order + [4 * n_qubits]).reshape(16 ** n_qubits, r)


def _copy_swap_on_a(cut: Bipartition, swap: tuple[int, ...] = _SWAP_12_34) -> tuple[int, ...]:
    """Slot permutation of 4L qubits: copies permuted by `swap` on A sites only."""
    n = cut.n_sites
    a = set(cut.a_sites)
    return tuple(
        swap[c] * n + s if s in a else c * n + s
        for c in range(4) for s in range(n)
    )


# ── Operator entanglement ─────────────────────────────────────────────────


def _check_cut(op: DenseOperator, cut: Bipartition) -> None:
    if op.dims != cut.dims:
        raise ValueError(f"operator dims {op.dims} do not match cut dims {cut.dims}")


def e_lin(op: DenseOperator, cut: Bipartition) -> float:
    """Linear operator entanglement 1 - sum_i lambda_i^2 of a unitary across the cut."""
    _check_cut(op, cut)
    if not op.is_unitary(UNITARITY_ATOL):
        raise ValueError("e_lin is defined for unitary operators only")
    lam = operator_schmidt(op, cut.a_sites)
    return float(1.0 - np.sum(lam ** 2))


def apep_enumeration(u: DenseOperator, cut: Bipartition, cap: int = APEP_ENUMERATION_CAP) -> float:
    """Mean of e_lin(U P U^dagger) over every phaseless Pauli string."""
    _check_cut(u, cut)
    check_cap("APEP enumeration qubits", cut.n_sites, cap)
    if not u.is_unitary(UNITARITY_ATOL):
        raise ValueError("APEP is defined for unitary operators only")
    m = u.matrix
    total = 0.0
    count = 0
    for p in enumerate_paulis(cut.n_sites, cap=cap):
        o = DenseOperator(m @ p.to_dense().matrix @ m.conj().T, cut.dims)
        lam = operator_schmidt(o, cut.a_sites)
        total += 1.0 - float(np.sum(lam ** 2))
        count += 1
    return total / count


def apep_four_copy(u: DenseOperator, cut: Bipartition, cap: int = FOUR_COPY_CAP) -> float:
    """1 - (1/d^2) sum_c <w_c| T^A_(12)(34) |w_c>, w_c = U^{(x)4} v_c for an orthonormal basis v_c of range(Q)."""
    _check_cut(u, cut)
    check_cap("four-copy qubits", cut.n_sites, cap)
    if not u.is_unitary(UNITARITY_ATOL):
        raise ValueError("APEP is defined for unitary operators only")
    n = cut.n_sites
    d = u.dim
    v = q_range_basis(n)
    r = v.shape[1]
    w = v.reshape(d, d, d, d, r)
    m = u.matrix
    w = np.einsum("ai,ijklr->ajklr", m, w)
    w = np.einsum("bj,ajklr->abklr", m, w)
    w = np.einsum("ck,abklr->abclr", m, w)
    w = np.einsum("el,abclr->abcer", m, w)
    w = w.reshape(d ** 4, r)
    tw = apply_permutation_to_vectors(w, _copy_swap_on_a(cut), 2)
    overlap = float(np.vdot(w, tw).real)
    return 1.0 - overlap / d ** 2


# ── Single-copy evaluation for encoding circuits ──────────────────────────


def pauli_transfer(u: np.ndarray) -> np.ndarray:
    """R[q, p] = Tr(sigma_q u sigma_p u^dagger) / 2; real for unitary u."""
    u = np.asarray(u, dtype=complex)
    r = np.array([
        [np.trace(sq @ u @ sp @ u.conj().T) / 2.0 for sp in PAULIS]
        for sq in PAULIS
    ])
    return r.real


def _kron_power(r: np.ndarray, k: int) -> np.ndarray:
    out = np.ones((1, 1))
    for _ in range(k):
        out = np.kron(out, r)
    return out


def _coefficient_matrix_e_lin(
    coefficients: np.ndarray,
    a_index: np.ndarray,
    b_index: np.ndarray,
    phases: np.ndarray,
    shape: tuple[int, int],
) -> float:
    """1 - sum s^4 for the Pauli-basis coefficient matrix sum_t coeff_t i^phase_t |a_t><b_t|."""
    mat = np.zeros(shape, dtype=complex)
    np.add.at(mat, (a_index, b_index), coefficients * (1j ** phases))
    s = svdvals(mat)
    return float(1.0 - np.sum(s ** 4))


def _conjugated_images(
    c_inv: CliffordTableau,
    strings: list[PauliString],
    cut: Bipartition,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    images = [conjugate_pauli(c_inv, p) for p in strings]
    a_index = np.array([img.restrict(cut.a_sites).index() if cut.a_sites else 0 for img in images])
    b_index = np.array([img.restrict(cut.b_sites).index() if cut.b_sites else 0 for img in images])
    phases = np.array([img.phase for img in images])
    return a_index, b_index, phases


def _letters(index: int, k: int) -> str:
    return "".join("IXYZ"[(index >> (2 * (k - 1 - j))) & 3] for j in range(k))


def apep_single_copy(
    clifford: CliffordTableau,
    u: np.ndarray,
    k: int,
    n_qubits: int,
    cut: Bipartition,
    exhaustive: bool = False,
    cap: int = SINGLE_COPY_CAP,
) -> float:
    """P_E(C^dagger (u^{(x)k} (x) I)) in a single Hilbert-space copy.

    Each Pauli is conjugated by u on the noisy sites (a real combination of
    Pauli strings) and then by C^dagger through the tableau; E_lin comes from
    the singular values of the resulting Pauli coefficient matrix. The clean
    part of a Pauli only contributes a Pauli string factor after conjugation,
    so by default only the 4^k noisy Paulis are averaged. `exhaustive=True`
    iterates over all 4^L strings instead.
    """
    check_cap("single-copy APEP qubits", n_qubits, cap)
    if clifford.n_qubits != n_qubits or cut.n_sites != n_qubits:
        raise ValueError(
            f"tableau ({clifford.n_qubits}), cut ({cut.n_sites}) and n_qubits ({n_qubits}) disagree"
        )
    if not 0 <= k <= n_qubits:
        raise ValueError(f"k must be in [0, {n_qubits}], got {k}")
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2) or not np.allclose(u.conj().T @ u, np.eye(2), atol=UNITARITY_ATOL):
        raise ValueError("u must be a single-qubit unitary")

    c_inv = clifford.inverse()
    rk = _kron_power(pauli_transfer(u), k)
    pad = "I" * (n_qubits - k)
    shape = (4 ** len(cut.a_sites), 4 ** len(cut.b_sites))

    if not exhaustive:
        noisy = [PauliString.from_label(_letters(b, k) + pad) for b in range(4 ** k)]
        a_index, b_index, phases = _conjugated_images(c_inv, noisy, cut)
        values = [
            _coefficient_matrix_e_lin(rk[:, a], a_index, b_index, phases, shape)
            for a in range(4 ** k)
        ]
        return float(np.mean(values))

    check_cap("exhaustive single-copy APEP qubits", n_qubits, EXHAUSTIVE_SINGLE_COPY_CAP)
    values = []
    for p in enumerate_paulis(n_qubits, cap=EXHAUSTIVE_SINGLE_COPY_CAP):
        letters = p.letters()
        noisy_part, clean_part = letters[:k], letters[k:]
        a = int("".join(str("IXYZ".index(c)) for c in noisy_part), 4) if k else 0
        strings = [PauliString.from_label(_letters(b, k) + clean_part) for b in range(4 ** k)]
        a_index, b_index, phases = _conjugated_images(c_inv, strings, cut)
        values.append(_coefficient_matrix_e_lin(rk[:, a], a_index, b_index, phases, shape))
    return float(np.mean(values))


def clifford_preprocessing_invariance_check(
    u: DenseOperator,
    clifford: CliffordTableau | DenseOperator,
    cut: Bipartition | None = None,
    atol: float = 1e-10,
) -> bool:
    """|P_E(U) - P_E(UC)| < atol."""
    cut = cut or Bipartition.symmetric(u.n_subsystems)
    c = clifford.to_dense() if isinstance(clifford, CliffordTableau) else clifford
    left = apep_enumeration(u, cut)
    right = apep_enumeration(u @ c, cut)
    logger.debug("Clifford pre-processing: P_E(U)=%.12g P_E(UC)=%.12g", left, right)
    return abs(left - right) < atol
