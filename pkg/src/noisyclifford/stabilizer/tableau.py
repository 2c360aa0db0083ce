"""Clifford tableaus: a binary symplectic matrix plus sign bits.

Layout: column j of `symplectic_matrix` holds the (x; z) bits of C G_j C^dagger
for generators G = (X_0, ..., X_{n-1}, Z_0, ..., Z_{n-1}), and
C G_j C^dagger = (-1)^{phase_bits[j]} sigma(M[:, j]). Text form is one image
per line in generator order, e.g. "+Z\\n+X" for the Hadamard.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from ..errors import check_cap
from ..linalg.operators import DenseOperator
from .pauli import PauliString, product_phase
from .symplectic import (
    is_symplectic,
    number_of_symplectic,
    random_digits,
    symplectic_form,
    symplectic_from_digits,
    symplectic_from_index,
    to_block_order,
)

logger = logging.getLogger(__name__)

DENSE_TABLEAU_CAP = 6
CLIFFORD_ENUMERATION_CAP = 2


@dataclass(frozen=True, eq=False)
class CliffordTableau:
    """An n-qubit Clifford unitary modulo global phase."""

    symplectic_matrix: np.ndarray
    phase_bits: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.symplectic_matrix, dtype=np.uint8) % 2
        r = np.asarray(self.phase_bits, dtype=np.uint8).ravel() % 2
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2 or m.shape[0] != r.size:
            raise ValueError(f"tableau needs a 2n x 2n matrix and 2n phase bits, got {m.shape} and {r.size}")
        m.setflags(write=False)
        r.setflags(write=False)
        object.__setattr__(self, "symplectic_matrix", m)
        object.__setattr__(self, "phase_bits", r)

    # ── Constructors ──────────────────────────────────────────────────

    @classmethod
    def identity(cls, n: int) -> CliffordTableau:
        return cls(np.eye(2 * n, dtype=np.uint8), np.zeros(2 * n, dtype=np.uint8))

    @classmethod
    def from_images(cls, images: list[PauliString]) -> CliffordTableau:
        """Tableau from the images of X_0..X_{n-1}, Z_0..Z_{n-1} (signs must be +/-)."""
        if len(images) % 2:
            raise ValueError("need an even number of generator images")
        n = len(images) // 2
        m = np.zeros((2 * n, 2 * n), dtype=np.uint8)
        r = np.zeros(2 * n, dtype=np.uint8)
        for j, img in enumerate(images):
            if img.n_qubits != n:
                raise ValueError(f"image {j} acts on {img.n_qubits} qubits, expected {n}")
            if not img.is_hermitian:
                raise ValueError(f"image {j} ({img}) is not Hermitian")
            m[:n, j] = img.x_bits
            m[n:, j] = img.z_bits
            r[j] = img.phase // 2
        tab = cls(m, r)
        if not tab.is_symplectic():
            raise ValueError("generator images do not preserve commutation relations")
        return tab

    @classmethod
    def from_text(cls, text: str) -> CliffordTableau:
        lines = [line for line in text.split() if line]
        return cls.from_images([PauliString.from_label(line) for line in lines])

    @classmethod
    def hadamard(cls, n: int, q: int) -> CliffordTableau:
        images = [PauliString.single(n, j, "X") for j in range(n)] + [PauliString.single(n, j, "Z") for j in range(n)]
        images[q] = PauliString.single(n, q, "Z")
        images[n + q] = PauliString.single(n, q, "X")
        return cls.from_images(images)

    @classmethod
    def phase_gate(cls, n: int, q: int) -> CliffordTableau:
        """S = diag(1, i): X -> Y, Z -> Z."""
        images = [PauliString.single(n, j, "X") for j in range(n)] + [PauliString.single(n, j, "Z") for j in range(n)]
        images[q] = PauliString.single(n, q, "Y")
        return cls.from_images(images)

    @classmethod
    def cnot(cls, n: int, control: int, target: int) -> CliffordTableau:
        if control == target:
            raise ValueError("control and target must differ")
        images = [PauliString.single(n, j, "X") for j in range(n)] + [PauliString.single(n, j, "Z") for j in range(n)]
        xx = np.zeros(n, np.uint8)
        xx[[control, target]] = 1
        images[control] = PauliString(xx, np.zeros(n, np.uint8))
        zz = np.zeros(n, np.uint8)
        zz[[control, target]] = 1
        images[n + target] = PauliString(np.zeros(n, np.uint8), zz)
        return cls.from_images(images)

    # ── Properties ────────────────────────────────────────────────────

    @property
    def n_qubits(self) -> int:
        return self.symplectic_matrix.shape[0] // 2

    def image(self, j: int) -> PauliString:
        n = self.n_qubits
        col = self.symplectic_matrix[:, j]
        return PauliString(col[:n], col[n:], 2 * int(self.phase_bits[j]))

    def images(self) -> list[PauliString]:
        return [self.image(j) for j in range(2 * self.n_qubits)]

    def is_symplectic(self) -> bool:
        return is_symplectic(self.symplectic_matrix)

    def to_text(self) -> str:
        return "\n".join(img.label() for img in self.images())

    def key(self) -> bytes:
        return self.symplectic_matrix.tobytes() + self.phase_bits.tobytes()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CliffordTableau):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    # ── Group operations ──────────────────────────────────────────────

    def compose(self, other: CliffordTableau) -> CliffordTableau:
        """self * other: apply `other` first."""
        if self.n_qubits != other.n_qubits:
            raise ValueError(f"qubit count mismatch: {self.n_qubits} vs {other.n_qubits}")
        return CliffordTableau.from_images([conjugate_pauli(self, img) for img in other.images()])

    def inverse(self) -> CliffordTableau:
        n = self.n_qubits
        j = symplectic_form(n)
        m_inv = (j @ self.symplectic_matrix.astype(np.int64).T @ j) % 2
        r = np.zeros(2 * n, dtype=np.uint8)
        for col in range(2 * n):
            p = PauliString(m_inv[:n, col], m_inv[n:, col])
            # C P C^dagger = +/- G_col, so C^dagger G_col C = +/- P
            if conjugate_pauli(self, p).phase == 2:
                r[col] = 1
        return CliffordTableau(m_inv, r)

    def to_dense(self, cap: int = DENSE_TABLEAU_CAP) -> DenseOperator:
        """Unitary matrix of the tableau, fixed up to global phase.

        The first column is the stabilizer state of the images of Z_j, with its
        largest entry made real positive; column x is prod_j (C X_j C^dagger)^{x_j}
        applied to it.
        """
        n = self.n_qubits
        check_cap("dense tableau qubits", n, cap)
        d = 1 << n
        x_images = [self.image(j).to_dense().matrix for j in range(n)]
        z_images = [self.image(n + j).to_dense().matrix for j in range(n)]
        proj = np.eye(d, dtype=complex)
        for s in z_images:
            proj = proj @ (np.eye(d) + s) / 2.0
        col = int(np.argmax(np.linalg.norm(proj, axis=0)))
        psi = proj[:, col] / np.linalg.norm(proj[:, col])
        pivot = int(np.argmax(np.abs(psi)))
        psi = psi * (abs(psi[pivot]) / psi[pivot])

        u = np.zeros((d, d), dtype=complex)
        for x in range(d):
            v = psi
            for j in range(n):
                if (x >> (n - 1 - j)) & 1:
                    v = x_images[j] @ v
            u[:, x] = v
        return DenseOperator(u, (2,) * n)


def conjugate_pauli(c: CliffordTableau, p: PauliString) -> PauliString:
    """C P C^dagger."""
    n = c.n_qubits
    if p.n_qubits != n:
        raise ValueError(f"qubit count mismatch: tableau {n}, Pauli {p.n_qubits}")
    v = np.concatenate([p.x_bits, p.z_bits]).astype(bool)
    cols = c.symplectic_matrix[:, v].astype(np.int64)
    # P = i^(p + x.z) prod_j X_j^x_j prod_j Z_j^z_j, images taken in that order
    phase = p.phase + int(np.dot(p.x_bits.astype(np.int64), p.z_bits.astype(np.int64)))
    phase += 2 * int(c.phase_bits[v].sum())
    if cols.shape[1] == 0:
        return PauliString(np.zeros(n, np.uint8), np.zeros(n, np.uint8), phase)
    xs = cols[:n].T
    zs = cols[n:].T
    phase += product_phase(xs, zs)
    return PauliString(xs.sum(axis=0) % 2, zs.sum(axis=0) % 2, phase)


def random_clifford(n: int, rng: np.random.Generator) -> CliffordTableau:
    """Exactly uniform over the n-qubit Clifford group modulo global phase."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    m = to_block_order(symplectic_from_digits(random_digits(n, rng)))
    r = rng.integers(0, 2, size=2 * n, dtype=np.uint8)
    return CliffordTableau(m, r)


def enumerate_cliffords(n: int, cap: int = CLIFFORD_ENUMERATION_CAP) -> Iterator[CliffordTableau]:
    """Every n-qubit Clifford modulo phase: 24 for n = 1, 11520 for n = 2."""
    check_cap("Clifford enumeration qubits", n, cap)
    for index in range(number_of_symplectic(n)):
        m = to_block_order(symplectic_from_index(index, n))
        for bits in itertools.product((0, 1), repeat=2 * n):
            yield CliffordTableau(m, np.array(bits, dtype=np.uint8))


def to_dense(obj: PauliString | CliffordTableau, cap: int | None = None) -> DenseOperator:
    """Dense matrix of a Pauli string or a tableau."""
    if isinstance(obj, PauliString):
        return obj.to_dense() if cap is None else obj.to_dense(cap)
    if isinstance(obj, CliffordTableau):
        return obj.to_dense() if cap is None else obj.to_dense(cap)
    raise TypeError(f"cannot densify {type(obj).__name__}")


def sequential_conjugate(tableaus: list[CliffordTableau], p: PauliString) -> PauliString:
    """C_1 C_2 ... C_m P (C_1 ... C_m)^dagger, innermost last."""
    out = p
    for tab in reversed(tableaus):
        out = conjugate_pauli(tab, out)
    return out


__all__ = [
    "CliffordTableau",
    "conjugate_pauli",
    "enumerate_cliffords",
    "random_clifford",
    "sequential_conjugate",
    "to_dense",
]
