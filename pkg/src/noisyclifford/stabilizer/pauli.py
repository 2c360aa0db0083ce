"""Pauli strings in symplectic form.

A PauliString with bits (x, z) and phase p stands for

    i^p * sigma(x_0, z_0) (x) ... (x) sigma(x_{n-1}, z_{n-1})

with sigma(0,0)=I, sigma(1,0)=X, sigma(1,1)=Y, sigma(0,1)=Z. Phase-0 strings
are Hermitian. The text form is a sign prefix ("+", "+i", "-", "-i") followed
by one letter per qubit, qubit 0 first: "+XIZY".
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from ..errors import check_cap
from ..linalg.channels import PAULIS
from ..linalg.operators import DenseOperator

logger = logging.getLogger(__name__)

ENUMERATION_CAP = 8
DENSE_PAULI_CAP = 12

_LETTERS = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_BITS = {v: k for k, v in _LETTERS.items()}
_PREFIX = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_PREFIX_PHASE = {"+i": 1, "-i": 3, "+": 0, "-": 2}


@dataclass(frozen=True, eq=False)
class PauliString:
    """An n-qubit Pauli operator with a Z4 phase."""

    x_bits: np.ndarray
    z_bits: np.ndarray
    phase: int = 0

    def __post_init__(self) -> None:
        x = np.asarray(self.x_bits, dtype=np.uint8).ravel() % 2
        z = np.asarray(self.z_bits, dtype=np.uint8).ravel() % 2
        if x.shape != z.shape or x.size == 0:
            raise ValueError(f"x and z bit vectors must have equal nonzero length, got {x.size} and {z.size}")
        x.setflags(write=False)
        z.setflags(write=False)
        object.__setattr__(self, "x_bits", x)
        object.__setattr__(self, "z_bits", z)
        object.__setattr__(self, "phase", int(self.phase) % 4)

    @classmethod
    def identity(cls, n: int) -> PauliString:
        return cls(np.zeros(n, np.uint8), np.zeros(n, np.uint8))

    @classmethod
    def single(cls, n: int, site: int, letter: str) -> PauliString:
        x = np.zeros(n, np.uint8)
        z = np.zeros(n, np.uint8)
        x[site], z[site] = _BITS[letter.upper()]
        return cls(x, z)

    @classmethod
    def from_label(cls, label: str) -> PauliString:
        """Parse "+XIZY", "-iZZ" or a bare "XZ"."""
        label = label.strip()
        phase = 0
        for prefix in ("+i", "-i", "+", "-"):
            if label.startswith(prefix):
                phase = _PREFIX_PHASE[prefix]
                label = label[len(prefix):]
                break
        try:
            bits = [_BITS[c] for c in label.upper()]
        except KeyError as e:
            raise ValueError(f"invalid Pauli letter {e.args[0]!r} in {label!r}") from e
        if not bits:
            raise ValueError("empty Pauli label")
        x, z = zip(*bits)
        return cls(np.array(x, np.uint8), np.array(z, np.uint8), phase)

    @classmethod
    def from_index(cls, index: int, n: int) -> PauliString:
        """Phaseless string number `index` in lexicographic (x, z) order."""
        x_int, z_int = divmod(index, 1 << n)
        return cls(_int_to_bits(x_int, n), _int_to_bits(z_int, n))

    @property
    def n_qubits(self) -> int:
        return int(self.x_bits.size)

    @property
    def weight(self) -> int:
        return int(np.count_nonzero(self.x_bits | self.z_bits))

    @property
    def is_hermitian(self) -> bool:
        return self.phase in (0, 2)

    def label(self) -> str:
        letters = "".join(_LETTERS[(int(a), int(b))] for a, b in zip(self.x_bits, self.z_bits))
        return _PREFIX[self.phase] + letters

    def letters(self) -> str:
        return self.label().lstrip("+-i")

    def key(self) -> tuple[bytes, bytes]:
        """Phaseless identity, usable as a dict key."""
        return self.x_bits.tobytes(), self.z_bits.tobytes()

    def index(self) -> int:
        return (_bits_to_int(self.x_bits) << self.n_qubits) | _bits_to_int(self.z_bits)

    def with_phase(self, phase: int) -> PauliString:
        return PauliString(self.x_bits, self.z_bits, phase)

    def restrict(self, sites: list[int] | tuple[int, ...]) -> PauliString:
        """Phaseless restriction to a subset of qubits."""
        idx = list(sites)
        return PauliString(self.x_bits[idx], self.z_bits[idx])

    def to_dense(self, cap: int = DENSE_PAULI_CAP) -> DenseOperator:
        check_cap("dense Pauli qubits", self.n_qubits, cap)
        m = np.array([[1.0 + 0j]])
        for a, b in zip(self.x_bits, self.z_bits):
            m = np.kron(m, PAULIS[_PAULI_INDEX[(int(a), int(b))]])
        return DenseOperator((1j ** self.phase) * m, (2,) * self.n_qubits)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PauliString):
            return NotImplemented
        return (
            self.phase == other.phase
            and np.array_equal(self.x_bits, other.x_bits)
            and np.array_equal(self.z_bits, other.z_bits)
        )

    def __hash__(self) -> int:
        return hash((self.key(), self.phase))

    def __str__(self) -> str:
        return self.label()

    def __repr__(self) -> str:
        return f"PauliString({self.label()!r})"


_PAULI_INDEX = {(0, 0): 0, (1, 0): 1, (1, 1): 2, (0, 1): 3}


def _int_to_bits(value: int, n: int) -> np.ndarray:
    return np.array([(value >> (n - 1 - j)) & 1 for j in range(n)], dtype=np.uint8)


def _bits_to_int(bits: np.ndarray) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | int(b)
    return out


def product_phase(xs: np.ndarray, zs: np.ndarray) -> int:
    """Power of i picked up when multiplying phase-0 strings row by row.

    xs, zs have shape (m, n); row t is the t-th factor from the left.
    """
    xs = np.asarray(xs, dtype=np.int64)
    zs = np.asarray(zs, dtype=np.int64)
    if xs.shape[0] < 2:
        return 0
    # running product of factors 0..t-1, phaseless
    px = np.cumsum(xs, axis=0)[:-1] % 2
    pz = np.cumsum(zs, axis=0)[:-1] % 2
    qx, qz = xs[1:], zs[1:]
    # sigma(a) sigma(b) = i^g(a, b) sigma(a + b)
    g = np.where(
        (px == 1) & (pz == 1), qz - qx,
        np.where(px == 1, qz * (2 * qx - 1), np.where(pz == 1, qx * (1 - 2 * qz), 0)),
    )
    return int(g.sum()) % 4


def pauli_mul(p: PauliString, q: PauliString) -> PauliString:
    """The product PQ with its exact Z4 phase."""
    if p.n_qubits != q.n_qubits:
        raise ValueError(f"qubit count mismatch: {p.n_qubits} vs {q.n_qubits}")
    phase = p.phase + q.phase + product_phase(
        np.stack([p.x_bits, q.x_bits]), np.stack([p.z_bits, q.z_bits])
    )
    return PauliString(p.x_bits ^ q.x_bits, p.z_bits ^ q.z_bits, phase)


def symplectic_product(p: PauliString, q: PauliString) -> int:
    if p.n_qubits != q.n_qubits:
        raise ValueError(f"qubit count mismatch: {p.n_qubits} vs {q.n_qubits}")
    return int((np.dot(p.x_bits, q.z_bits) + np.dot(p.z_bits, q.x_bits)) % 2)


def commutes(p: PauliString, q: PauliString) -> bool:
    return symplectic_product(p, q) == 0


def enumerate_paulis(n: int, cap: int = ENUMERATION_CAP) -> Iterator[PauliString]:
    """All 4^n phaseless strings, lexicographic in (x, z) bits."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    check_cap("Pauli enumeration qubits", n, cap)
    for index in range(4 ** n):
        yield PauliString.from_index(index, n)


def pauli_expansion(op: np.ndarray) -> dict[str, complex]:
    """Coefficients c_P with op = sum_P c_P P over phaseless single-qubit Paulis."""
    return {
        letter: complex(np.trace(p.conj().T @ op)) / 2.0
        for letter, p in zip("IXYZ", PAULIS)
    }
