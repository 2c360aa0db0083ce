"""Pauli strings and Clifford tableaus in the binary symplectic picture."""

from .pauli import PauliString, commutes, enumerate_paulis, pauli_mul
from .tableau import CliffordTableau, conjugate_pauli, enumerate_cliffords, random_clifford, to_dense

__all__ = [
    "CliffordTableau",
    "PauliString",
    "commutes",
    "conjugate_pauli",
    "enumerate_cliffords",
    "enumerate_paulis",
    "pauli_mul",
    "random_clifford",
    "to_dense",
]
