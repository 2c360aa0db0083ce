"""Quantum channels given by Kraus operators, natural representations and noise models."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Sequence

import numpy as np

from ..models import NoiseKind, NoiseSpec
from .operators import DEFAULT_ATOL, DenseOperator, kron_all

logger = logging.getLogger(__name__)

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_I, PAULI_X, PAULI_Y, PAULI_Z)


class Picture(str, Enum):
    """Which normalization the Kraus set satisfies."""

    SCHRODINGER = "schrodinger"  # sum K^dagger K = I (trace preserving)
    HEISENBERG = "heisenberg"  # sum K K^dagger = I (unital)


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """O -> sum_i K_i O K_i^dagger."""

    kraus: tuple[np.ndarray, ...]
    dims: tuple[int, ...]
    picture: Picture = Picture.SCHRODINGER

    def __post_init__(self) -> None:
        ks = tuple(np.asarray(k, dtype=complex) for k in self.kraus)
        if not ks:
            raise ValueError("a channel needs at least one Kraus operator")
        side = math.prod(self.dims)
        if any(k.shape != (side, side) for k in ks):
            raise ValueError(f"every Kraus operator must be {side}x{side} for dims {self.dims}")
        object.__setattr__(self, "kraus", ks)
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))

    @property
    def dim(self) -> int:
        return math.prod(self.dims)

    @property
    def n_kraus(self) -> int:
        return len(self.kraus)

    def normalization_error(self) -> float:
        if self.picture == Picture.SCHRODINGER:
            total = sum(k.conj().T @ k for k in self.kraus)
        else:
            total = sum(k @ k.conj().T for k in self.kraus)
        return float(np.max(np.abs(total - np.eye(self.dim))))

    def validate(self, atol: float = DEFAULT_ATOL) -> QuantumChannel:
        err = self.normalization_error()
        if err > atol:
            raise ValueError(f"Kraus operators violate the {self.picture.value} normalization by {err:.3e}")
        return self

    def is_unitary(self, atol: float = DEFAULT_ATOL) -> bool:
        if self.n_kraus != 1:
            return False
        k = self.kraus[0]
        return np.allclose(k.conj().T @ k, np.eye(self.dim), atol=atol)

    def adjoint(self) -> QuantumChannel:
        other = Picture.HEISENBERG if self.picture == Picture.SCHRODINGER else Picture.SCHRODINGER
        return QuantumChannel(tuple(k.conj().T for k in self.kraus), self.dims, other)


@dataclass(frozen=True, eq=False)
class NaturalRep:
    """X = sum_i K_i (x) K_i^dagger on two copies of the channel's space."""

    X: DenseOperator

    @property
    def hs_half_norm_sq(self) -> float:
        """||X/2||_2^2 for single-qubit channels."""
        return self.X.hs_norm_sq() / 4.0

    @property
    def trace(self) -> complex:
        return self.X.trace()


def apply_channel(channel: QuantumChannel, op: DenseOperator) -> DenseOperator:
    if op.dims != channel.dims:
        raise ValueError(f"operator dims {op.dims} do not match channel dims {channel.dims}")
    m = op.matrix
    out = sum(k @ m @ k.conj().T for k in channel.kraus)
    return DenseOperator(out, op.dims)


def apply_channel_batch(channel: QuantumChannel, ops: np.ndarray) -> np.ndarray:
    """Apply the channel to a stack of matrices of shape (..., d, d)."""
    out = np.zeros_like(ops, dtype=complex)
    for k in channel.kraus:
        out += k @ ops @ k.conj().T
    return out


def natural_representation(channel: QuantumChannel) -> NaturalRep:
    x = sum(np.kron(k, k.conj().T) for k in channel.kraus)
    return NaturalRep(DenseOperator(x, channel.dims + channel.dims))


def tensor_channels(channels: Sequence[QuantumChannel]) -> QuantumChannel:
    """E_1 (x) E_2 (x) ... with every combination of Kraus operators."""
    kraus = [np.eye(1, dtype=complex)]
    dims: tuple[int, ...] = ()
    for ch in channels:
        kraus = [np.kron(a, b) for a in kraus for b in ch.kraus]
        dims = dims + ch.dims
    return QuantumChannel(tuple(kraus), dims, channels[0].picture)


# ── Single-qubit noise models ─────────────────────────────────────────────


def identity_channel(dims: Sequence[int] = (2,)) -> QuantumChannel:
    return QuantumChannel((np.eye(math.prod(dims), dtype=complex),), tuple(dims))


def unitary_channel(u: np.ndarray, dims: Sequence[int] | None = None) -> QuantumChannel:
    u = np.asarray(u, dtype=complex)
    if dims is None:
        dims = DenseOperator.qubits(u).dims
    return QuantumChannel((u,), tuple(dims)).validate(1e-10)


def rz(theta: float) -> np.ndarray:
    """exp(-i theta Z / 2)."""
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def axis_rotation(theta: float, gamma: float, phi: float) -> np.ndarray:
    """exp(-i theta n.sigma / 2) about n = (sin g cos p, sin g sin p, cos g)."""
    n = (math.sin(gamma) * math.cos(phi), math.sin(gamma) * math.sin(phi), math.cos(gamma))
    generator = n[0] * PAULI_X + n[1] * PAULI_Y + n[2] * PAULI_Z
    return math.cos(theta / 2) * PAULI_I - 1j * math.sin(theta / 2) * generator


def t_gate() -> np.ndarray:
    return np.diag([1.0, np.exp(0.25j * np.pi)]).astype(complex)


def depolarizing(p: float) -> QuantumChannel:
    """E(O) = p Tr(O) I/2 + (1 - p) O, Kraus set {sqrt(1-3p/4) I, sqrt(p)/2 sigma}."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"depolarizing probability must be in [0, 1], got {p}")
    w0 = math.sqrt(1.0 - 0.75 * p)
    w = math.sqrt(p) / 2.0
    return QuantumChannel((w0 * PAULI_I, w * PAULI_X, w * PAULI_Y, w * PAULI_Z), (2,))


def pauli_channel(px: float, py: float, pz: float) -> QuantumChannel:
    """O -> (1 - px - py - pz) O + px XOX + py YOY + pz ZOZ."""
    p0 = 1.0 - px - py - pz
    if min(px, py, pz, p0) < -1e-15:
        raise ValueError(f"Pauli channel probabilities invalid: {(px, py, pz)}")
    weights = [max(p0, 0.0), px, py, pz]
    kraus = tuple(math.sqrt(w) * p for w, p in zip(weights, PAULIS) if w > 0.0)
    return QuantumChannel(kraus, (2,))


def load_kraus_file(path: str | Path) -> QuantumChannel:
    """Read a .npy array of shape (m, 2, 2) holding single-qubit Kraus operators."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Kraus file not found: {path}")
    arr = np.load(path)
    if arr.ndim != 3 or arr.shape[1:] != (2, 2):
        raise ValueError(f"Kraus file must hold an (m, 2, 2) array, got {arr.shape}")
    return QuantumChannel(tuple(arr), (2,)).validate(1e-10)


def noise_unitary(spec: NoiseSpec) -> np.ndarray:
    """The 2x2 unitary of a unitary noise spec."""
    if spec.kind == NoiseKind.RZ:
        return rz(spec.theta)
    if spec.kind == NoiseKind.GENERAL_AXIS:
        return axis_rotation(spec.theta, spec.gamma, spec.phi)
    raise ValueError(f"noise kind '{spec.kind.value}' is not unitary")


def build_noise_channel(spec: NoiseSpec) -> QuantumChannel:
    """Build the single-qubit channel described by a NoiseSpec."""
    spec.validate()
    if spec.kind.is_unitary:
        channel = unitary_channel(noise_unitary(spec))
    elif spec.kind == NoiseKind.DEPOLARIZING:
        channel = depolarizing(spec.p)
    elif spec.kind == NoiseKind.PAULI:
        channel = pauli_channel(spec.px, spec.py, spec.pz)
    else:
        channel = load_kraus_file(spec.kraus_file)
    logger.debug("Noise channel %s with %d Kraus operator(s)", spec.kind.value, channel.n_kraus)
    return channel.validate(1e-10)


# ── Encoding-decoding circuits ────────────────────────────────────────────


def local_operator(u: np.ndarray, k: int, n_qubits: int) -> np.ndarray:
    """u on each of the first k qubits, identity on the remaining n - k."""
    if not 0 <= k <= n_qubits:
        raise ValueError(f"k must be in [0, {n_qubits}], got {k}")
    ops = [DenseOperator(u, (2,))] * k + [DenseOperator.identity((2,))] * (n_qubits - k)
    return kron_all(ops).matrix


def encode_decode_channel(
    clifford: np.ndarray,
    noise: QuantumChannel,
    k: int,
    n_qubits: int,
) -> QuantumChannel:
    """Omega_{C,E}(O) = C^dagger (E^{(x)k} (x) id)(C O C^dagger) C, Kraus C^dagger K C."""
    if noise.dims != (2,):
        raise ValueError("noise must be a single-qubit channel")
    if not 0 <= k <= n_qubits:
        raise ValueError(f"k must be in [0, {n_qubits}], got {k}")
    parts = [noise] * k
    if n_qubits > k:
        parts.append(identity_channel((2,) * (n_qubits - k)))
    local = tensor_channels(parts)
    c = np.asarray(clifford, dtype=complex)
    kraus = tuple(c.conj().T @ kk @ c for kk in local.kraus)
    return QuantumChannel(kraus, (2,) * n_qubits)


def encode_decode_unitary(clifford: np.ndarray, u: np.ndarray, k: int, n_qubits: int) -> np.ndarray:
    """C^dagger (u^{(x)k} (x) I) C."""
    c = np.asarray(clifford, dtype=complex)
    return c.conj().T @ local_operator(u, k, n_qubits) @ c


def encode_only_unitary(clifford: np.ndarray, u: np.ndarray, k: int, n_qubits: int) -> np.ndarray:
    """C^dagger (u^{(x)k} (x) I), the variant without the final encoding."""
    c = np.asarray(clifford, dtype=complex)
    return c.conj().T @ local_operator(u, k, n_qubits)
