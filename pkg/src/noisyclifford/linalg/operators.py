"""Dense multi-subsystem operators.

Conventions:

- Subsystem 0 is the leftmost Kronecker factor (most significant index digit).
- Single-copy operators on L qubits are ordered site-major. m-copy operators
  are ordered copy-major: subsystem (c, s) sits at position c * L + s.
- A permutation sigma of m slots is a tuple of 0-based images. The operator
  T_sigma maps |i_0 ... i_{m-1}> to |i_sigma(0) ... i_sigma(m-1)>, so
  T_sigma T_tau = T_{sigma*tau} with (sigma*tau)(j) = tau(sigma(j)), and
  Tr(T_sigma (A_0 x ... x A_{m-1})) is the product over cycles of
  Tr(A_j A_sigma(j) A_sigma^2(j) ...).
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import svdvals

from ..errors import check_cap

logger = logging.getLogger(__name__)

DEFAULT_ATOL = 1e-12
PERMUTATION_QUBIT_CAP = 12  # 4096-dimensional


@dataclass(frozen=True, eq=False)
class DenseOperator:
    """Complex square matrix tagged with its subsystem dimensions."""

    matrix: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        dims = tuple(int(d) for d in self.dims)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"DenseOperator needs a square matrix, got shape {m.shape}")
        if math.prod(dims) != m.shape[0]:
            raise ValueError(f"dims {dims} do not multiply to matrix side {m.shape[0]}")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def identity(cls, dims: Sequence[int]) -> DenseOperator:
        return cls(np.eye(math.prod(dims), dtype=complex), tuple(dims))

    @classmethod
    def qubits(cls, matrix: np.ndarray) -> DenseOperator:
        """Wrap a 2^n x 2^n matrix as an n-qubit operator."""
        side = np.asarray(matrix).shape[0]
        n = int(round(math.log2(side)))
        if 2 ** n != side:
            raise ValueError(f"matrix side {side} is not a power of two")
        return cls(matrix, (2,) * n)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_subsystems(self) -> int:
        return len(self.dims)

    def adjoint(self) -> DenseOperator:
        return DenseOperator(self.matrix.conj().T, self.dims)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def hs_norm_sq(self) -> float:
        """Squared Hilbert-Schmidt norm Tr(O^dagger O)."""
        return float(np.vdot(self.matrix, self.matrix).real)

    def is_unitary(self, atol: float = DEFAULT_ATOL) -> bool:
        return np.allclose(self.matrix.conj().T @ self.matrix, np.eye(self.dim), atol=atol)

    def __matmul__(self, other: DenseOperator) -> DenseOperator:
        if self.dims != other.dims:
            raise ValueError(f"dims mismatch: {self.dims} vs {other.dims}")
        return DenseOperator(self.matrix @ other.matrix, self.dims)


def kron(a: DenseOperator, b: DenseOperator) -> DenseOperator:
    return DenseOperator(np.kron(a.matrix, b.matrix), a.dims + b.dims)


def kron_all(ops: Iterable[DenseOperator]) -> DenseOperator:
    ops = list(ops)
    if not ops:
        raise ValueError("kron_all needs at least one operator")
    out = ops[0]
    for op in ops[1:]:
        out = kron(out, op)
    return out


def partial_trace(op: DenseOperator, keep: Iterable[int]) -> DenseOperator:
    """Trace out every subsystem not in `keep`; kept subsystems stay in ascending order."""
    n = op.n_subsystems
    keep = sorted(set(keep))
    if any(i < 0 or i >= n for i in keep):
        raise ValueError(f"keep indices {keep} out of range for {n} subsystems")
    t = op.matrix.reshape(op.dims + op.dims)
    for ax in sorted((i for i in range(n) if i not in keep), reverse=True):
        half = t.ndim // 2
        t = np.trace(t, axis1=ax, axis2=ax + half)
    kept_dims = tuple(op.dims[i] for i in keep)
    side = math.prod(kept_dims)
    return DenseOperator(np.asarray(t).reshape(side, side), kept_dims)


def permute_subsystems(op: DenseOperator, perm: Sequence[int]) -> DenseOperator:
    """Reorder subsystems: new subsystem j is old subsystem perm[j]."""
    n = op.n_subsystems
    perm = list(perm)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"{perm} is not a permutation of {n} subsystems")
    t = op.matrix.reshape(op.dims + op.dims)
    t = t.transpose(perm + [n + p for p in perm])
    new_dims = tuple(op.dims[p] for p in perm)
    return DenseOperator(t.reshape(op.dim, op.dim), new_dims)


def embed(local: DenseOperator, sites: Sequence[int], dims: Sequence[int]) -> DenseOperator:
    """local (on `sites`, in the given order) tensored with identity elsewhere."""
    dims = tuple(dims)
    sites = list(sites)
    if local.dims != tuple(dims[i] for i in sites):
        raise ValueError(f"local dims {local.dims} do not match sites {sites} of {dims}")
    rest = [i for i in range(len(dims)) if i not in sites]
    full = local
    if rest:
        full = kron(local, DenseOperator.identity(tuple(dims[i] for i in rest)))
    # subsystem j of `full` is site order[j]
    order = sites + rest
    return permute_subsystems(full, [order.index(i) for i in range(len(dims))])


def site_to_copy_major(op: DenseOperator, n_sites: int, n_copies: int) -> DenseOperator:
    """Reorder a multi-copy operator from (site, copy) to (copy, site) subsystem order."""
    if op.n_subsystems != n_sites * n_copies:
        raise ValueError(f"expected {n_sites * n_copies} subsystems, got {op.n_subsystems}")
    perm = [s * n_copies + c for c in range(n_copies) for s in range(n_sites)]
    return permute_subsystems(op, perm)


def copy_to_site_major(op: DenseOperator, n_sites: int, n_copies: int) -> DenseOperator:
    if op.n_subsystems != n_sites * n_copies:
        raise ValueError(f"expected {n_sites * n_copies} subsystems, got {op.n_subsystems}")
    perm = [c * n_sites + s for s in range(n_sites) for c in range(n_copies)]
    return permute_subsystems(op, perm)


# ── Permutations ──────────────────────────────────────────────────────────


def compose(sigma: Sequence[int], tau: Sequence[int]) -> tuple[int, ...]:
    """sigma*tau: apply sigma, then tau. T_sigma T_tau = T_{compose(sigma, tau)}."""
    return tuple(tau[s] for s in sigma)


def invert(sigma: Sequence[int]) -> tuple[int, ...]:
    out = [0] * len(sigma)
    for i, s in enumerate(sigma):
        out[s] = i
    return tuple(out)


def perm_from_cycles(cycles: str, m: int) -> tuple[int, ...]:
    """Parse 1-based cycle notation such as "(12)(34)" or "(1234)"."""
    images = list(range(m))
    for group in re.findall(r"\(([^)]*)\)", cycles):
        points = [int(c) - 1 for c in re.findall(r"\d", group)]
        if any(p < 0 or p >= m for p in points):
            raise ValueError(f"cycle {group!r} out of range for {m} slots")
        for a, b in zip(points, points[1:] + points[:1]):
            images[a] = b
    if sorted(images) != list(range(m)):
        raise ValueError(f"{cycles!r} is not a permutation")
    return tuple(images)


def permutation_operator(
    sigma: Sequence[int],
    d: int,
    m: int | None = None,
    cap_qubits: int = PERMUTATION_QUBIT_CAP,
) -> DenseOperator:
    """T_sigma on m copies of a d-dimensional space."""
    sigma = tuple(sigma)
    m = len(sigma) if m is None else m
    if len(sigma) != m or sorted(sigma) != list(range(m)):
        raise ValueError(f"{sigma} is not a permutation of {m} slots")
    check_cap("permutation qubits", int(math.ceil(m * math.log2(d))), cap_qubits)
    side = d ** m
    eye = np.eye(side, dtype=complex)
    t = eye.reshape((d,) * m + (side,)).transpose(list(sigma) + [m])
    return DenseOperator(t.reshape(side, side), (d,) * m)


def cycles(sigma: Sequence[int]) -> list[tuple[int, ...]]:
    """Disjoint cycles of sigma (0-based), fixed points included, each starting at its smallest slot."""
    seen: set[int] = set()
    out = []
    for start in range(len(sigma)):
        if start in seen:
            continue
        cyc = []
        j = start
        while j not in seen:
            seen.add(j)
            cyc.append(j)
            j = sigma[j]
        out.append(tuple(cyc))
    return out


def cycle_trace(sigma: Sequence[int], mats: Sequence[np.ndarray]) -> complex:
    """Tr(T_sigma (A_0 x ... x A_{m-1})) as a product of traces over the cycles of sigma."""
    if len(mats) != len(sigma):
        raise ValueError(f"need {len(sigma)} matrices, got {len(mats)}")
    out = 1.0 + 0j
    for cyc in cycles(sigma):
        prod = mats[cyc[0]]
        for j in cyc[1:]:
            prod = prod @ mats[j]
        out *= np.trace(prod)
    return complex(out)


def apply_permutation_to_vectors(vectors: np.ndarray, sigma: Sequence[int], d: int) -> np.ndarray:
    """T_sigma applied to each column of a (d^m, r) array without building T_sigma."""
    m = len(sigma)
    r = vectors.shape[1]
    t = vectors.reshape((d,) * m + (r,))
    return t.transpose(list(sigma) + [m]).reshape(d ** m, r)


# ── Operator Schmidt decomposition ────────────────────────────────────────


def realign(op: DenseOperator, a_subsystems: Sequence[int]) -> np.ndarray:
    """Realigned matrix R[(a, a'), (b, b')] = O[(a b), (a' b')] for the cut A|B.

    A subsystems are moved to the front (in the given order) before reshaping.
    """
    a = list(a_subsystems)
    b = [i for i in range(op.n_subsystems) if i not in a]
    moved = permute_subsystems(op, a + b)
    d_a = math.prod(op.dims[i] for i in a)
    d_b = math.prod(op.dims[i] for i in b)
    t = moved.matrix.reshape(d_a, d_b, d_a, d_b).transpose(0, 2, 1, 3)
    return t.reshape(d_a * d_a, d_b * d_b)


def operator_schmidt(op: DenseOperator, a_subsystems: Sequence[int]) -> np.ndarray:
    """Operator Schmidt weights lambda_i = s_i^2 / d across the cut, descending.

    They sum to ||O||_2^2 / d, which is 1 for unitaries.
    """
    if op.hs_norm_sq() == 0.0:
        raise ValueError("operator_schmidt is undefined for the zero operator")
    s = svdvals(realign(op, a_subsystems))
    return (s ** 2) / op.dim


# ── Fixtures ──────────────────────────────────────────────────────────────


def save_operators(path: str | Path, **ops: DenseOperator) -> None:
    """Store operators in a .npz archive (matrix and dims per name)."""
    payload = {}
    for name, op in ops.items():
        payload[f"{name}__matrix"] = op.matrix
        payload[f"{name}__dims"] = np.asarray(op.dims, dtype=np.int64)
    np.savez(Path(path), **payload)


def load_operators(path: str | Path) -> dict[str, DenseOperator]:
    with np.load(Path(path)) as data:
        names = sorted({key.rsplit("__", 1)[0] for key in data.files})
        return {
            name: DenseOperator(data[f"{name}__matrix"], tuple(int(d) for d in data[f"{name}__dims"]))
            for name in names
        }
