"""Core data models for noisyclifford."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence


class NoiseKind(str, Enum):
    """Single-qubit noise families understood by the CLI and experiments."""

    RZ = "rz"
    GENERAL_AXIS = "general-axis"
    DEPOLARIZING = "depolarizing"
    PAULI = "pauli"
    KRAUS_FILE = "kraus-file"

    @property
    def is_unitary(self) -> bool:
        return self in (NoiseKind.RZ, NoiseKind.GENERAL_AXIS)


@dataclass
class NoiseSpec:
    """Parameters of a single-qubit noise channel."""

    kind: NoiseKind = NoiseKind.RZ
    theta: float = 0.0
    gamma: float = 0.0
    phi: float = 0.0
    p: float = 0.0
    px: float = 0.0
    py: float = 0.0
    pz: float = 0.0
    kraus_file: str = ""

    def validate(self) -> None:
        for name in ("theta", "gamma", "phi"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"noise.{name} must be a finite real number")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"noise.p must be in [0, 1], got {self.p}")
        for name in ("px", "py", "pz"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"noise.{name} must be >= 0, got {getattr(self, name)}")
        if self.px + self.py + self.pz > 1.0 + 1e-12:
            raise ValueError("noise.px + noise.py + noise.pz must not exceed 1")
        if self.kind == NoiseKind.KRAUS_FILE and not self.kraus_file:
            raise ValueError("noise kind 'kraus-file' requires a .npy path")


@dataclass(frozen=True)
class Bipartition:
    """Assignment of qubit sites to the two halves A and B of a cut.

    Sites carry local dimension `local_dim`; the labels are "A" or "B".
    """

    assignment: tuple[str, ...]
    local_dim: int = 2

    def __post_init__(self) -> None:
        if not self.assignment:
            raise ValueError("Bipartition needs at least one site")
        bad = [label for label in self.assignment if label not in ("A", "B")]
        if bad:
            raise ValueError(f"Bipartition labels must be 'A' or 'B', got {bad[0]!r}")

    @classmethod
    def symmetric(cls, n_sites: int) -> Bipartition:
        """First floor(n/2) sites in A, the rest in B."""
        if n_sites < 1:
            raise ValueError(f"n_sites must be >= 1, got {n_sites}")
        n_a = n_sites // 2
        return cls(tuple("A" * n_a + "B" * (n_sites - n_a)))

    @classmethod
    def from_sites(cls, n_sites: int, a_sites: Sequence[int]) -> Bipartition:
        a = set(a_sites)
        if any(s < 0 or s >= n_sites for s in a):
            raise ValueError(f"A sites {sorted(a)} out of range for {n_sites} sites")
        return cls(tuple("A" if s in a else "B" for s in range(n_sites)))

    @property
    def n_sites(self) -> int:
        return len(self.assignment)

    @property
    def a_sites(self) -> tuple[int, ...]:
        return tuple(i for i, label in enumerate(self.assignment) if label == "A")

    @property
    def b_sites(self) -> tuple[int, ...]:
        return tuple(i for i, label in enumerate(self.assignment) if label == "B")

    @property
    def d_A(self) -> int:
        return self.local_dim ** len(self.a_sites)

    @property
    def d_B(self) -> int:
        return self.local_dim ** len(self.b_sites)

    @property
    def dims(self) -> tuple[int, ...]:
        return (self.local_dim,) * self.n_sites

    @property
    def is_symmetric(self) -> bool:
        return len(self.a_sites) == len(self.b_sites)

    @property
    def n_a_normalizer(self) -> float:
        """N_A = (d_A + 1) / d_A, the state-form normalization."""
        return (self.d_A + 1) / self.d_A


@dataclass(frozen=True)
class Estimate:
    """A Monte Carlo mean with its standard error."""

    value: float
    stderr: float
    n_samples: int

    def within(self, target: float, n_sigma: float = 3.0, atol: float = 1e-12) -> bool:
        return abs(self.value - target) <= n_sigma * self.stderr + atol


@dataclass(frozen=True)
class ComparisonReport:
    """Haar and Clifford ensemble values for one noise model and k."""

    k: int
    clifford_aotoc: float
    haar_aotoc: float
    clifford_apep: float | None = None  # only defined for unitary noise


@dataclass
class RobustnessSolution:
    """Optimal quasi-probability decomposition over stabilizer states."""

    value: float
    q: list[float]
    residual: float
    duality_gap: float

    @property
    def total_weight(self) -> float:
        return float(sum(self.q))


@dataclass(frozen=True)
class SweepRow:
    """One row of the APEP-vs-capacity dataset."""

    unitary_index: int
    capacity: float
    k: int
    apep: float


@dataclass
class FitResult:
    """Joint fit of APEP = 1 - |cos(a (K - 1))|^(b k)."""

    a: float
    b: float
    a_stderr: float
    b_stderr: float
    rss: float
    converged: bool = True
    n_evaluations: int = 0
    message: str = ""
    a_ci95: tuple[float, float] | None = None
    b_ci95: tuple[float, float] | None = None
    bootstrap_samples: list[tuple[float, float]] = field(default_factory=list)
    bootstrap_failures: int = 0


@dataclass
class TypicalityRecord:
    """Mean over sampled noise of the variance over sampled Cliffords."""

    L: int
    k: int
    variances: list[float]
    mean_variance: float
    stderr_of_mean_variance: float

    @property
    def n(self) -> int:
        return len(self.variances)
