"""Fourth-moment Clifford twirl and the ensemble-averaged A-OTOC and APEP.

The commutant of the four-copy Clifford action is spanned by Q T_pi and
(I - Q) T_pi for pi in S4, with Q = (1/d^2) sum_P P^{(x)4}. The twirl is the
orthogonal projection onto that span:

    Phi(O) = sum_{pi, sigma} [ W+(pi^-1 sigma) Tr(Q T_sigma^-1 O) Q T_pi
                             + W-(pi^-1 sigma) Tr((I - Q) T_sigma^-1 O) (I - Q) T_pi ]

with W+- the class functions sum_lambda d_lambda^2 chi_lambda / (576 D+-_lambda).
Q and T_pi are tensor products of 16 x 16 site factors, so every trace the
ensemble averages need is a product of single-site traces. The finite-L
averages are evaluated exactly in rational arithmetic; only the noisy
single-site scalars are floating point.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.optimize import minimize
from sympy.combinatorics import Permutation

from ..errors import NumericalError, check_cap
from ..linalg.channels import QuantumChannel, axis_rotation, natural_representation, unitary_channel
from ..linalg.operators import DenseOperator, kron_all, perm_from_cycles, permutation_operator
from ..linalg.sampling import SeedLike, as_generator
from ..models import Bipartition, ComparisonReport
from ..stabilizer.tableau import enumerate_cliffords
from .nonlocal_magic import DENSE_Q_CAP, lambda_site, q_projector
from .scrambling import haar_avg_aotoc_infinite

logger = logging.getLogger(__name__)

FACTORIZED_CAP = 64
TWIRL_CAP = 2
SCALAR_MERGE_TOL = 1e-12

# Conjugacy classes by cycle type, and irreps by partition, in this order.
CLASS_TYPES = ((1, 1, 1, 1), (2, 1, 1), (2, 2), (3, 1), (4,))
CLASS_SIZES = (1, 6, 3, 8, 6)
PARTITIONS = ((4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1))
IRREP_DIMS = (1, 3, 2, 3, 1)
CHARACTERS = (
    (1, 1, 1, 1, 1),
    (3, 1, -1, 0, -1),
    (2, 0, 2, -1, 0),
    (3, -1, -1, 0, 1),
    (1, -1, 1, 1, -1),
)


# ── Symmetric group S4 ────────────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class S4Data:
    """The 24 permutations of four copies with products, inverses and characters."""

    elements: tuple[tuple[int, ...], ...]
    product: np.ndarray  # product[i, j] = index of T_i T_j
    inverse: tuple[int, ...]
    class_of: tuple[int, ...]
    n_cycles: tuple[int, ...]

    def index(self, sigma: Sequence[int]) -> int:
        return self.elements.index(tuple(sigma))

    def character(self, irrep: int, g: int) -> int:
        return CHARACTERS[irrep][self.class_of[g]]

    def check_orthogonality(self) -> None:
        for lam, mu in itertools.product(range(5), repeat=2):
            total = sum(s * CHARACTERS[lam][c] * CHARACTERS[mu][c] for c, s in enumerate(CLASS_SIZES))
            if total != (24 if lam == mu else 0):
                raise NumericalError(f"S4 character table fails orthogonality for irreps {lam}, {mu}")
        if sum(d * d for d in IRREP_DIMS) != 24:
            raise NumericalError("S4 irrep dimensions do not square-sum to 24")
        counts = [self.class_of.count(c) for c in range(5)]
        if tuple(counts) != CLASS_SIZES:
            raise NumericalError(f"S4 class sizes {counts} differ from {CLASS_SIZES}")


def _cycle_type(p: Permutation) -> tuple[int, ...]:
    lengths = [length for length, count in p.cycle_structure.items() for _ in range(count)]
    lengths += [1] * (p.size - sum(lengths))
    return tuple(sorted(lengths, reverse=True))


@lru_cache(maxsize=1)
def s4() -> S4Data:
    perms = [Permutation(list(sigma)) for sigma in itertools.permutations(range(4))]
    elements = tuple(tuple(p.array_form) for p in perms)
    lookup = {e: i for i, e in enumerate(elements)}
    # sympy's p*q applies p first, matching T_p T_q = T_{p*q}
    product = np.array([[lookup[tuple((p * q).array_form)] for q in perms] for p in perms], dtype=np.int64)
    product.setflags(write=False)
    types = [_cycle_type(p) for p in perms]
    data = S4Data(
        elements=elements,
        product=product,
        inverse=tuple(lookup[tuple((~p).array_form)] for p in perms),
        class_of=tuple(CLASS_TYPES.index(t) for t in types),
        n_cycles=tuple(len(t) for t in types),
    )
    data.check_orthogonality()
    return data


# ── Single-site factors ───────────────────────────────────────────────────


@lru_cache(maxsize=1)
def _site_permutations() -> tuple[np.ndarray, ...]:
    return tuple(permutation_operator(sigma, 2).matrix for sigma in s4().elements)


def _exact_int(x: complex, what: str) -> int:
    n = round(x.real)
    if abs(x - n) > 1e-9:
        raise NumericalError(f"{what} should be an integer, got {x}")
    return int(n)


@lru_cache(maxsize=1)
def _site_trace_tables() -> tuple[np.ndarray, np.ndarray]:
    """tq[a, b] = tr(t_a q t_b) and tt[a, b] = tr(t_a t_b) on one site, exact integers."""
    q = lambda_site() / 4.0
    ts = _site_permutations()
    tq = np.array([[_exact_int(np.trace(ta @ q @ tb), "tr(t q t)") for tb in ts] for ta in ts], dtype=object)
    tt = np.array([[_exact_int(np.trace(ta @ tb), "tr(t t)") for tb in ts] for ta in ts], dtype=object)
    return tq, tt


@dataclass(frozen=True)
class BoundaryTerm:
    """coefficient * d_B^d_b_power * Tr(R Phi(Xi)), R = t_a on A sites and t_b on B sites."""

    coefficient: int
    d_b_power: int
    a_perm: tuple[int, ...]
    b_perm: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class SiteFactorSet:
    """Per-site 16 x 16 factors of a factorized four-copy average.

    `noisy` and `clean` are the site factors of the averaged operator Xi;
    `boundary` lists the permutation operators it is traced against.
    """

    noisy: np.ndarray
    clean: np.ndarray
    boundary: tuple[BoundaryTerm, ...]
    lam: np.ndarray = field(default_factory=lambda_site)

    @property
    def t(self) -> dict[tuple[int, ...], np.ndarray]:
        return dict(zip(s4().elements, _site_permutations()))


# A-OTOC: Tr((d_B S - S_A) E^{(x)2}(S_A)) with the Kraus operators laid out as
# K_a (x) K_b (x) K_a^dagger (x) K_b^dagger over the four copies.
_AOTOC_BOUNDARY = (
    BoundaryTerm(1, 1, perm_from_cycles("(14)(23)", 4), perm_from_cycles("(1324)", 4)),
    BoundaryTerm(-1, 0, perm_from_cycles("(14)(23)", 4), perm_from_cycles("(13)(24)", 4)),
)
# APEP: Tr(T^A_(12)(34) U^{(x)4} Q U^{dagger (x)4})
_APEP_BOUNDARY = (
    BoundaryTerm(1, 0, perm_from_cycles("(12)(34)", 4), tuple(range(4))),
)


def _single_qubit(noise: QuantumChannel) -> None:
    if noise.dims != (2,):
        raise ValueError(f"expected a single-qubit channel, got dims {noise.dims}")


def aotoc_site_factors(noise: QuantumChannel) -> SiteFactorSet:
    _single_qubit(noise)
    xi = np.zeros((16, 16), dtype=complex)
    for ka in noise.kraus:
        for kb in noise.kraus:
            xi += kron_all(
                DenseOperator(m, (2,)) for m in (ka, kb, ka.conj().T, kb.conj().T)
            ).matrix
    return SiteFactorSet(noisy=xi, clean=np.eye(16, dtype=complex), boundary=_AOTOC_BOUNDARY)


def _four_copies(u: np.ndarray) -> np.ndarray:
    return kron_all([DenseOperator(np.asarray(u, dtype=complex), (2,))] * 4).matrix


def _check_single_qubit_unitary(u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2) or not np.allclose(u.conj().T @ u, np.eye(2), atol=1e-10):
        raise ValueError("expected a 2x2 unitary")
    return u


def apep_site_factors(u: np.ndarray) -> SiteFactorSet:
    u4 = _four_copies(_check_single_qubit_unitary(u))
    q = lambda_site() / 4.0
    return SiteFactorSet(noisy=u4 @ q @ u4.conj().T, clean=q.astype(complex), boundary=_APEP_BOUNDARY)


# ── Weingarten table ──────────────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class WeingartenTable:
    """Exact Weingarten class functions for the Q and I - Q sectors at L qubits."""

    n_qubits: int
    d_plus: tuple[Fraction, ...]
    d_minus: tuple[Fraction, ...]
    kernel_plus: tuple[Fraction, ...]
    kernel_minus: tuple[Fraction, ...]
    vanishing: tuple[tuple[str, tuple[int, ...]], ...] = ()

    def _matrix(self, kernel: tuple[Fraction, ...]) -> np.ndarray:
        g = s4()
        return np.array([
            [float(kernel[g.product[g.inverse[pi], sigma]]) for sigma in range(24)]
            for pi in range(24)
        ])

    @property
    def w_plus(self) -> np.ndarray:
        """W+[pi, sigma] = w+(pi^-1 sigma)."""
        return self._matrix(self.kernel_plus)

    @property
    def w_minus(self) -> np.ndarray:
        return self._matrix(self.kernel_minus)


def gram_class_functions(n_qubits: int) -> tuple[list[int], list[int]]:
    """f+(g) = Tr(Q T_g) and f-(g) = Tr((I - Q) T_g) at L qubits, exact."""
    g = s4()
    tq, _ = _site_trace_tables()
    e = g.index((0, 1, 2, 3))
    f_plus = [int(tq[e, i]) ** n_qubits for i in range(24)]
    f_full = [2 ** (n_qubits * g.n_cycles[i]) for i in range(24)]
    return f_plus, [a - b for a, b in zip(f_full, f_plus)]


def _kernel(denominators: list[Fraction], sign: str, vanishing: list) -> tuple[Fraction, ...]:
    g = s4()
    out = []
    for i in range(24):
        total = Fraction(0)
        for lam in range(5):
            if denominators[lam] == 0:
                continue
            total += Fraction(IRREP_DIMS[lam] ** 2, 576) * g.character(lam, i) / denominators[lam]
        out.append(total)
    for lam in range(5):
        if denominators[lam] == 0:
            vanishing.append((sign, PARTITIONS[lam]))
    return tuple(out)


@lru_cache(maxsize=None)
def weingarten_table(n_qubits: int) -> WeingartenTable:
    """D+-_lambda = (1/24) sum_g f+-(g) chi_lambda(g) and the resulting kernels.

    Sectors with a vanishing D are dropped (the commutant basis is linearly
    dependent there), which gives the Moore-Penrose inverse of the Gram matrix.
    """
    if n_qubits < 1:
        raise ValueError(f"n_qubits must be >= 1, got {n_qubits}")
    g = s4()
    f_plus, f_minus = gram_class_functions(n_qubits)
    d_plus = [Fraction(sum(f_plus[i] * g.character(lam, i) for i in range(24)), 24) for lam in range(5)]
    d_minus = [Fraction(sum(f_minus[i] * g.character(lam, i) for i in range(24)), 24) for lam in range(5)]
    vanishing: list[tuple[str, tuple[int, ...]]] = []
    kernel_plus = _kernel(d_plus, "+", vanishing)
    kernel_minus = _kernel(d_minus, "-", vanishing)
    for sign, partition in vanishing:
        logger.debug("Weingarten L=%d: D%s%s vanishes, sector dropped", n_qubits, sign, list(partition))
    return WeingartenTable(
        n_qubits=n_qubits,
        d_plus=tuple(d_plus),
        d_minus=tuple(d_minus),
        kernel_plus=kernel_plus,
        kernel_minus=kernel_minus,
        vanishing=tuple(vanishing),
    )


# ── Dense twirl (small L) ─────────────────────────────────────────────────


def _dense_commutant(n_qubits: int) -> tuple[np.ndarray, list[np.ndarray]]:
    q = q_projector(n_qubits).matrix
    d = 2 ** n_qubits
    ts = [permutation_operator(sigma, d).matrix for sigma in s4().elements]
    return q, ts


def moment_decomposition(
    op: DenseOperator, n_qubits: int, table: WeingartenTable | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Coefficients b+_pi, b-_pi of Phi(O) on the Q T_pi and (I - Q) T_pi basis."""
    check_cap("dense four-copy qubits", n_qubits, DENSE_Q_CAP)
    if op.dim != 16 ** n_qubits:
        raise ValueError(f"expected a four-copy operator of side {16 ** n_qubits}, got {op.dim}")
    table = table or weingarten_table(n_qubits)
    g = s4()
    q, ts = _dense_commutant(n_qubits)
    m = op.matrix
    full = np.array([np.sum(ts[g.inverse[s]].T * m) for s in range(24)])
    plus = np.array([np.sum((q @ ts[g.inverse[s]]).T * m) for s in range(24)])
    b_plus = table.w_plus @ plus
    b_minus = table.w_minus @ (full - plus)
    return b_plus, b_minus


def phi_clifford_4(op: DenseOperator, n_qubits: int, table: WeingartenTable | None = None) -> DenseOperator:
    """Four-copy Clifford twirl of a dense operator (copy-major, L <= 2)."""
    b_plus, b_minus = moment_decomposition(op, n_qubits, table)
    q, ts = _dense_commutant(n_qubits)
    eye = np.eye(q.shape[0])
    t_plus = sum(b * t for b, t in zip(b_plus, ts))
    t_minus = sum(b * t for b, t in zip(b_minus, ts))
    return DenseOperator(q @ t_plus + (eye - q) @ t_minus, op.dims)


def _conjugate_copies(o: np.ndarray, c: np.ndarray, m: int) -> np.ndarray:
    """C^{(x)m} O C^{dagger (x)m} without forming C^{(x)m}."""
    d = c.shape[0]
    t = o.reshape((d,) * (2 * m))
    cd = c.conj()
    for j in range(m):
        t = np.moveaxis(np.tensordot(c, t, axes=([1], [j])), 0, j)
        t = np.moveaxis(np.tensordot(t, cd, axes=([m + j], [1])), -1, m + j)
    return t.reshape(o.shape)


def twirl_exhaustive(op: DenseOperator, n_qubits: int, cap: int = TWIRL_CAP) -> DenseOperator:
    """Mean of C^{(x)4} O C^{dagger (x)4} over every n-qubit Clifford (24 or 11520 of them)."""
    check_cap("exhaustive twirl qubits", n_qubits, cap)
    if op.dim != 16 ** n_qubits:
        raise ValueError(f"expected a four-copy operator of side {16 ** n_qubits}, got {op.dim}")
    total = np.zeros_like(op.matrix)
    count = 0
    for tab in enumerate_cliffords(n_qubits, cap=cap):
        total += _conjugate_copies(op.matrix, tab.to_dense().matrix, 4)
        count += 1
    logger.debug("twirl_exhaustive: averaged %d Cliffords on %d qubit(s)", count, n_qubits)
    return DenseOperator(total / count, op.dims)


# ── Factorized finite-L averages ──────────────────────────────────────────


def _merge_scalars(values: list[complex], tol: float = SCALAR_MERGE_TOL) -> list[complex]:
    """Snap near-integers and merge scalars equal within tol, so equal values share one float."""
    reps: list[complex] = []
    out = []
    for v in values:
        re, im = v.real, v.imag
        if abs(re - round(re)) < tol:
            re = float(round(re))
        if abs(im - round(im)) < tol:
            im = float(round(im))
        v = complex(re, im)
        for r in reps:
            if abs(r - v) <= tol * max(1.0, abs(v)):
                v = r
                break
        else:
            reps.append(v)
        out.append(v)
    return out


def _boundary_vectors(term: BoundaryTerm, n_a: int, n_b: int) -> tuple[list[int], list[int]]:
    g = s4()
    tq, tt = _site_trace_tables()
    a, b = g.index(term.a_perm), g.index(term.b_perm)
    r_plus = [int(tq[a, p]) ** n_a * int(tq[b, p]) ** n_b for p in range(24)]
    r_full = [int(tt[a, p]) ** n_a * int(tt[b, p]) ** n_b for p in range(24)]
    return r_plus, [x - y for x, y in zip(r_full, r_plus)]


def _apply_kernel(kernel: tuple[Fraction, ...], r: list[int]) -> list[Fraction]:
    """y_sigma = sum_pi r_pi w(pi^-1 sigma)."""
    g = s4()
    y = [Fraction(0)] * 24
    for pi in range(24):
        if r[pi] == 0:
            continue
        row = g.product[g.inverse[pi]]
        for sigma in range(24):
            y[sigma] += r[pi] * kernel[row[sigma]]
    return y


def factorized_trace(factors: SiteFactorSet, k: int, n_a: int, n_b: int) -> float:
    """sum over boundary terms of coefficient * d_B^power * Tr(R Phi(Xi)) / d^2.

    Xi carries `factors.noisy` on k sites and `factors.clean` on the others.
    """
    n = n_a + n_b
    if not 0 <= k <= n:
        raise ValueError(f"k must be in [0, {n}], got {k}")
    g = s4()
    table = weingarten_table(n)
    q = lambda_site() / 4.0
    ts = _site_permutations()

    noisy_q, noisy_t, clean_q, clean_t = [], [], [], []
    for sigma in range(24):
        t_inv = ts[g.inverse[sigma]]
        noisy_q.append(complex(np.trace(q @ t_inv @ factors.noisy)))
        noisy_t.append(complex(np.trace(t_inv @ factors.noisy)))
        clean_q.append(_exact_int(complex(np.trace(q @ t_inv @ factors.clean)), "clean site trace"))
        clean_t.append(_exact_int(complex(np.trace(t_inv @ factors.clean)), "clean site trace"))
    merged = _merge_scalars(noisy_q + noisy_t)
    noisy_q, noisy_t = merged[:24], merged[24:]

    coefficients: dict[complex, Fraction] = {}
    for term in factors.boundary:
        r_plus, r_minus = _boundary_vectors(term, n_a, n_b)
        y_plus = _apply_kernel(table.kernel_plus, r_plus)
        y_minus = _apply_kernel(table.kernel_minus, r_minus)
        scale = term.coefficient * (2 ** n_b) ** term.d_b_power
        for sigma in range(24):
            # v+ = cq^(L-k) nq^k, v- = ct^(L-k) nt^k - v+
            c_q = scale * (y_plus[sigma] - y_minus[sigma]) * clean_q[sigma] ** (n - k)
            c_t = scale * y_minus[sigma] * clean_t[sigma] ** (n - k)
            coefficients[noisy_q[sigma]] = coefficients.get(noisy_q[sigma], Fraction(0)) + c_q
            coefficients[noisy_t[sigma]] = coefficients.get(noisy_t[sigma], Fraction(0)) + c_t

    total = Fraction(0)
    for scalar, coeff in coefficients.items():
        if coeff:
            total += coeff * Fraction((scalar ** k).real)
    return float(total / 4 ** n)


def _resolve_cut(n_qubits: int, cut: Bipartition | None) -> Bipartition:
    cut = cut or Bipartition.symmetric(n_qubits)
    if cut.n_sites != n_qubits:
        raise ValueError(f"cut has {cut.n_sites} sites, expected {n_qubits}")
    return cut


def avg_aotoc_finite_L(
    noise: QuantumChannel,
    k: int,
    n_qubits: int,
    cut: Bipartition | None = None,
    cap: int = FACTORIZED_CAP,
) -> float:
    """Clifford-averaged A-OTOC of C^dagger (E^{(x)k} (x) id) C at finite L, exact up to the noise scalars."""
    _single_qubit(noise)
    check_cap("factorized qubits", n_qubits, cap)
    if n_qubits % 2:
        raise ValueError(f"the symmetric cut needs an even number of qubits, got {n_qubits}")
    cut = _resolve_cut(n_qubits, cut)
    if not cut.is_symmetric:
        raise ValueError("ensemble averages are defined for the symmetric cut only")
    if not 1 <= k <= n_qubits:
        raise ValueError(f"k must be in [1, {n_qubits}], got {k}")
    half = n_qubits // 2
    value = factorized_trace(aotoc_site_factors(noise), k, half, half)
    logger.debug("avg_aotoc_finite_L: L=%d k=%d -> %.12g", n_qubits, k, value)
    return value


def avg_apep_finite_L(
    u: np.ndarray,
    k: int,
    n_qubits: int,
    cut: Bipartition | None = None,
    cap: int = FACTORIZED_CAP,
) -> float:
    """Clifford-averaged APEP of C^dagger (u^{(x)k} (x) I) at finite L.

    Odd L uses the floor(L/2) | ceil(L/2) cut.
    """
    check_cap("factorized qubits", n_qubits, cap)
    cut = _resolve_cut(n_qubits, cut)
    n_a = len(cut.a_sites)
    if n_a != n_qubits // 2:
        raise ValueError("ensemble averages are defined for the balanced cut only")
    if not 1 <= k <= n_qubits:
        raise ValueError(f"k must be in [1, {n_qubits}], got {k}")
    value = 1.0 - factorized_trace(apep_site_factors(u), k, n_a, n_qubits - n_a)
    logger.debug("avg_apep_finite_L: L=%d k=%d -> %.12g", n_qubits, k, value)
    return value


# ── L -> infinity limits and closed forms ─────────────────────────────────


@dataclass(frozen=True)
class ButterflyFactors:
    """Per-site scalars of the large-L Clifford A-OTOC a^k - s^k."""

    a: float  # ||X/2||_2^2
    s: float  # Tr(T_(12)(34) (X (x) X^dagger) Lambda) / 16

    def aotoc(self, k: int) -> float:
        return self.a ** k - self.s ** k


def site_factors(noise: QuantumChannel) -> ButterflyFactors:
    _single_qubit(noise)
    rep = natural_representation(noise)
    x = rep.X.matrix
    xx = np.kron(x, x.conj().T)
    t = permutation_operator(perm_from_cycles("(12)(34)", 4), 2).matrix
    s = float(np.trace(t @ xx @ lambda_site()).real) / 16.0
    return ButterflyFactors(a=rep.hs_half_norm_sq, s=s)


def avg_aotoc_infinite(noise: QuantumChannel, k: int) -> float:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return site_factors(noise).aotoc(k)


_KLEIN = ("()", "(12)(34)", "(13)(24)", "(14)(23)")


def apep_site_terms(u: np.ndarray) -> tuple[float, ...]:
    """tau_pi = Tr(t_pi u^{(x)4} Lambda u^{dagger (x)4} Lambda) / 64 for pi in the Klein group.

    The identity unitary gives tau = 1 for every pi, so Clifford u gives zero APEP.
    """
    u4 = _four_copies(_check_single_qubit_unitary(u))
    lam = lambda_site()
    m = u4 @ lam @ u4.conj().T @ lam
    return tuple(
        float(np.trace(permutation_operator(perm_from_cycles(c, 4), 2).matrix @ m).real) / 64.0
        for c in _KLEIN
    )


def avg_apep_infinite(u: np.ndarray, k: int) -> float:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return 1.0 - 0.25 * sum(tau ** k for tau in apep_site_terms(u))


def rz_aotoc_closed_form(theta: float, k: int) -> float:
    return 1.0 - ((3.0 + math.cos(2 * theta)) / 4.0) ** k


def rz_apep_closed_form(theta: float, k: int) -> float:
    return 1.0 - ((7.0 + math.cos(4 * theta)) / 8.0) ** k


def general_axis_aotoc_closed_form(theta: float, gamma: float, phi: float, k: int) -> float:
    sg2 = math.sin(gamma) ** 2
    spcp = (math.sin(phi) * math.cos(phi)) ** 2
    inner = 3.0 + math.cos(2 * theta) - 8.0 * sg2 * (math.cos(gamma) ** 2 + sg2 * spcp) * math.sin(theta / 2) ** 4
    return 1.0 - (inner / 4.0) ** k


@dataclass(frozen=True)
class RotationOptimum:
    value: float
    theta: float  # in [0, pi]
    axis: tuple[float, float, float]


def _canonical_rotation(theta: float, gamma: float, phi: float) -> tuple[float, tuple[float, float, float]]:
    axis = np.array([math.sin(gamma) * math.cos(phi), math.sin(gamma) * math.sin(phi), math.cos(gamma)])
    theta = theta % (2 * math.pi)
    # R(2 pi - theta, n) = -R(theta, -n); the global sign drops out of the channel
    if theta > math.pi:
        theta, axis = 2 * math.pi - theta, -axis
    return theta, (float(axis[0]), float(axis[1]), float(axis[2]))


def maximize_aotoc_over_rotations(k: int = 1, n_starts: int = 8, seed: SeedLike = None) -> RotationOptimum:
    """Largest large-L Clifford A-OTOC over single-qubit rotation noise.

    Nelder-Mead on (theta, gamma, phi) from n_starts random points, scored by
    the Weingarten engine rather than the closed form; the best run is kept.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if n_starts < 1:
        raise ValueError(f"n_starts must be >= 1, got {n_starts}")
    rng = as_generator(seed)

    def negative(params: np.ndarray) -> float:
        return -avg_aotoc_infinite(unitary_channel(axis_rotation(*params)), k)

    best = None
    for _ in range(n_starts):
        start = rng.uniform((0.0, 0.0, 0.0), (2 * math.pi, math.pi, 2 * math.pi))
        result = minimize(
            negative, start, method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 5000},
        )
        if best is None or result.fun < best.fun:
            best = result
    theta, axis = _canonical_rotation(*best.x)
    logger.debug("maximize_aotoc_over_rotations: k=%d G=%.12g theta=%.6f axis=%s", k, -best.fun, theta, axis)
    return RotationOptimum(value=float(-best.fun), theta=theta, axis=axis)


def haar_vs_clifford_report(noise: QuantumChannel, k: int) -> ComparisonReport:
    """Large-L Clifford and Haar averages side by side; APEP only for unitary noise."""
    _single_qubit(noise)
    apep = avg_apep_infinite(noise.kraus[0], k) if noise.is_unitary(1e-10) else None
    return ComparisonReport(
        k=k,
        clifford_aotoc=avg_aotoc_infinite(noise, k),
        haar_aotoc=haar_avg_aotoc_infinite(natural_representation(noise), k),
        clifford_apep=apep,
    )
