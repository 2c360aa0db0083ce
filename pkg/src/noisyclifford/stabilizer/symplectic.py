"""Exact uniform sampling and enumeration of the symplectic group Sp(2n, F_2).

Uses the canonical coset decomposition of Koenig and Smolin: an index i in
[0, |Sp(2n)|) maps bijectively to a group element through a chain of
symplectic transvections. Internally vectors are interleaved
(x_0, z_0, x_1, z_1, ...); `to_block_order` converts a result to the block
layout (x_0..x_{n-1}, z_0..z_{n-1}) used by tableaus.
"""

from __future__ import annotations

import logging
from functools import lru_cache

import numpy as np

logger = logging.getLogger(__name__)


def number_of_cosets(n: int) -> int:
    """|Sp(2n)| / |Sp(2n-2)| = 2^(2n-1) (2^(2n) - 1)."""
    return (1 << (2 * n - 1)) * ((1 << (2 * n)) - 1)


def number_of_symplectic(n: int) -> int:
    out = 1
    for j in range(1, n + 1):
        out *= number_of_cosets(j)
    return out


def inner(v: np.ndarray, w: np.ndarray) -> int:
    """Symplectic form on interleaved vectors."""
    return int((np.dot(v[0::2], w[1::2]) + np.dot(v[1::2], w[0::2])) % 2)


def transvection(k: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Z_k v = v + <k, v> k."""
    return (v + inner(k, v) * k) % 2


def _int_to_bits_lsb(i: int, n: int) -> np.ndarray:
    return np.array([(i >> j) & 1 for j in range(n)], dtype=np.int64)


def find_transvection(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """h1, h2 with y = Z_h1 Z_h2 x (either may be zero)."""
    size = x.size
    h1 = np.zeros(size, dtype=np.int64)
    h2 = np.zeros(size, dtype=np.int64)
    if np.array_equal(x, y):
        return h1, h2
    if inner(x, y) == 1:
        return (x + y) % 2, h2

    z = np.zeros(size, dtype=np.int64)
    for i in range(size // 2):
        ii = 2 * i
        if (x[ii] + x[ii + 1]) != 0 and (y[ii] + y[ii + 1]) != 0:
            z[ii] = (x[ii] + y[ii]) % 2
            z[ii + 1] = (x[ii + 1] + y[ii + 1]) % 2
            if (z[ii] + z[ii + 1]) == 0:
                z[ii + 1] = 1
                if x[ii] != x[ii + 1]:
                    z[ii] = 1
            return (x + z) % 2, (y + z) % 2

    # no pair where both are nonzero: use one where x is 00 and one where y is 00
    for i in range(size // 2):
        ii = 2 * i
        if (x[ii] + x[ii + 1]) != 0 and (y[ii] + y[ii + 1]) == 0:
            if x[ii] == x[ii + 1]:
                z[ii + 1] = 1
            else:
                z[ii + 1] = x[ii]
                z[ii] = x[ii + 1]
            break
    for i in range(size // 2):
        ii = 2 * i
        if (x[ii] + x[ii + 1]) == 0 and (y[ii] + y[ii + 1]) != 0:
            if y[ii] == y[ii + 1]:
                z[ii + 1] = 1
            else:
                z[ii + 1] = y[ii]
                z[ii] = y[ii + 1]
            break
    return (x + z) % 2, (y + z) % 2


def symplectic_from_digits(digits: list[int]) -> np.ndarray:
    """Group element from per-level coset digits, digits[j] in [0, number_of_cosets(n - j)).

    digits[0] belongs to the outermost level n = len(digits).
    """
    n = len(digits)
    nn = 2 * n
    i = digits[0]
    s = (1 << nn) - 1
    k = (i % s) + 1
    i //= s

    f1 = _int_to_bits_lsb(k, nn)
    e1 = np.zeros(nn, dtype=np.int64)
    e1[0] = 1
    t0, t1 = find_transvection(e1, f1)

    bits = _int_to_bits_lsb(i % (1 << (nn - 1)), nn - 1)
    eprime = e1.copy()
    eprime[2:] = bits[1:]
    h0 = transvection(t1, transvection(t0, eprime))
    if bits[0] == 1:
        f1 = np.zeros(nn, dtype=np.int64)

    g = np.zeros((nn, nn), dtype=np.int64)
    g[:2, :2] = np.eye(2, dtype=np.int64)
    if n > 1:
        g[2:, 2:] = symplectic_from_digits(digits[1:])
    for j in range(nn):
        row = transvection(t0, g[j])
        row = transvection(t1, row)
        row = transvection(h0, row)
        g[j] = transvection(f1, row)
    return g


def digits_from_index(index: int, n: int) -> list[int]:
    """Mixed-radix split of a group index, outermost level first."""
    digits = []
    for level in range(n, 0, -1):
        index, d = divmod(index, number_of_cosets(level))
        digits.append(d)
    return digits


def symplectic_from_index(index: int, n: int) -> np.ndarray:
    if not 0 <= index < number_of_symplectic(n):
        raise ValueError(f"index {index} out of range for Sp({2 * n})")
    return symplectic_from_digits(digits_from_index(index, n))


def random_digits(n: int, rng: np.random.Generator) -> list[int]:
    """One uniform coset digit per level, each drawn as two int64-safe parts."""
    digits = []
    for level in range(n, 0, -1):
        nn = 2 * level
        k_part = int(rng.integers((1 << nn) - 1))
        bits_part = int(rng.integers(1 << (nn - 1)))
        digits.append(k_part + ((1 << nn) - 1) * bits_part)
    return digits


@lru_cache(maxsize=None)
def _block_permutation(n: int) -> tuple[int, ...]:
    return tuple(list(range(0, 2 * n, 2)) + list(range(1, 2 * n, 2)))


def to_block_order(g: np.ndarray) -> np.ndarray:
    """Interleaved (x0, z0, x1, z1, ...) to block (x..., z...) coordinates."""
    perm = list(_block_permutation(g.shape[0] // 2))
    return g[np.ix_(perm, perm)].astype(np.uint8)


def symplectic_form(n: int) -> np.ndarray:
    """J = [[0, I], [I, 0]] in block coordinates."""
    j = np.zeros((2 * n, 2 * n), dtype=np.int64)
    j[:n, n:] = np.eye(n, dtype=np.int64)
    j[n:, :n] = np.eye(n, dtype=np.int64)
    return j


def is_symplectic(m: np.ndarray) -> bool:
    n = m.shape[0] // 2
    mm = np.asarray(m, dtype=np.int64)
    return bool(np.array_equal((mm.T @ symplectic_form(n) @ mm) % 2, symplectic_form(n)))
