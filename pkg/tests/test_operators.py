"""Tests for dense operators, permutation operators and operator Schmidt weights."""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from noisyclifford.errors import CapExceededError
from noisyclifford.linalg.operators import (
    DenseOperator,
    apply_permutation_to_vectors,
    compose,
    copy_to_site_major,
    cycle_trace,
    cycles,
    embed,
    invert,
    kron,
    kron_all,
    load_operators,
    operator_schmidt,
    partial_trace,
    perm_from_cycles,
    permutation_operator,
    save_operators,
    site_to_copy_major,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)
SWAP = np.eye(4)[[0, 2, 1, 3]]


def _random_op(rng, d):
    return rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))


# ── DenseOperator ─────────────────────────────────────────


class TestDenseOperator:
    def test_dims_must_match(self):
        with pytest.raises(ValueError, match="do not multiply"):
            DenseOperator(np.eye(4), (2, 3))

    def test_non_square(self):
        with pytest.raises(ValueError, match="square"):
            DenseOperator(np.zeros((2, 3)), (2,))

    def test_qubits(self):
        op = DenseOperator.qubits(np.eye(8))
        assert op.dims == (2, 2, 2)
        with pytest.raises(ValueError, match="power of two"):
            DenseOperator.qubits(np.eye(6))

    def test_norm_and_unitarity(self):
        op = DenseOperator.qubits(SWAP)
        assert op.is_unitary()
        assert op.hs_norm_sq() == pytest.approx(4.0)
        assert not DenseOperator.qubits(2 * SWAP).is_unitary()

    def test_matmul_dims_mismatch(self):
        with pytest.raises(ValueError, match="dims mismatch"):
            DenseOperator(np.eye(4), (4,)) @ DenseOperator(np.eye(4), (2, 2))


# ── Tensor structure ──────────────────────────────────────


class TestTensorStructure:
    def test_partial_trace_of_product(self, rng):
        a, b = _random_op(rng, 2), _random_op(rng, 4)
        op = DenseOperator(np.kron(a, b), (2, 2, 2))
        assert np.allclose(partial_trace(op, [0]).matrix, a * np.trace(b))
        assert np.allclose(partial_trace(op, [1, 2]).matrix, b * np.trace(a))

    def test_partial_trace_range(self):
        with pytest.raises(ValueError, match="out of range"):
            partial_trace(DenseOperator.identity((2, 2)), [2])

    def test_embed(self, rng):
        a, b = _random_op(rng, 2), _random_op(rng, 2)
        local = DenseOperator(np.kron(a, b), (2, 2))
        full = embed(local, [2, 0], (2, 2, 2))
        assert np.allclose(full.matrix, np.kron(np.kron(b, np.eye(2)), a))

    def test_embed_dims_mismatch(self):
        with pytest.raises(ValueError):
            embed(DenseOperator.identity((3,)), [0], (2, 2))

    def test_kron_all(self):
        op = kron_all([DenseOperator(X, (2,)), DenseOperator(Z, (2,)), DenseOperator(X, (2,))])
        assert np.allclose(op.matrix, np.kron(np.kron(X, Z), X))
        with pytest.raises(ValueError):
            kron_all([])

    def test_copy_major_roundtrip(self, rng):
        op = DenseOperator(_random_op(rng, 16), (2, 2, 2, 2))
        there = site_to_copy_major(op, 2, 2)
        assert np.allclose(copy_to_site_major(there, 2, 2).matrix, op.matrix)

    def test_site_to_copy_major_order(self):
        # site-major (s0c0, s0c1, s1c0, s1c1) -> copy-major (c0s0, c0s1, c1s0, c1s1)
        ops = [DenseOperator(m, (2,)) for m in (X, Z, np.eye(2), X @ Z)]
        moved = site_to_copy_major(kron_all(ops), 2, 2)
        expected = kron_all([ops[0], ops[2], ops[1], ops[3]])
        assert np.allclose(moved.matrix, expected.matrix)


# ── Permutations ──────────────────────────────────────────


class TestPermutations:
    def test_perm_from_cycles(self):
        assert perm_from_cycles("(12)(34)", 4) == (1, 0, 3, 2)
        assert perm_from_cycles("(123)", 3) == (1, 2, 0)
        assert perm_from_cycles("", 3) == (0, 1, 2)

    def test_perm_from_cycles_errors(self):
        with pytest.raises(ValueError, match="out of range"):
            perm_from_cycles("(15)", 4)
        with pytest.raises(ValueError, match="not a permutation"):
            perm_from_cycles("(12)(13)", 3)

    def test_invert(self):
        sigma = (2, 0, 3, 1)
        assert compose(sigma, invert(sigma)) == (0, 1, 2, 3)

    def test_cycles(self):
        assert cycles((1, 0, 2, 3)) == [(0, 1), (2,), (3,)]
        assert cycles((1, 2, 0)) == [(0, 1, 2)]

    def test_action_on_basis_states(self):
        sigma = (1, 2, 0)
        t = permutation_operator(sigma, 2).matrix
        for bits in itertools.product((0, 1), repeat=3):
            src = int("".join(map(str, bits)), 2)
            dst = int("".join(str(bits[sigma[k]]) for k in range(3)), 2)
            assert t[dst, src] == 1

    def test_composition_rule(self):
        for sigma in itertools.permutations(range(4)):
            tau = (1, 2, 3, 0)
            lhs = permutation_operator(sigma, 2).matrix @ permutation_operator(tau, 2).matrix
            rhs = permutation_operator(compose(sigma, tau), 2).matrix
            assert np.array_equal(lhs, rhs)

    def test_cycle_trace_matches_dense(self, rng):
        mats = [_random_op(rng, 2) for _ in range(4)]
        dense = kron_all(DenseOperator(m, (2,)) for m in mats).matrix
        for sigma in itertools.permutations(range(4)):
            expected = np.trace(permutation_operator(sigma, 2).matrix @ dense)
            assert cycle_trace(sigma, mats) == pytest.approx(expected)

    def test_cycle_trace_count(self):
        with pytest.raises(ValueError, match="need 2 matrices"):
            cycle_trace((1, 0), [np.eye(2)])

    def test_apply_to_vectors(self, rng):
        sigma = (3, 1, 0, 2)
        vectors = rng.standard_normal((16, 3))
        expected = permutation_operator(sigma, 2).matrix @ vectors
        assert np.allclose(apply_permutation_to_vectors(vectors, sigma, 2), expected)

    def test_not_a_permutation(self):
        with pytest.raises(ValueError):
            permutation_operator((0, 0), 2)

    def test_cap(self):
        with pytest.raises(CapExceededError):
            permutation_operator(tuple(range(4)), 16)


# ── Operator Schmidt ──────────────────────────────────────


class TestOperatorSchmidt:
    def test_swap_is_maximal(self):
        weights = operator_schmidt(DenseOperator.qubits(SWAP), [0])
        assert np.allclose(weights, [0.25] * 4)

    def test_product_is_rank_one(self, rng):
        op = kron(DenseOperator(X, (2,)), DenseOperator(Z, (2,)))
        weights = operator_schmidt(op, [0])
        assert weights[0] == pytest.approx(1.0)
        assert np.allclose(weights[1:], 0.0)

    def test_weights_sum_to_one_for_unitaries(self, rng):
        q, _ = np.linalg.qr(_random_op(rng, 8))
        assert operator_schmidt(DenseOperator.qubits(q), [0, 2]).sum() == pytest.approx(1.0)

    def test_zero_operator(self):
        with pytest.raises(ValueError, match="zero operator"):
            operator_schmidt(DenseOperator.qubits(np.zeros((4, 4))), [0])


def test_save_and_load_operators(tmp_path, rng):
    path = tmp_path / "ops.npz"
    a = DenseOperator(_random_op(rng, 4), (2, 2))
    b = DenseOperator(_random_op(rng, 3), (3,))
    save_operators(path, a=a, b=b)
    loaded = load_operators(path)
    assert sorted(loaded) == ["a", "b"]
    assert np.array_equal(loaded["a"].matrix, a.matrix)
    assert loaded["b"].dims == (3,)
