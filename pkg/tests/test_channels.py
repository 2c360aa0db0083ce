"""Tests for Kraus channels, noise models and encoding-decoding circuits."""

from __future__ import annotations

import math

import numpy as np
import pytest

from noisyclifford.linalg.channels import (
    PAULI_X,
    PAULI_Z,
    Picture,
    QuantumChannel,
    apply_channel,
    apply_channel_batch,
    axis_rotation,
    build_noise_channel,
    depolarizing,
    encode_decode_channel,
    encode_decode_unitary,
    encode_only_unitary,
    identity_channel,
    load_kraus_file,
    natural_representation,
    noise_unitary,
    pauli_channel,
    rz,
    t_gate,
    tensor_channels,
    unitary_channel,
)
from noisyclifford.linalg.operators import DenseOperator
from noisyclifford.models import NoiseKind, NoiseSpec


def _random_op(rng, d=2):
    return DenseOperator(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)), (2,) * int(math.log2(d)))


# ── QuantumChannel ────────────────────────────────────────


class TestQuantumChannel:
    def test_needs_kraus(self):
        with pytest.raises(ValueError, match="at least one"):
            QuantumChannel((), (2,))

    def test_kraus_shape(self):
        with pytest.raises(ValueError, match="2x2"):
            QuantumChannel((np.eye(4),), (2,))

    def test_validate_rejects_non_trace_preserving(self):
        with pytest.raises(ValueError, match="schrodinger"):
            QuantumChannel((2 * np.eye(2),), (2,)).validate()

    def test_adjoint_flips_picture(self):
        ch = QuantumChannel((np.array([[1, 0], [0, 0]]), np.array([[0, 1], [0, 0]])), (2,)).validate()
        adj = ch.adjoint()
        assert adj.picture == Picture.HEISENBERG
        adj.validate()

    def test_is_unitary(self):
        assert unitary_channel(PAULI_X).is_unitary()
        assert not depolarizing(0.3).is_unitary()

    def test_unitary_channel_rejects_non_unitary(self):
        with pytest.raises(ValueError):
            unitary_channel(np.diag([1.0, 0.5]))

    def test_apply_dims_mismatch(self):
        with pytest.raises(ValueError, match="do not match"):
            apply_channel(depolarizing(0.1), DenseOperator.identity((2, 2)))

    def test_batch_matches_single(self, rng):
        ch = depolarizing(0.4)
        ops = np.stack([_random_op(rng).matrix for _ in range(5)])
        batch = apply_channel_batch(ch, ops)
        for op, out in zip(ops, batch):
            assert np.allclose(apply_channel(ch, DenseOperator(op, (2,))).matrix, out)

    def test_natural_representation_of_identity(self):
        rep = natural_representation(identity_channel())
        assert rep.trace == pytest.approx(4.0)
        assert rep.hs_half_norm_sq == pytest.approx(1.0)

    def test_tensor_channels(self, rng):
        ch = tensor_channels([unitary_channel(PAULI_X), unitary_channel(PAULI_Z)])
        assert ch.dims == (2, 2)
        assert np.allclose(ch.kraus[0], np.kron(PAULI_X, PAULI_Z))


# ── Noise models ──────────────────────────────────────────


class TestNoiseModels:
    def test_rz_pi(self):
        assert np.allclose(rz(math.pi), -1j * PAULI_Z)

    def test_axis_rotation_about_z(self):
        assert np.allclose(axis_rotation(0.7, 0.0, 1.3), rz(0.7))

    def test_axis_rotation_is_unitary(self, rng):
        u = axis_rotation(*rng.uniform(0, 2 * math.pi, size=3))
        assert np.allclose(u.conj().T @ u, np.eye(2))

    def test_t_gate(self):
        assert np.allclose(t_gate() @ t_gate(), np.diag([1, 1j]))

    def test_full_depolarizing(self, rng):
        op = _random_op(rng)
        out = apply_channel(depolarizing(1.0), op)
        assert np.allclose(out.matrix, op.trace() * np.eye(2) / 2)

    def test_depolarizing_range(self):
        with pytest.raises(ValueError, match=r"\[0, 1\]"):
            depolarizing(1.5)

    def test_pauli_channel_matches_depolarizing(self, rng):
        p = 0.36
        op = _random_op(rng)
        lhs = apply_channel(pauli_channel(p / 4, p / 4, p / 4), op).matrix
        rhs = apply_channel(depolarizing(p), op).matrix
        assert np.allclose(lhs, rhs)

    def test_pauli_channel_invalid(self):
        with pytest.raises(ValueError):
            pauli_channel(0.6, 0.6, 0.0)

    def test_kraus_file(self, tmp_path):
        path = tmp_path / "amp.npy"
        g = 0.3
        kraus = np.array([[[1, 0], [0, math.sqrt(1 - g)]], [[0, math.sqrt(g)], [0, 0]]], dtype=complex)
        np.save(path, kraus)
        ch = load_kraus_file(path)
        assert ch.n_kraus == 2
        assert np.allclose(ch.kraus[1], kraus[1])

    def test_kraus_file_missing(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_kraus_file(tmp_path / "nope.npy")

    def test_kraus_file_shape(self, tmp_path):
        path = tmp_path / "bad.npy"
        np.save(path, np.eye(2))
        with pytest.raises(ValueError, match=r"\(m, 2, 2\)"):
            load_kraus_file(path)

    def test_kraus_file_not_trace_preserving(self, tmp_path):
        path = tmp_path / "bad.npy"
        np.save(path, np.array([np.eye(2), np.eye(2)]))
        with pytest.raises(ValueError):
            load_kraus_file(path)


# ── NoiseSpec ─────────────────────────────────────────────


class TestNoiseSpec:
    def test_build_each_kind(self, tmp_path):
        np.save(tmp_path / "id.npy", np.array([np.eye(2)]))
        specs = [
            NoiseSpec(NoiseKind.RZ, theta=0.3),
            NoiseSpec(NoiseKind.GENERAL_AXIS, theta=0.3, gamma=1.0, phi=0.2),
            NoiseSpec(NoiseKind.DEPOLARIZING, p=0.2),
            NoiseSpec(NoiseKind.PAULI, px=0.1, pz=0.2),
            NoiseSpec(NoiseKind.KRAUS_FILE, kraus_file=str(tmp_path / "id.npy")),
        ]
        for spec in specs:
            ch = build_noise_channel(spec)
            assert ch.dims == (2,)
            assert ch.is_unitary() == spec.kind.is_unitary or spec.kind == NoiseKind.KRAUS_FILE

    def test_validate_ranges(self):
        with pytest.raises(ValueError, match="noise.p"):
            NoiseSpec(NoiseKind.DEPOLARIZING, p=-0.1).validate()
        with pytest.raises(ValueError, match="must not exceed 1"):
            NoiseSpec(NoiseKind.PAULI, px=0.5, py=0.5, pz=0.5).validate()
        with pytest.raises(ValueError, match="finite"):
            NoiseSpec(NoiseKind.RZ, theta=math.inf).validate()
        with pytest.raises(ValueError, match="requires a .npy path"):
            NoiseSpec(NoiseKind.KRAUS_FILE).validate()

    def test_noise_unitary_rejects_channels(self):
        with pytest.raises(ValueError, match="not unitary"):
            noise_unitary(NoiseSpec(NoiseKind.DEPOLARIZING, p=0.1))


# ── Encoding-decoding ─────────────────────────────────────


class TestEncodeDecode:
    def test_identity_clifford(self, rng):
        u = rz(0.4)
        c = np.eye(8)
        assert np.allclose(encode_decode_unitary(c, u, 2, 3), np.kron(np.kron(u, u), np.eye(2)))
        assert np.allclose(encode_only_unitary(c, u, 1, 3), np.kron(u, np.eye(4)))

    def test_channel_matches_unitary(self, rng):
        q, _ = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
        u = rz(0.9)
        ch = encode_decode_channel(q, unitary_channel(u), 1, 2)
        assert ch.n_kraus == 1
        assert np.allclose(ch.kraus[0], encode_decode_unitary(q, u, 1, 2))

    def test_channel_is_trace_preserving(self, rng):
        q, _ = np.linalg.qr(rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8)))
        ch = encode_decode_channel(q, depolarizing(0.5), 2, 3)
        assert ch.n_kraus == 16
        ch.validate(1e-10)

    def test_k_range(self):
        with pytest.raises(ValueError, match=r"k must be in \[0, 2\]"):
            encode_decode_channel(np.eye(4), depolarizing(0.1), 3, 2)

    def test_noise_must_be_single_qubit(self):
        with pytest.raises(ValueError, match="single-qubit"):
            encode_decode_channel(np.eye(4), identity_channel((2, 2)), 1, 2)
