"""Tests for the bipartite A-OTOC and its estimators."""

from __future__ import annotations

import numpy as np
import pytest

from noisyclifford.core.scrambling import (
    aotoc_definition_mc,
    aotoc_exact,
    aotoc_state_estimator,
    aotoc_state_sample,
    depolarizing_haar_closed_form,
    haar_avg_aotoc_infinite,
)
from noisyclifford.errors import CapExceededError
from noisyclifford.linalg.channels import (
    depolarizing,
    encode_decode_channel,
    identity_channel,
    natural_representation,
    unitary_channel,
)
from noisyclifford.linalg.sampling import haar_state, haar_unitary
from noisyclifford.models import Bipartition, Estimate
from noisyclifford.stabilizer.tableau import random_clifford

SWAP = np.eye(4)[[0, 2, 1, 3]]
CUT_2 = Bipartition.symmetric(2)


# ── Bipartition ───────────────────────────────────────────


class TestBipartition:
    def test_symmetric(self):
        cut = Bipartition.symmetric(5)
        assert cut.a_sites == (0, 1)
        assert cut.b_sites == (2, 3, 4)
        assert cut.d_A == 4
        assert cut.d_B == 8
        assert not cut.is_symmetric

    def test_from_sites(self):
        cut = Bipartition.from_sites(4, [1, 3])
        assert cut.assignment == ("B", "A", "B", "A")
        assert cut.is_symmetric
        assert cut.n_a_normalizer == pytest.approx(5 / 4)

    def test_out_of_range(self):
        with pytest.raises(ValueError, match="out of range"):
            Bipartition.from_sites(2, [2])

    def test_bad_label(self):
        with pytest.raises(ValueError, match="'A' or 'B'"):
            Bipartition(("A", "C"))

    def test_empty(self):
        with pytest.raises(ValueError):
            Bipartition(())


# ── Exact value ───────────────────────────────────────────


class TestExact:
    def test_identity_does_not_scramble(self):
        for n in (2, 3, 4):
            cut = Bipartition.symmetric(n)
            assert aotoc_exact(identity_channel(cut.dims), cut) == pytest.approx(0.0, abs=1e-12)

    def test_swap_scrambles_maximally(self):
        assert aotoc_exact(unitary_channel(SWAP), CUT_2) == pytest.approx(0.75)

    def test_bounded(self, rng):
        for _ in range(5):
            value = aotoc_exact(unitary_channel(haar_unitary(8, rng)), Bipartition.symmetric(3))
            assert -1e-12 <= value <= 1.0

    def test_depolarizing_clifford_circuits(self, rng):
        cut = Bipartition.symmetric(4)
        for _ in range(3):
            c = random_clifford(4, rng).to_dense().matrix
            ch = encode_decode_channel(c, depolarizing(0.7), 2, 4)
            assert aotoc_exact(ch, cut) == pytest.approx(0.0, abs=1e-10)

    def test_dims_mismatch(self):
        with pytest.raises(ValueError, match="do not match"):
            aotoc_exact(identity_channel((2, 2, 2)), CUT_2)

    def test_cap(self):
        cut = Bipartition.symmetric(7)
        with pytest.raises(CapExceededError):
            aotoc_exact(identity_channel(cut.dims), cut)


# ── Monte Carlo estimators ────────────────────────────────


class TestEstimators:
    def test_definition_mc_agrees_with_exact(self, rng):
        ch = unitary_channel(haar_unitary(4, rng))
        exact = aotoc_exact(ch, CUT_2)
        est = aotoc_definition_mc(ch, CUT_2, n_samples=400, seed=7)
        assert est.n_samples == 400
        assert est.within(exact, n_sigma=5)

    def test_definition_mc_swap(self):
        est = aotoc_definition_mc(unitary_channel(SWAP), CUT_2, n_samples=400, seed=3)
        assert est.within(0.75, n_sigma=5)

    def test_definition_mc_needs_two_samples(self):
        with pytest.raises(ValueError, match="n_samples"):
            aotoc_definition_mc(identity_channel((2, 2)), CUT_2, n_samples=1)

    def test_definition_mc_cap(self):
        cut = Bipartition.symmetric(5)
        with pytest.raises(CapExceededError):
            aotoc_definition_mc(identity_channel(cut.dims), cut, n_samples=4)

    def test_state_sample_is_exact_for_swap(self, rng):
        psi = haar_state(2, rng)
        assert aotoc_state_sample(unitary_channel(SWAP), CUT_2, psi) == pytest.approx(0.75)
        assert aotoc_state_sample(identity_channel((2, 2)), CUT_2, psi) == pytest.approx(0.0, abs=1e-12)

    def test_state_estimator_agrees_with_exact(self, rng):
        cut = Bipartition.symmetric(3)
        ch = encode_decode_channel(haar_unitary(8, rng), depolarizing(0.3), 1, 3)
        exact = aotoc_exact(ch, cut)
        est = aotoc_state_estimator(ch, cut, n_psi=400, seed=11)
        assert est.within(exact, n_sigma=5)

    def test_state_estimator_is_seeded(self):
        ch = unitary_channel(haar_unitary(4, np.random.default_rng(1)))
        a = aotoc_state_estimator(ch, CUT_2, n_psi=10, seed=5)
        b = aotoc_state_estimator(ch, CUT_2, n_psi=10, seed=5)
        assert a == b

    def test_state_estimator_single_sample(self):
        est = aotoc_state_estimator(unitary_channel(SWAP), CUT_2, n_psi=1, seed=0)
        assert est.stderr == 0.0

    def test_state_estimator_needs_a_sample(self):
        with pytest.raises(ValueError, match="n_psi"):
            aotoc_state_estimator(identity_channel((2, 2)), CUT_2, n_psi=0)


# ── Haar baseline ─────────────────────────────────────────


class TestHaarBaseline:
    def test_full_depolarizing(self):
        rep = natural_representation(depolarizing(1.0))
        assert haar_avg_aotoc_infinite(rep, 1) == pytest.approx(0.1875)

    def test_matches_closed_form(self):
        for p in (0.0, 0.2, 0.9):
            for k in (1, 2, 5):
                rep = natural_representation(depolarizing(p))
                assert haar_avg_aotoc_infinite(rep, k) == pytest.approx(depolarizing_haar_closed_form(p, k), abs=1e-12)

    def test_unitary_noise(self):
        rep = natural_representation(unitary_channel(haar_unitary(2, np.random.default_rng(0))))
        assert haar_avg_aotoc_infinite(rep, 3) == pytest.approx(1.0 - abs(rep.trace / 4) ** 6, abs=1e-12)

    def test_errors(self):
        rep = natural_representation(depolarizing(0.5))
        with pytest.raises(ValueError, match="k must be"):
            haar_avg_aotoc_infinite(rep, 0)
        with pytest.raises(ValueError, match="single-qubit"):
            haar_avg_aotoc_infinite(natural_representation(identity_channel((2, 2))), 1)


def test_estimate_within():
    est = Estimate(0.5, 0.01, 100)
    assert est.within(0.52)
    assert not est.within(0.6)
