"""Tests for the two-phase simplex solver and its optimality certificate."""

from __future__ import annotations

import numpy as np
import pytest
from scipy.optimize import linprog

from noisyclifford.core.simplex import solve_lp
from noisyclifford.errors import InfeasibleError, UnboundedError


class TestSolveLP:
    def test_single_constraint(self):
        res = solve_lp(np.array([2.0, 3.0]), np.array([[1.0, 1.0]]), np.array([1.0]))
        assert res.objective == pytest.approx(2.0)
        assert np.allclose(res.x, [1.0, 0.0])
        assert np.allclose(res.dual, [2.0])
        assert res.duality_gap < 1e-10
        assert res.residual < 1e-10

    def test_two_constraints(self):
        a = np.array([[1.0, 1.0], [1.0, -1.0]])
        res = solve_lp(np.array([2.0, 3.0]), a, np.array([1.0, 0.2]))
        assert np.allclose(res.x, [0.6, 0.4])
        assert res.objective == pytest.approx(2.4)

    def test_negative_right_hand_side(self):
        res = solve_lp(np.array([2.0, 3.0]), np.array([[-1.0, -1.0]]), np.array([-1.0]))
        assert res.objective == pytest.approx(2.0)
        assert np.allclose(res.dual, [-2.0])

    def test_redundant_row(self):
        a = np.array([[1.0, 1.0], [2.0, 2.0]])
        res = solve_lp(np.array([2.0, 3.0]), a, np.array([1.0, 2.0]))
        assert res.objective == pytest.approx(2.0)
        assert np.allclose(a @ res.x, [1.0, 2.0])

    def test_strong_duality(self, rng):
        a = rng.uniform(0.1, 1.0, size=(3, 6))
        x0 = rng.uniform(0.0, 1.0, size=6)
        c = rng.uniform(0.5, 2.0, size=6)
        res = solve_lp(c, a, a @ x0)
        assert res.objective <= c @ x0 + 1e-9
        assert res.objective == pytest.approx(float(a @ x0 @ res.dual), abs=1e-8)
        assert np.all(c - a.T @ res.dual >= -1e-8)

    def test_infeasible(self):
        with pytest.raises(InfeasibleError):
            solve_lp(np.array([1.0, 1.0]), np.array([[1.0, 1.0]]), np.array([-1.0]))

    def test_unbounded(self):
        with pytest.raises(UnboundedError):
            solve_lp(np.array([-1.0, 0.0]), np.array([[1.0, -1.0]]), np.array([0.0]))

    def test_shape_mismatch(self):
        with pytest.raises(ValueError, match="shape mismatch"):
            solve_lp(np.ones(3), np.ones((1, 2)), np.ones(1))

    @pytest.mark.parametrize("seed", [0, 1, 2, 3])
    def test_agrees_with_highs(self, seed):
        rng = np.random.default_rng(seed)
        a = rng.uniform(-1.0, 1.0, size=(4, 9))
        b = a @ rng.uniform(0.0, 1.0, size=9)
        c = rng.uniform(0.1, 2.0, size=9)
        reference = linprog(c, A_eq=a, b_eq=b, bounds=(0, None), method="highs")
        assert reference.status == 0
        res = solve_lp(c, a, b)
        assert res.objective == pytest.approx(reference.fun, abs=1e-8)
        assert res.duality_gap < 1e-8
