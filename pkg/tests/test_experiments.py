"""Tests for the sweep, typicality scans and the artifact writers."""

from __future__ import annotations

import csv
import json
import math

import numpy as np
import pytest

from noisyclifford.core.clifford_moments import avg_aotoc_finite_L, rz_apep_closed_form
from noisyclifford.experiments.fitting import ansatz, bootstrap_fit, fit_apep_capacity
from noisyclifford.experiments.io import (
    SCHEMA_VERSION,
    read_sweep_csv,
    sweep_plot_data,
    typicality_plot_data,
    write_bootstrap_csv,
    write_fit_json,
    write_manifest,
    write_plot_data,
    write_sweep_csv,
    write_typicality_csv,
)
from noisyclifford.experiments.sampling import haar_random_unitaries, haar_random_unitary
from noisyclifford.experiments.sweep import sweep_apep_vs_capacity
from noisyclifford.experiments.typicality import (
    aotoc_clifford_values,
    decreasing_trend,
    spearman_trend,
    typicality_aotoc,
    typicality_apep,
)
from noisyclifford.linalg.channels import rz, t_gate, unitary_channel
from noisyclifford.models import FitResult, SweepRow, TypicalityRecord


def _record(n, k, mean):
    return TypicalityRecord(L=n, k=k, variances=[mean, mean], mean_variance=mean, stderr_of_mean_variance=0.0)


# ── Haar sampling ─────────────────────────────────────────


class TestHaarSampling:
    def test_unitary(self):
        u = haar_random_unitary(3)
        assert np.allclose(u.conj().T @ u, np.eye(2))

    def test_seeded(self):
        assert np.array_equal(haar_random_unitary(5), haar_random_unitary(5))
        first = haar_random_unitaries(3, seed=5)
        assert len(first) == 3
        assert np.array_equal(first[1], haar_random_unitaries(3, seed=5)[1])

    def test_trace_moment(self):
        traces = np.array([abs(np.trace(u)) ** 2 for u in haar_random_unitaries(2000, seed=11)])
        assert traces.mean() == pytest.approx(1.0, abs=0.1)

    def test_corner_entry_moment(self):
        corners = np.array([abs(u[0, 0]) ** 2 for u in haar_random_unitaries(4000, seed=12)])
        assert corners.mean() == pytest.approx(0.5, abs=0.02)


# ── Sweep ─────────────────────────────────────────────────


class TestSweep:
    def test_given_unitaries(self, s_gate):
        unitaries = [np.eye(2), s_gate, t_gate(), rz(0.7)]
        rows = sweep_apep_vs_capacity(k_max=3, unitaries=unitaries)
        assert len(rows) == 12
        assert [(r.unitary_index, r.k) for r in rows] == [(i, k) for i in range(4) for k in (1, 2, 3)]
        for r in rows[:6]:
            assert r.capacity == pytest.approx(1.0, abs=1e-6)
            assert r.apep == pytest.approx(0.0, abs=1e-10)
        for r in rows[9:]:
            assert r.apep == pytest.approx(rz_apep_closed_form(0.7, r.k), abs=1e-10)
        assert rows[6].capacity >= math.sqrt(2.0) - 1e-6

    def test_apep_grows_with_k(self):
        rows = sweep_apep_vs_capacity(k_max=4, unitaries=[t_gate()])
        values = [r.apep for r in rows]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_deterministic_across_threads(self):
        one = sweep_apep_vs_capacity(n_unitaries=4, k_max=2, seed=8, threads=1)
        many = sweep_apep_vs_capacity(n_unitaries=4, k_max=2, seed=8, threads=3)
        assert one == many

    def test_ranges(self):
        with pytest.raises(ValueError, match="k_max"):
            sweep_apep_vs_capacity(n_unitaries=2, k_max=0)
        with pytest.raises(ValueError, match="n_unitaries"):
            sweep_apep_vs_capacity(n_unitaries=0, k_max=2)


class TestSweepFit:
    """Sweep, joint fit and bootstrap on a scaled-down Haar dataset."""

    @pytest.fixture(scope="class")
    def rows(self):
        return sweep_apep_vs_capacity(n_unitaries=40, k_max=10, seed=2024)

    def test_fit_converges(self, rows):
        fit = fit_apep_capacity(rows)
        assert fit.converged
        assert 1.0 < fit.a < 2.0
        assert 0.3 < fit.b < 1.1
        assert fit.rss < 0.05 * len(rows)

    def test_bootstrap_brackets_point_estimate(self, rows):
        fit = bootstrap_fit(rows, resamples=40, seed=1)
        assert len(fit.bootstrap_samples) + fit.bootstrap_failures == 40
        assert len(fit.bootstrap_samples) >= 20
        assert fit.a_ci95[0] <= fit.a <= fit.a_ci95[1]
        assert fit.b_ci95[0] <= fit.b <= fit.b_ci95[1]

    def test_best_fit_is_monotone_in_capacity(self, rows):
        fit = fit_apep_capacity(rows)
        capacity = np.array([r.capacity for r in rows])
        grid = np.linspace(capacity.min(), capacity.max(), 200)
        for k in range(1, 11):
            curve = ansatz(grid, np.full_like(grid, k), fit.a, fit.b)
            assert np.all(np.diff(curve) >= -1e-12)

    def test_t_gate_sits_below_unit_exponent_curve(self):
        # APEP(T) = 1 - (3/4)^k while capacity sqrt(2) puts |cos| near 0.868 at a ~ 1.26
        capacity = math.sqrt(2.0)
        for k in (1, 2, 5):
            exact = rz_apep_closed_form(math.pi / 4, k)
            assert exact == pytest.approx(1 - 0.75 ** k)
            assert exact > ansatz(np.array([capacity]), np.array([float(k)]), 1.2567, 1.0)[0]


# ── Typicality ────────────────────────────────────────────


class TestTypicality:
    def test_apep_records(self):
        records = typicality_apep(l_values=[2, 3], n_u=2, n_c=3, k_values=[1, 3], seed=4)
        assert [(r.L, r.k) for r in records] == [(2, 1), (3, 1), (3, 3)]
        for r in records:
            assert r.n == 2
            assert r.mean_variance >= 0.0
            assert r.mean_variance == pytest.approx(np.mean(r.variances))

    def test_identity_noise_has_no_variance(self):
        records = typicality_apep(l_values=[3], n_u=2, n_c=4, k_values=[2], seed=1, unitaries=[np.eye(2)] * 2)
        assert records[0].mean_variance == pytest.approx(0.0, abs=1e-20)
        records = typicality_aotoc(
            l_values=[4], n_psi=2, n_c=3, n_v=1, k_values=[1], seed=1, unitaries=[np.eye(2)]
        )
        assert records[0].mean_variance == pytest.approx(0.0, abs=1e-20)
        assert records[0].stderr_of_mean_variance == 0.0

    def test_apep_deterministic_across_threads(self):
        kwargs = dict(l_values=[3, 4], n_u=3, n_c=3, k_values=[1], seed=12)
        assert typicality_apep(threads=1, **kwargs) == typicality_apep(threads=3, **kwargs)

    def test_aotoc_estimator_matches_ensemble_average(self, rng):
        v = rz(1.1)
        values = aotoc_clifford_values(v, 2, 4, n_c=200, n_psi=4, rng=rng)
        stderr = values.std(ddof=1) / math.sqrt(values.size)
        expected = avg_aotoc_finite_L(unitary_channel(v), 2, 4)
        assert abs(values.mean() - expected) < 4 * stderr + 1e-12

    def test_argument_checks(self):
        with pytest.raises(ValueError, match="n_c"):
            typicality_apep(l_values=[3], n_u=2, n_c=1, k_values=[1])
        with pytest.raises(ValueError, match="n_u"):
            typicality_apep(l_values=[3], n_u=0, n_c=2, k_values=[1])
        with pytest.raises(ValueError, match="expected 2 unitaries"):
            typicality_apep(l_values=[3], n_u=2, n_c=2, k_values=[1], unitaries=[np.eye(2)])
        with pytest.raises(ValueError, match="L <= 8"):
            typicality_aotoc(l_values=[9], n_psi=1, n_c=2, n_v=1, k_values=[1])
        with pytest.raises(ValueError, match="nonempty"):
            typicality_apep(l_values=[], n_u=1, n_c=2, k_values=[1])

    def test_spearman_trend(self):
        records = [_record(n, 1, 1.0 / n) for n in (3, 4, 5, 6)] + [_record(n, 2, float(n)) for n in (3, 4, 5)]
        trend = spearman_trend(records)
        assert trend[1][0] == pytest.approx(-1.0)
        assert trend[1][1] == pytest.approx(1 / 24)
        assert trend[2][0] == pytest.approx(1.0)
        assert trend[2][1] == pytest.approx(1.0)

    def test_exact_p_values(self):
        assert decreasing_trend([3, 4, 5, 6, 7], [0.5, 0.4, 0.3, 0.2, 0.1]) == pytest.approx((-1.0, 1 / 120))
        # one adjacent swap: rho = -0.9, reached or beaten by 5 of 120 orderings
        rho, p = decreasing_trend([3, 4, 5, 6, 7], [0.5, 0.3, 0.4, 0.2, 0.1])
        assert rho == pytest.approx(-0.9)
        assert p == pytest.approx(5 / 120)
        # four sizes, one swap: no longer significant
        rho, p = decreasing_trend([4, 5, 6, 7], [0.4, 0.2, 0.3, 0.1])
        assert rho == pytest.approx(-0.8)
        assert p > 0.05

    def test_constant_series_has_no_trend(self):
        rho, p = decreasing_trend([3, 4, 5], [0.2, 0.2, 0.2])
        assert math.isnan(rho)
        assert p == 1.0

    @pytest.mark.slow
    def test_apep_variance_decreases_with_l(self):
        records = typicality_apep(l_values=range(3, 8), seed=5)
        for k, (rho, p) in spearman_trend(records).items():
            assert rho < 0, k
            assert p < 0.05, k

    def test_spearman_needs_three_sizes(self):
        with pytest.raises(ValueError, match="at least 3"):
            spearman_trend([_record(3, 1, 0.1), _record(4, 1, 0.05)])


# ── Artifacts ─────────────────────────────────────────────


class TestArtifacts:
    def test_sweep_csv_roundtrip(self, tmp_path):
        rows = [SweepRow(0, 1.0, 1, 0.0), SweepRow(0, 1.0, 2, 0.0), SweepRow(1, 1.25, 1, 0.123456789012345)]
        path = write_sweep_csv(tmp_path / "out" / "sweep.csv", rows)
        assert read_sweep_csv(path) == rows

    def test_sweep_csv_header_checked(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(ValueError, match="expected columns"):
            read_sweep_csv(path)

    def test_fit_json_and_bootstrap_csv(self, tmp_path):
        fit = FitResult(
            a=1.2, b=0.9, a_stderr=0.01, b_stderr=0.02, rss=1e-4,
            a_ci95=(1.1, 1.3), b_ci95=(0.8, 1.0),
            bootstrap_samples=[(1.2, 0.9), (1.21, 0.88)], bootstrap_failures=1,
        )
        payload = json.loads(write_fit_json(tmp_path / "fit.json", fit).read_text())
        assert payload["a"] == 1.2
        assert payload["a_ci95"] == [1.1, 1.3]
        assert payload["n_bootstrap_samples"] == 2
        assert payload["bootstrap_failures"] == 1
        assert payload["schema_version"] == SCHEMA_VERSION
        assert "bootstrap_samples" not in payload
        with open(write_bootstrap_csv(tmp_path / "bootstrap.csv", fit), newline="") as f:
            lines = list(csv.reader(f))
        assert lines[0] == ["resample", "a", "b"]
        assert lines[2] == ["1", "1.21", "0.88"]

    def test_typicality_csv(self, tmp_path):
        record = TypicalityRecord(L=4, k=1, variances=[0.25, 0.5], mean_variance=0.375, stderr_of_mean_variance=0.125)
        with open(write_typicality_csv(tmp_path / "t.csv", [record]), newline="") as f:
            lines = list(csv.reader(f))
        assert lines[0] == ["L", "k", "n", "mean_variance", "stderr_of_mean_variance", "variances"]
        assert lines[1] == ["4", "1", "2", "0.375", "0.125", "0.25;0.5"]

    def test_sweep_plot_data(self):
        rows = [SweepRow(i, 1.0 + 0.1 * i, k, 0.01 * i * k) for i in range(5) for k in (1, 2)]
        series = sweep_plot_data(rows)
        assert sorted(series) == ["k=1", "k=2"]
        fit = fit_apep_capacity([SweepRow(i, 1.0 + 0.1 * i, k, 1 - math.cos(0.1 * i) ** k) for i in range(5) for k in (1, 2)])
        series = sweep_plot_data(rows, fit=fit, n_curve=11)
        assert len(series["fit k=2"]) == 11
        assert series["fit k=1"][0][0] == pytest.approx(1.0)
        assert series["fit k=1"][-1][0] == pytest.approx(1.4)

    def test_typicality_plot_data(self, tmp_path):
        records = [_record(4, 1, 0.2), _record(3, 1, 0.3), _record(3, 2, 0.1)]
        series = typicality_plot_data(records)
        assert series["k=1"] == [(3.0, 0.3, 0.0), (4.0, 0.2, 0.0)]
        path = write_plot_data(tmp_path / "plot.csv", series)
        assert path.read_text().splitlines()[0] == "series,x,y,yerr"
        assert len(path.read_text().splitlines()) == 4

    def test_manifest(self, tmp_path):
        path = write_manifest(
            tmp_path / "manifest.json",
            command="noisyclifford sweep-fit",
            config={"seed": 3},
            seed=3,
            wall_time_s=1.5,
            artifacts=[tmp_path / "sweep.csv"],
        )
        payload = json.loads(path.read_text())
        assert payload["artifacts"] == ["sweep.csv"]
        assert payload["seed"] == 3
        assert payload["schema_version"] == SCHEMA_VERSION
        assert {"noisyclifford", "python", "numpy", "scipy"} <= set(payload["versions"])
