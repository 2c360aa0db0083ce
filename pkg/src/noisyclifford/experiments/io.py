"""CSV/JSON artifacts, plot-ready series and the run manifest."""

from __future__ import annotations

import csv
import json
import logging
import platform
from dataclasses import asdict
from importlib import metadata
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .. import __version__
from ..models import FitResult, SweepRow, TypicalityRecord
from .fitting import ansatz

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

SWEEP_COLUMNS = ("unitary_index", "capacity", "k", "apep")
BOOTSTRAP_COLUMNS = ("resample", "a", "b")
TYPICALITY_COLUMNS = ("L", "k", "n", "mean_variance", "stderr_of_mean_variance", "variances")
PLOT_COLUMNS = ("series", "x", "y", "yerr")

PlotSeries = dict[str, list[tuple[float, float, float]]]


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    logger.info("Wrote %s (%d rows)", path, len(rows))
    return path


def _write_json(path: Path, payload: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    logger.info("Wrote %s", path)
    return path


def write_sweep_csv(path: Path, rows: Sequence[SweepRow]) -> Path:
    return _write_csv(path, SWEEP_COLUMNS, [(r.unitary_index, r.capacity, r.k, r.apep) for r in rows])


def read_sweep_csv(path: Path) -> list[SweepRow]:
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if tuple(reader.fieldnames or ()) != SWEEP_COLUMNS:
            raise ValueError(f"{path}: expected columns {SWEEP_COLUMNS}, got {reader.fieldnames}")
        return [
            SweepRow(int(r["unitary_index"]), float(r["capacity"]), int(r["k"]), float(r["apep"]))
            for r in reader
        ]


def write_fit_json(path: Path, fit: FitResult) -> Path:
    """Everything but the bootstrap samples, which go to bootstrap.csv."""
    payload = {key: value for key, value in asdict(fit).items() if key != "bootstrap_samples"}
    payload["n_bootstrap_samples"] = len(fit.bootstrap_samples)
    payload["schema_version"] = SCHEMA_VERSION
    return _write_json(path, payload)


def write_bootstrap_csv(path: Path, fit: FitResult) -> Path:
    return _write_csv(path, BOOTSTRAP_COLUMNS, [(i, a, b) for i, (a, b) in enumerate(fit.bootstrap_samples)])


def write_typicality_csv(path: Path, records: Sequence[TypicalityRecord]) -> Path:
    """Per-unitary variances are packed into one ';'-separated column."""
    rows = [
        (r.L, r.k, r.n, r.mean_variance, r.stderr_of_mean_variance, ";".join(repr(v) for v in r.variances))
        for r in records
    ]
    return _write_csv(path, TYPICALITY_COLUMNS, rows)


# ── Plot data ─────────────────────────────────────────────────────────────


def sweep_plot_data(rows: Sequence[SweepRow], fit: FitResult | None = None, n_curve: int = 200) -> PlotSeries:
    """Scatter series "k=<k>" and, with a fit, the fitted curve "fit k=<k>" over the observed capacity range."""
    series: PlotSeries = {}
    for r in rows:
        series.setdefault(f"k={r.k}", []).append((r.capacity, r.apep, 0.0))
    if fit is not None and rows:
        lo = min(r.capacity for r in rows)
        hi = max(r.capacity for r in rows)
        grid = np.linspace(lo, hi, n_curve)
        for k in sorted({r.k for r in rows}):
            y = ansatz(grid, np.full_like(grid, k), fit.a, fit.b)
            series[f"fit k={k}"] = [(float(x), float(v), 0.0) for x, v in zip(grid, y)]
    return series


def typicality_plot_data(records: Sequence[TypicalityRecord]) -> PlotSeries:
    """Mean variance against L with its standard error, one series per k."""
    series: PlotSeries = {}
    for r in sorted(records, key=lambda r: (r.k, r.L)):
        series.setdefault(f"k={r.k}", []).append((float(r.L), r.mean_variance, r.stderr_of_mean_variance))
    return series


def write_plot_data(path: Path, series: PlotSeries) -> Path:
    rows = [(name, x, y, yerr) for name, points in series.items() for x, y, yerr in points]
    return _write_csv(path, PLOT_COLUMNS, rows)


# ── Manifest ──────────────────────────────────────────────────────────────


def library_versions() -> dict[str, str]:
    versions = {"noisyclifford": __version__, "python": platform.python_version()}
    for name in ("numpy", "scipy", "sympy", "pyyaml", "python-dotenv"):
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = "unknown"
    return versions


def write_manifest(
    path: Path,
    command: str,
    config: dict,
    seed: int | None,
    wall_time_s: float,
    artifacts: Sequence[Path] = (),
) -> Path:
    payload = {
        "command": command,
        "config": config,
        "seed": seed,
        "versions": library_versions(),
        "wall_time_s": wall_time_s,
        "artifacts": [Path(p).name for p in artifacts],
        "schema_version": SCHEMA_VERSION,
    }
    return _write_json(path, payload)
