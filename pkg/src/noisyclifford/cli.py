"""CLI entry point for noisyclifford."""

from __future__ import annotations

import argparse
import logging
import sys
import time
from dataclasses import replace
from pathlib import Path
from typing import Sequence

import numpy as np
import yaml

from . import __version__
from .config import Config, default_config, load_config
from .errors import CapExceededError, NumericalError
from .linalg.channels import (
    QuantumChannel,
    build_noise_channel,
    encode_decode_channel,
    encode_only_unitary,
    natural_representation,
    noise_unitary,
    t_gate,
    unitary_channel,
)
from .linalg.operators import DenseOperator
from .models import Bipartition, NoiseKind

logger = logging.getLogger(__name__)

GATES = {
    "identity": np.eye(2, dtype=complex),
    "clifford-s": np.diag([1.0, 1j]),
    "clifford-h": np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2.0),
    "t": t_gate(),
}

EXIT_SELFTEST_FAILED = 1
EXIT_USAGE = 2
EXIT_CAP = 3
EXIT_NUMERICAL = 4


def _read_package_data(filename: str) -> str | None:
    """Read a bundled data file from the package."""
    try:
        import importlib.resources as pkg_resources
        ref = pkg_resources.files("noisyclifford.data").joinpath(filename)
        return ref.read_text(encoding="utf-8")
    except Exception:
        return None


def _fmt(value: float) -> str:
    return f"{value:.12g}"


# ── Config and noise plumbing ─────────────────────────────────────────────


def _set_override(config: Config, assignment: str) -> None:
    """Apply one `section.key=value` override; the value is parsed as YAML."""
    if "=" not in assignment:
        raise ValueError(f"--set expects section.key=value, got '{assignment}'")
    path, raw = assignment.split("=", 1)
    value = yaml.safe_load(raw)
    parts = path.strip().split(".")
    target = config
    for part in parts[:-1]:
        if not hasattr(target, part):
            raise ValueError(f"Unknown config section '{part}' in --set {assignment}")
        target = getattr(target, part)
    key = parts[-1]
    if not hasattr(target, key):
        raise ValueError(f"Unknown config key '{path}' in --set {assignment}")
    if key == "kind":
        value = NoiseKind(value)
    setattr(target, key, value)


def _load(args: argparse.Namespace) -> Config:
    config = load_config(args.config) if args.config else default_config()
    for assignment in args.set or []:
        _set_override(config, assignment)
    if args.seed is not None:
        config.seed = args.seed
    if args.threads is not None:
        if args.threads < 1:
            raise ValueError(f"--threads must be >= 1, got {args.threads}")
        config.threads = args.threads
    if getattr(args, "output_dir", None):
        config.output.directory = args.output_dir
    return config


def _noise_spec(args: argparse.Namespace, config: Config):
    overrides = {}
    if args.noise:
        overrides["kind"] = NoiseKind(args.noise)
    for name in ("theta", "gamma", "phi", "p", "px", "py", "pz", "kraus_file"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    spec = replace(config.noise, **overrides)
    spec.validate()
    return spec


def _noise_channel(args: argparse.Namespace, config: Config) -> QuantumChannel:
    if getattr(args, "gate", None):
        return unitary_channel(GATES[args.gate])
    return build_noise_channel(_noise_spec(args, config))


def _noise_gate(args: argparse.Namespace, config: Config) -> np.ndarray:
    """Single-qubit unitary for APEP commands; non-unitary noise is a usage error."""
    if getattr(args, "gate", None):
        return GATES[args.gate]
    spec = _noise_spec(args, config)
    if not spec.kind.is_unitary:
        raise ValueError(f"APEP needs unitary noise (rz or general-axis), got '{spec.kind.value}'")
    return noise_unitary(spec)


def _sizes(args: argparse.Namespace, default_l: int = 4) -> tuple[int, int]:
    n = args.L if args.L is not None else default_l
    if n < 1:
        raise ValueError(f"--L must be >= 1, got {n}")
    if not 1 <= args.k <= n:
        raise ValueError(f"--k must be in [1, {n}], got {args.k}")
    return n, args.k


def _seed(config: Config) -> int:
    """The configured seed, or fresh entropy that the manifest then records."""
    if config.seed is None:
        config.seed = int(np.random.SeedSequence().entropy)
    return config.seed


def _output_dir(config: Config) -> Path:
    out = Path(config.output.directory)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ── Commands ──────────────────────────────────────────────────────────────


def cmd_init(args: argparse.Namespace) -> int:
    """Write the example configuration into the current directory."""
    config_dest = Path(args.dest)
    if config_dest.exists() and not args.force:
        print(f"{config_dest} already exists. Use --force to overwrite.")
        return 0
    content = _read_package_data("config.example.yaml")
    if not content:
        print("[FAIL] Could not read config.example.yaml from package data.", file=sys.stderr)
        print("       Try reinstalling: pip install -e .", file=sys.stderr)
        return EXIT_USAGE
    config_dest.write_text(content)
    print(f"Created {config_dest}")
    print("\nNext steps:")
    print(f"  1. Edit {config_dest} (noise model, sample counts, caps)")
    print(f"  2. Verify: noisyclifford selftest")
    print(f"  3. Run: noisyclifford sweep-fit -c {config_dest}")
    return 0


def cmd_aotoc(args: argparse.Namespace) -> int:
    """A-OTOC of one encoding-decoding circuit with a random Clifford."""
    from .core.scrambling import aotoc_definition_mc, aotoc_exact, aotoc_state_estimator
    from .stabilizer.tableau import random_clifford

    config = _load(args)
    n, k = _sizes(args)
    noise = _noise_channel(args, config)
    rng = np.random.default_rng(_seed(config))
    c = random_clifford(n, rng).to_dense(cap=config.caps.dense_tableau).matrix
    channel = encode_decode_channel(c, noise, k, n)
    cut = Bipartition.symmetric(n)
    if args.method == "exact":
        print(_fmt(aotoc_exact(channel, cut, cap=config.caps.two_copy)))
        return 0
    if args.method == "state":
        est = aotoc_state_estimator(channel, cut, args.samples, seed=rng, cap=config.caps.state_estimator)
    else:
        est = aotoc_definition_mc(channel, cut, args.samples, seed=rng, cap=config.caps.mc_definition)
    print(f"{_fmt(est.value)} +- {est.stderr:.3g}")
    return 0


def cmd_apep(args: argparse.Namespace) -> int:
    """APEP of C^dagger (U^{(x)k} (x) I) for a random Clifford C."""
    from .core.nonlocal_magic import apep_enumeration, apep_four_copy, apep_single_copy
    from .stabilizer.tableau import random_clifford

    config = _load(args)
    n, k = _sizes(args)
    u = _noise_gate(args, config)
    rng = np.random.default_rng(_seed(config))
    tab = random_clifford(n, rng)
    cut = Bipartition.symmetric(n)
    if args.method == "single-copy":
        value = apep_single_copy(tab, u, k, n, cut, cap=config.caps.apep_single_copy)
    else:
        c = tab.to_dense(cap=config.caps.dense_tableau).matrix
        op = DenseOperator.qubits(encode_only_unitary(c, u, k, n))
        if args.method == "enumeration":
            value = apep_enumeration(op, cut, cap=config.caps.apep_enumeration)
        else:
            value = apep_four_copy(op, cut, cap=config.caps.four_copy)
    print(_fmt(value))
    return 0


def cmd_avg_aotoc(args: argparse.Namespace) -> int:
    """Clifford-averaged A-OTOC, at finite L with --L or in the L -> infinity limit."""
    from .core.clifford_moments import avg_aotoc_finite_L, avg_aotoc_infinite

    config = _load(args)
    noise = _noise_channel(args, config)
    if args.L is None:
        value = avg_aotoc_infinite(noise, args.k)
    else:
        value = avg_aotoc_finite_L(noise, args.k, args.L, cap=config.caps.factorized)
    print(_fmt(value))
    return 0


def cmd_avg_apep(args: argparse.Namespace) -> int:
    """Clifford-averaged APEP, at finite L with --L or in the L -> infinity limit."""
    from .core.clifford_moments import avg_apep_finite_L, avg_apep_infinite

    config = _load(args)
    u = _noise_gate(args, config)
    if args.L is None:
        value = avg_apep_infinite(u, args.k)
    else:
        value = avg_apep_finite_L(u, args.k, args.L, cap=config.caps.factorized)
    print(_fmt(value))
    return 0


def cmd_haar_avg(args: argparse.Namespace) -> int:
    """Haar-averaged A-OTOC in the L -> infinity limit."""
    from .core.clifford_moments import haar_vs_clifford_report
    from .core.scrambling import haar_avg_aotoc_infinite

    config = _load(args)
    noise = _noise_channel(args, config)
    print(_fmt(haar_avg_aotoc_infinite(natural_representation(noise), args.k)))
    if args.compare:
        report = haar_vs_clifford_report(noise, args.k)
        print(f"clifford_aotoc {_fmt(report.clifford_aotoc)}")
        print(f"haar_aotoc     {_fmt(report.haar_aotoc)}")
        if report.clifford_apep is not None:
            print(f"clifford_apep  {_fmt(report.clifford_apep)}")
    return 0


def cmd_capacity(args: argparse.Namespace) -> int:
    """Magic capacity of a single-qubit gate or noise channel."""
    from .core.magic_capacity import magic_capacity

    config = _load(args)
    channel = _noise_channel(args, config)
    print(_fmt(magic_capacity(channel, threads=config.threads, tol=config.tolerances.lp)))
    return 0


def cmd_sweep_fit(args: argparse.Namespace) -> int:
    """APEP-vs-capacity sweep, joint fit and block bootstrap, written as artifacts."""
    from .experiments.fitting import bootstrap_fit, fit_apep_capacity
    from .experiments.io import (
        read_sweep_csv,
        sweep_plot_data,
        write_bootstrap_csv,
        write_fit_json,
        write_manifest,
        write_plot_data,
        write_sweep_csv,
    )
    from .experiments.sweep import sweep_apep_vs_capacity

    started = time.monotonic()
    config = _load(args)
    if args.n_unitaries is not None:
        config.sweep.n_unitaries = args.n_unitaries
    if args.k_max is not None:
        config.sweep.k_max = args.k_max
    if args.resamples is not None:
        config.sweep.resamples = args.resamples
    seed = _seed(config)
    seeds = np.random.SeedSequence(seed).spawn(2)
    out = _output_dir(config)

    if args.from_csv:
        rows = read_sweep_csv(Path(args.from_csv))
        logger.info("Loaded %d sweep rows from %s", len(rows), args.from_csv)
    else:
        rows = sweep_apep_vs_capacity(
            n_unitaries=config.sweep.n_unitaries,
            k_max=config.sweep.k_max,
            seed=seeds[0],
            threads=config.threads,
        )
    base = fit_apep_capacity(rows, tol=config.tolerances.fit, max_nfev=config.sweep.max_nfev)
    fit = bootstrap_fit(rows, resamples=config.sweep.resamples, seed=seeds[1], threads=config.threads, base=base)

    artifacts = [
        write_sweep_csv(out / "sweep.csv", rows),
        write_fit_json(out / "fit.json", fit),
        write_bootstrap_csv(out / "bootstrap.csv", fit),
    ]
    if config.output.plot_data:
        artifacts.append(write_plot_data(out / "sweep_plot.csv", sweep_plot_data(rows, fit)))
    write_manifest(out / "manifest.json", _command(args), config.to_dict(), seed, time.monotonic() - started, artifacts)

    status = "[OK]" if fit.converged else "[WARN]"
    print(f"{status} a = {_fmt(fit.a)} +- {fit.a_stderr:.3g}  CI95 [{_fmt(fit.a_ci95[0])}, {_fmt(fit.a_ci95[1])}]")
    print(f"{status} b = {_fmt(fit.b)} +- {fit.b_stderr:.3g}  CI95 [{_fmt(fit.b_ci95[0])}, {_fmt(fit.b_ci95[1])}]")
    if fit.bootstrap_failures:
        print(f"[WARN] {fit.bootstrap_failures} of {config.sweep.resamples} bootstrap refits failed")
    print(f"Artifacts written to {out}")
    return 0


def cmd_typicality(args: argparse.Namespace) -> int:
    """Variance-over-Cliffords scans for APEP and/or A-OTOC."""
    from .experiments.io import typicality_plot_data, write_manifest, write_plot_data, write_typicality_csv
    from .experiments.typicality import spearman_trend, typicality_aotoc, typicality_apep

    started = time.monotonic()
    config = _load(args)
    t = config.typicality
    seed = _seed(config)
    seeds = np.random.SeedSequence(seed).spawn(2)
    out = _output_dir(config)
    k_values = range(t.k_min, t.k_max + 1)
    scans = {}
    if args.which in ("apep", "both"):
        scans["apep"] = typicality_apep(
            range(t.apep_l_min, t.apep_l_max + 1), n_u=t.n_u, n_c=t.n_c_apep,
            k_values=k_values, seed=seeds[0], threads=config.threads,
        )
    if args.which in ("aotoc", "both"):
        scans["aotoc"] = typicality_aotoc(
            range(t.aotoc_l_min, t.aotoc_l_max + 1), n_psi=t.n_psi, n_c=t.n_c_aotoc, n_v=t.n_v,
            k_values=k_values, seed=seeds[1], threads=config.threads,
        )

    artifacts = []
    for name, records in scans.items():
        artifacts.append(write_typicality_csv(out / f"typicality_{name}.csv", records))
        if config.output.plot_data:
            artifacts.append(write_plot_data(out / f"typicality_{name}_plot.csv", typicality_plot_data(records)))
        if len({r.L for r in records}) < 3:
            print(f"[--] {name}: fewer than 3 values of L, trend test skipped")
            continue
        for k, (rho, p) in spearman_trend(records).items():
            status = "[OK]" if rho < 0 and p < 0.05 else "[WARN]"
            print(f"{status} {name} k={k}: Spearman rho = {rho:.3f}, p = {p:.3g}")
    write_manifest(out / "manifest.json", _command(args), config.to_dict(), seed, time.monotonic() - started, artifacts)
    print(f"Artifacts written to {out}")
    return 0


def cmd_selftest(args: argparse.Namespace) -> int:
    """Run the oracle-equivalence suite."""
    from .selftest import run_selftest

    print(f"noisyclifford v{__version__} — selftest\n")
    results = run_selftest(seed=args.seed if args.seed is not None else 0, full=args.full)
    failed = []
    for r in results:
        if r.ok:
            print(f"[OK] {r.name} (discrepancy {r.discrepancy:.2e})")
        else:
            detail = f": {r.detail}" if r.detail else ""
            print(f"[FAIL] {r.name} (discrepancy {r.discrepancy:.2e}, tolerance {r.tolerance:.0e}){detail}")
            failed.append(r.name)
    if failed:
        print(f"\n[FAIL] {len(failed)} check(s) failed: {', '.join(failed)}")
        return EXIT_SELFTEST_FAILED
    print(f"\n[OK] all {len(results)} checks passed")
    return 0


# ── Parser ────────────────────────────────────────────────────────────────


def _command(args: argparse.Namespace) -> str:
    return " ".join(["noisyclifford", *args.argv])


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("-c", "--config", default=None, help="Config file path (YAML or JSON)")
    p.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE", help="Override a config field")
    p.add_argument("--seed", type=int, default=None, help="Master random seed")
    p.add_argument("--threads", type=int, default=None, help="Worker threads (env NOISYCLIFFORD_THREADS)")
    p.add_argument("-v", "--verbose", action="store_true", help="Debug logging")


def _add_noise(p: argparse.ArgumentParser, gate: bool = True) -> None:
    p.add_argument("--noise", choices=[k.value for k in NoiseKind], default=None, help="Noise family")
    p.add_argument("--theta", type=float, default=None, help="Rotation angle (radians)")
    p.add_argument("--gamma", type=float, default=None, help="Axis polar angle (radians)")
    p.add_argument("--phi", type=float, default=None, help="Axis azimuthal angle (radians)")
    p.add_argument("--p", type=float, default=None, help="Depolarizing probability")
    p.add_argument("--px", type=float, default=None, help="Pauli-channel X probability")
    p.add_argument("--py", type=float, default=None, help="Pauli-channel Y probability")
    p.add_argument("--pz", type=float, default=None, help="Pauli-channel Z probability")
    p.add_argument("--kraus-file", default=None, help="(m, 2, 2) .npy array of Kraus operators")
    if gate:
        p.add_argument("--gate", choices=sorted(GATES), default=None, help="Named single-qubit gate instead of --noise")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noisyclifford",
        description="Scrambling and nonlocal magic of noisy Clifford encoding-decoding circuits",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command")

    # init
    init_parser = subparsers.add_parser("init", help="Write an example config")
    init_parser.add_argument("--dest", default="config.yaml", help="Destination file")
    init_parser.add_argument("--force", action="store_true", help="Overwrite existing files")
    init_parser.set_defaults(func=cmd_init)

    # aotoc
    aotoc_parser = subparsers.add_parser("aotoc", help="A-OTOC of one random encoding-decoding circuit")
    _add_common(aotoc_parser)
    _add_noise(aotoc_parser)
    aotoc_parser.add_argument("--L", type=int, default=None, help="Number of qubits (default 4)")
    aotoc_parser.add_argument("--k", type=int, default=1, help="Number of noisy qubits")
    aotoc_parser.add_argument("--method", choices=["exact", "state", "definition"], default="exact")
    aotoc_parser.add_argument("--samples", type=int, default=64, help="Monte Carlo samples")
    aotoc_parser.set_defaults(func=cmd_aotoc)

    # apep
    apep_parser = subparsers.add_parser("apep", help="APEP of one random encoding circuit")
    _add_common(apep_parser)
    _add_noise(apep_parser)
    apep_parser.add_argument("--L", type=int, default=None, help="Number of qubits (default 4)")
    apep_parser.add_argument("--k", type=int, default=1, help="Number of noisy qubits")
    apep_parser.add_argument("--method", choices=["single-copy", "enumeration", "four-copy"], default="single-copy")
    apep_parser.set_defaults(func=cmd_apep)

    # avg-aotoc / avg-apep / haar-avg
    for name, func, text in (
        ("avg-aotoc", cmd_avg_aotoc, "Clifford-averaged A-OTOC"),
        ("avg-apep", cmd_avg_apep, "Clifford-averaged APEP"),
        ("haar-avg", cmd_haar_avg, "Haar-averaged A-OTOC (L -> infinity)"),
    ):
        p = subparsers.add_parser(name, help=text)
        _add_common(p)
        _add_noise(p)
        p.add_argument("--k", type=int, default=1, help="Number of noisy qubits")
        if name != "haar-avg":
            p.add_argument("--L", type=int, default=None, help="Finite number of qubits (default: L -> infinity)")
        else:
            p.add_argument("--compare", action="store_true", help="Also print the Clifford averages")
        p.set_defaults(func=func)

    # capacity
    cap_parser = subparsers.add_parser("capacity", help="Magic capacity of a single-qubit channel")
    _add_common(cap_parser)
    _add_noise(cap_parser)
    cap_parser.set_defaults(func=cmd_capacity)

    # sweep-fit
    sweep_parser = subparsers.add_parser("sweep-fit", help="APEP vs magic capacity sweep with fit and bootstrap")
    _add_common(sweep_parser)
    sweep_parser.add_argument("--n-unitaries", type=int, default=None, help="Random unitaries to sample")
    sweep_parser.add_argument("--k-max", type=int, default=None, help="Largest k")
    sweep_parser.add_argument("--resamples", type=int, default=None, help="Bootstrap resamples")
    sweep_parser.add_argument("--from-csv", default=None, help="Refit an existing sweep.csv")
    sweep_parser.add_argument("--output-dir", default=None, help="Artifact directory (env NOISYCLIFFORD_OUTPUT_DIR)")
    sweep_parser.set_defaults(func=cmd_sweep_fit)

    # typicality
    typ_parser = subparsers.add_parser("typicality", help="Variance-over-Cliffords scans")
    _add_common(typ_parser)
    typ_parser.add_argument("--which", choices=["apep", "aotoc", "both"], default="both")
    typ_parser.add_argument("--output-dir", default=None, help="Artifact directory (env NOISYCLIFFORD_OUTPUT_DIR)")
    typ_parser.set_defaults(func=cmd_typicality)

    # selftest
    self_parser = subparsers.add_parser("selftest", help="Run the oracle-equivalence suite")
    self_parser.add_argument("--seed", type=int, default=None, help="Random seed (default 0)")
    self_parser.add_argument("--full", action="store_true", help="Full-size oracles (two-qubit exhaustive twirl)")
    self_parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    self_parser.set_defaults(func=cmd_selftest)

    return parser


_EXPERIMENTS = {"sweep-fit", "typicality", "selftest"}


def run(argv: Sequence[str] | None = None) -> int:
    """Parse argv, run the subcommand and map failures to exit codes."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    if not args.command:
        parser.print_help()
        return 0
    args.argv = argv

    verbose = getattr(args, "verbose", False)
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO if args.command in _EXPERIMENTS else logging.WARNING,
        format="%(asctime)s [%(name)s] %(levelname)s: %(message)s",
    )

    try:
        return args.func(args)
    except CapExceededError as e:
        print(f"[FAIL] {e}", file=sys.stderr)
        return EXIT_CAP
    except NumericalError as e:
        print(f"[FAIL] {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, FileNotFoundError) as e:
        print(f"[FAIL] {e}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run())
