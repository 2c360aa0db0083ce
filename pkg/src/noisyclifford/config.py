"""Configuration loading from YAML (or JSON) + environment variables."""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

import yaml
from dotenv import load_dotenv

from .models import NoiseKind, NoiseSpec


@dataclass
class CapsConfig:
    """Largest problem sizes the dense and enumerative paths accept (qubits)."""
    enumeration_paulis: int = 8
    dense_pauli: int = 12
    dense_tableau: int = 6
    two_copy: int = 6
    four_copy: int = 3
    apep_enumeration: int = 6
    apep_single_copy: int = 10
    factorized: int = 64
    mc_definition: int = 4
    state_estimator: int = 8


@dataclass
class ToleranceConfig:
    exact: float = 1e-12
    lp: float = 1e-8
    fit: float = 1e-10


@dataclass
class SweepConfig:
    n_unitaries: int = 1000
    k_max: int = 20
    resamples: int = 1000
    max_nfev: int = 500


@dataclass
class TypicalityConfig:
    apep_l_min: int = 3
    apep_l_max: int = 8
    n_u: int = 4
    n_c_apep: int = 12
    aotoc_l_min: int = 4
    aotoc_l_max: int = 8
    n_psi: int = 8
    n_c_aotoc: int = 50
    n_v: int = 10
    k_min: int = 1
    k_max: int = 3


@dataclass
class OutputConfig:
    directory: str = "results"
    plot_data: bool = True


@dataclass
class Config:
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    caps: CapsConfig = field(default_factory=CapsConfig)
    tolerances: ToleranceConfig = field(default_factory=ToleranceConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    typicality: TypicalityConfig = field(default_factory=TypicalityConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    seed: int | None = None
    threads: int = 1

    def to_dict(self) -> dict:
        """Plain dict for the run manifest."""
        d = asdict(self)
        d["noise"]["kind"] = self.noise.kind.value
        return d


def _at_least(section: str, values: dict, minimum: int) -> None:
    for key, value in values.items():
        if value < minimum:
            raise ValueError(f"{section}.{key} must be >= {minimum}, got {value}")


def _positive(section: str, values: dict) -> None:
    for key, value in values.items():
        if not value > 0:
            raise ValueError(f"{section}.{key} must be > 0, got {value}")


def _threads_from_env(default: int) -> int:
    raw = os.environ.get("NOISYCLIFFORD_THREADS", "")
    if not raw:
        return default
    try:
        threads = int(raw)
    except ValueError:
        raise ValueError(f"NOISYCLIFFORD_THREADS must be a positive integer, got '{raw}'") from None
    if threads < 1:
        raise ValueError(f"NOISYCLIFFORD_THREADS must be a positive integer, got '{raw}'")
    return threads


def apply_env_overrides(config: Config) -> Config:
    """NOISYCLIFFORD_OUTPUT_DIR and NOISYCLIFFORD_THREADS win over file values."""
    out_dir = os.environ.get("NOISYCLIFFORD_OUTPUT_DIR", "")
    if out_dir:
        config.output.directory = out_dir
    config.threads = _threads_from_env(config.threads)
    return config


def default_config(env_path: str | Path | None = None) -> Config:
    """Built-in defaults plus .env and environment overrides, for runs without a config file."""
    if env_path:
        load_dotenv(env_path)
    else:
        load_dotenv()
    return apply_env_overrides(Config())


def _int(data: dict, key: str, default: int) -> int:
    return int(data.get(key, default))


def _expand(value):
    """$VAR / ${VAR} expansion for the path and run-control fields; unset names stay literal."""
    return os.path.expandvars(value) if isinstance(value, str) else value


def _int_field(name: str, value) -> int:
    value = _expand(value)
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ValueError(f"{name} must be an integer, got '{value}'") from None


def load_config(config_path: str | Path, env_path: str | Path | None = None) -> Config:
    """Load config from a YAML file with env var resolution and range checks."""
    config_path = Path(config_path).resolve()
    config_dir = config_path.parent

    if env_path:
        load_dotenv(env_path)
    else:
        # Look for .env next to config file first, then CWD
        env_beside_config = config_dir / ".env"
        if env_beside_config.exists():
            load_dotenv(env_beside_config)
        else:
            load_dotenv()

    if not config_path.exists():
        raise FileNotFoundError(f"Config file not found: {config_path}")

    with open(config_path) as f:
        raw = yaml.safe_load(f) or {}
    if not isinstance(raw, dict):
        raise ValueError(f"Config file {config_path} must contain a mapping at the top level")

    noise_data = raw.get("noise", {})
    kind_name = noise_data.get("kind", NoiseKind.RZ.value)
    try:
        kind = NoiseKind(kind_name)
    except ValueError:
        valid = ", ".join(k.value for k in NoiseKind)
        raise ValueError(f"noise.kind must be one of {valid}, got '{kind_name}'") from None
    kraus_file = _expand(noise_data.get("kraus_file", ""))
    # Resolve relative paths against config file directory
    if kraus_file and not Path(kraus_file).is_absolute():
        kraus_file = str(config_dir / kraus_file)
    noise = NoiseSpec(
        kind=kind,
        theta=float(noise_data.get("theta", 0.0)),
        gamma=float(noise_data.get("gamma", 0.0)),
        phi=float(noise_data.get("phi", 0.0)),
        p=float(noise_data.get("p", 0.0)),
        px=float(noise_data.get("px", 0.0)),
        py=float(noise_data.get("py", 0.0)),
        pz=float(noise_data.get("pz", 0.0)),
        kraus_file=kraus_file,
    )
    noise.validate()

    caps_data = raw.get("caps", {})
    defaults = CapsConfig()
    caps = CapsConfig(**{
        name: _int(caps_data, name, getattr(defaults, name))
        for name in asdict(defaults)
    })
    unknown = set(caps_data) - set(asdict(defaults))
    if unknown:
        raise ValueError(f"Unknown caps key(s): {', '.join(sorted(unknown))}")
    _at_least("caps", asdict(caps), 1)

    tol_data = raw.get("tolerances", {})
    tolerances = ToleranceConfig(
        exact=float(tol_data.get("exact", 1e-12)),
        lp=float(tol_data.get("lp", 1e-8)),
        fit=float(tol_data.get("fit", 1e-10)),
    )
    _positive("tolerances", asdict(tolerances))

    sweep_data = raw.get("sweep", {})
    sweep = SweepConfig(
        n_unitaries=_int(sweep_data, "n_unitaries", 1000),
        k_max=_int(sweep_data, "k_max", 20),
        resamples=_int(sweep_data, "resamples", 1000),
        max_nfev=_int(sweep_data, "max_nfev", 500),
    )
    _at_least("sweep", asdict(sweep), 1)

    typ_data = raw.get("typicality", {})
    typ_defaults = TypicalityConfig()
    typicality = TypicalityConfig(**{
        name: _int(typ_data, name, getattr(typ_defaults, name))
        for name in asdict(typ_defaults)
    })
    _at_least("typicality", asdict(typicality), 1)
    for lo, hi in (("apep_l_min", "apep_l_max"), ("aotoc_l_min", "aotoc_l_max"), ("k_min", "k_max")):
        if getattr(typicality, lo) > getattr(typicality, hi):
            raise ValueError(
                f"typicality.{lo} must not exceed typicality.{hi}, "
                f"got {getattr(typicality, lo)} > {getattr(typicality, hi)}"
            )
    for name in ("n_c_apep", "n_c_aotoc"):
        if getattr(typicality, name) < 2:
            raise ValueError(f"typicality.{name} must be >= 2, got {getattr(typicality, name)}")

    out_data = raw.get("output", {})
    output = OutputConfig(
        directory=str(_expand(out_data.get("directory", "results"))),
        plot_data=bool(out_data.get("plot_data", True)),
    )

    seed = raw.get("seed")
    if seed is not None:
        seed = _int_field("seed", seed)
        if seed < 0:
            raise ValueError(f"seed must be >= 0, got {seed}")

    threads = _int_field("threads", raw.get("threads", 1))
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")

    config = Config(
        noise=noise,
        caps=caps,
        tolerances=tolerances,
        sweep=sweep,
        typicality=typicality,
        output=output,
        seed=seed,
        threads=threads,
    )
    return apply_env_overrides(config)
