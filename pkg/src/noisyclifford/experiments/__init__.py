"""Numerical studies: capacity sweep, fit, bootstrap and typicality scans."""

from .fitting import bootstrap_fit, fit_apep_capacity
from .sampling import haar_random_unitary
from .sweep import sweep_apep_vs_capacity
from .typicality import spearman_trend, typicality_aotoc, typicality_apep

__all__ = [
    "bootstrap_fit",
    "fit_apep_capacity",
    "haar_random_unitary",
    "spearman_trend",
    "sweep_apep_vs_capacity",
    "typicality_aotoc",
    "typicality_apep",
]
