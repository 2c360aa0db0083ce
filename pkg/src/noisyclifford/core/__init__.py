"""Scrambling, nonlocal magic, Clifford fourth moments and magic capacity."""

from .clifford_moments import (
    avg_aotoc_finite_L,
    avg_aotoc_infinite,
    avg_apep_finite_L,
    avg_apep_infinite,
    haar_vs_clifford_report,
    phi_clifford_4,
    weingarten_table,
)
from .magic_capacity import enumerate_stabilizer_states, magic_capacity, robustness
from .nonlocal_magic import apep_enumeration, apep_four_copy, apep_single_copy
from .scrambling import aotoc_definition_mc, aotoc_exact, aotoc_state_estimator, haar_avg_aotoc_infinite

__all__ = [
    "aotoc_definition_mc",
    "aotoc_exact",
    "aotoc_state_estimator",
    "apep_enumeration",
    "apep_four_copy",
    "apep_single_copy",
    "avg_aotoc_finite_L",
    "avg_aotoc_infinite",
    "avg_apep_finite_L",
    "avg_apep_infinite",
    "enumerate_stabilizer_states",
    "haar_avg_aotoc_infinite",
    "haar_vs_clifford_report",
    "magic_capacity",
    "phi_clifford_4",
    "robustness",
    "weingarten_table",
]
