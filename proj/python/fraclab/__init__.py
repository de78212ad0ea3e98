"""Box dimensions of inhomogeneous self-similar attractors."""

from ._core import (
    classify,
    classify_value,
    comb_counts_csv,
    comb_dimension,
    corollary_bound,
    exact_collision,
    orbit_eps,
    scaled_gap,
    scan_csv,
    separation_csv,
    thm1_bound,
    version,
    wsp_overall,
)

__version__ = version()

__all__ = [
    "classify",
    "classify_value",
    "comb_counts_csv",
    "comb_dimension",
    "corollary_bound",
    "exact_collision",
    "orbit_eps",
    "scaled_gap",
    "scan_csv",
    "separation_csv",
    "thm1_bound",
    "version",
    "wsp_overall",
]
