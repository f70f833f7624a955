"""Exact toric computations for logarithmic and parabolic Hochschild homology."""

__version__ = "0.1.0"

from .toric_core import Cone, Fan, FanError, fan_properties, check_modification, star_subdivision
from .monoid_algebra import LevelAlgebra, boundary_ideal, hilbert_basis, level_lift
from .log_derham import cech_hypercohomology, degeneration_check, hp_fold
from .hochschild import ChartSpec, hh_log, hh_log_fan, hh_parabolic_level, hkr_compare
from .mirror_oracle import circle_homology, interval_ext, kernel_hh

__all__ = [
    "Cone", "Fan", "FanError", "fan_properties", "check_modification", "star_subdivision",
    "LevelAlgebra", "boundary_ideal", "hilbert_basis", "level_lift",
    "cech_hypercohomology", "degeneration_check", "hp_fold",
    "ChartSpec", "hh_log", "hh_log_fan", "hh_parabolic_level", "hkr_compare",
    "circle_homology", "interval_ext", "kernel_hh",
]
