"""Quadrupole billiard eigenmodes by BEM and wavefunction localization measures."""
from .bem import (GridSpec, IntensityField, ModeSolution, assemble_kernel, find_eigenvalues,
                  interior_field, mode_overlap, singular_value_profile)
from .geometry import (BoundaryMesh, ShapeParams, boundary_derivatives, boundary_point,
                       discretize_boundary, enclosed_area)
from .metrics import (LocalizationReport, ProbabilityVector, ipr, normalize_series, renyi_entropy,
                      report, rms_contrast, shannon_entropy)
from .sweep import SweepConfig, SweepResult, detect_gap_minimum, exchange_diagnostic, run_sweep

__version__ = "0.1.0"

__all__ = [
    "BoundaryMesh", "GridSpec", "IntensityField", "LocalizationReport", "ModeSolution",
    "ProbabilityVector", "ShapeParams", "SweepConfig", "SweepResult", "assemble_kernel",
    "boundary_derivatives", "boundary_point", "detect_gap_minimum", "discretize_boundary",
    "enclosed_area", "exchange_diagnostic", "find_eigenvalues", "interior_field", "ipr",
    "mode_overlap", "normalize_series", "renyi_entropy", "report", "rms_contrast", "run_sweep",
    "shannon_entropy", "singular_value_profile",
]
