"""Numerical laboratory for the 1+1D Salpeter (square-root Klein-Gordon) equation."""

from .core import (NATURAL, Event, GridSpec, GridState, PlaneWaveMode, SuperpositionState, UnitSystem,
                   dispersion_energy, from_momentum, mode_velocity, pair_velocity, sample_superposition,
                   to_momentum)
from .densities import (DensityCurrentPair, SpinorField, born_current_bilinear, born_current_series,
                        born_density, continuity_residual, dirac_density_current, dirac_spinor_from_scalar)
from .lorentz import (Boost, alpha_coefficient, beta_coefficient, boost_event, boost_momentum,
                      born_transform_residual, consistency_ratio, dirac_fourvector_residual, ratio_surface,
                      spinor_boost_matrix)
from .operators import (SeriesTruncation, SymbolFunction, apply_A, apply_B, apply_sqrt_hamiltonian,
                        apply_symbol, apply_truncated_series, propagate, schrodinger_propagate,
                        series_coefficient)
from .specfun import KernelTable, convolve_hamiltonian, discrete_kernel_1d, kernel_3d, macdonald

__version__ = "0.1.0"

__all__ = [
    "alpha_coefficient", "apply_A", "apply_B", "apply_sqrt_hamiltonian", "apply_symbol",
    "apply_truncated_series", "beta_coefficient", "Boost", "boost_event", "boost_momentum",
    "born_current_bilinear", "born_current_series", "born_density", "born_transform_residual",
    "consistency_ratio", "continuity_residual", "DensityCurrentPair", "dirac_density_current",
    "dirac_fourvector_residual", "dirac_spinor_from_scalar", "dispersion_energy", "Event", "from_momentum",
    "GridSpec", "GridState", "mode_velocity", "NATURAL", "pair_velocity", "PlaneWaveMode", "propagate",
    "ratio_surface", "sample_superposition", "schrodinger_propagate", "series_coefficient",
    "SeriesTruncation", "spinor_boost_matrix", "SpinorField", "SuperpositionState", "SymbolFunction",
    "to_momentum", "UnitSystem",
    "KernelTable", "convolve_hamiltonian", "discrete_kernel_1d", "kernel_3d", "macdonald",
]
