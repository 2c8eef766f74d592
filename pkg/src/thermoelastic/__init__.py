"""Dispersive decay analysis for type-1 thermo-elasticity in anisotropic 2D media."""

from .decay import DecayReport, microlocal_exponent, overall_rate, sector_exponent
from .errors import (
    AssumptionViolated, DegenerateDirection, InsufficientData, NonConvergent,
    OrderAmbiguous, RootFindingFailure, ThermoelasticError, UnstableStep,
)
from .hyperbolic import check_assumptions, find_hyperbolic_directions
from .media import Moduli, SymmetryClass, classify_symmetry, load_medium
from .spectral import eigen_at

__version__ = "0.1.0"

__all__ = [
    "AssumptionViolated", "DecayReport", "DegenerateDirection", "InsufficientData", "Moduli",
    "NonConvergent", "OrderAmbiguous", "RootFindingFailure", "SymmetryClass", "ThermoelasticError",
    "UnstableStep", "check_assumptions", "classify_symmetry", "eigen_at", "find_hyperbolic_directions",
    "load_medium", "microlocal_exponent", "overall_rate", "sector_exponent",
]
