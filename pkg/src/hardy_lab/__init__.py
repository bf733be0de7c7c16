"""Numerical laboratory for Gaussian-decay uncertainty estimates of
Schrödinger evolutions ``u_t = i(u_xx + V u)`` in one space dimension."""

from .errors import (
    HardyLabError,
    ContractError,
    NumericalError,
    TruncationError,
    NonIntegrableWeight,
    UnstableWeighting,
    NoRealRoot,
    InvalidOrder,
    SingularKernel,
    NonpositiveF,
    NegativeIntegrand,
    SingularRecursion,
    DomainError,
)
from .grid import SpatialGrid, WaveField, Trajectory, make_grid

__all__ = [
    "HardyLabError", "ContractError", "NumericalError", "TruncationError", "NonIntegrableWeight",
    "UnstableWeighting", "NoRealRoot", "InvalidOrder", "SingularKernel", "NonpositiveF",
    "NegativeIntegrand", "SingularRecursion", "DomainError",
    "SpatialGrid", "WaveField", "Trajectory", "make_grid",
]

__version__ = "0.1.0"
