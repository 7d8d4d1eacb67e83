"""Symplectic paths: integration, symmetric extension and concatenation."""

from .engine import (
    concatenate,
    constant_path,
    extend_by_symmetry,
    integrate_fundamental,
    path_to,
    xi_path,
)
from .path import CoefficientFunction, SymplecticPath

__all__ = [
    "CoefficientFunction",
    "SymplecticPath",
    "concatenate",
    "constant_path",
    "extend_by_symmetry",
    "integrate_fundamental",
    "path_to",
    "xi_path",
]
