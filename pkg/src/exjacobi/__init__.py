"""Exceptional Jacobi polynomials from one Darboux step, their multiplication
operators, spectra and asymptotics."""

from .darboux import (
    ExceptionalFamily,
    FamilyError,
    SeedChoice,
    build_family,
    family_from_spec,
    reference_family,
)
from .jacobi import JacobiParams, NumericalError
from .polycore import Polynomial

__all__ = [
    "ExceptionalFamily",
    "FamilyError",
    "JacobiParams",
    "NumericalError",
    "Polynomial",
    "SeedChoice",
    "build_family",
    "family_from_spec",
    "reference_family",
]
