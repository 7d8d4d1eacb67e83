"""Symplectic linear algebra and normal forms.

This package provides the standard matrices J and P, the diamond product,
nullities and Krein types, and the ten-case normal-form classification.
"""

from .normal_form import (
    BasicForm,
    CaseTag,
    FormKind,
    NormalFormDecomposition,
    SplittingPair,
    build_basic_form,
    case_representative,
    classify_case,
    decompose,
    index_profile,
    splitting_numbers_numeric,
    splitting_numbers_table,
)
from .symplectic import (
    Dim,
    D_P_omega,
    diamond,
    elliptic_height,
    krein_type,
    make_standard_matrices,
    nu_P_omega,
    spectrum_report,
)

__all__ = [
    "Dim",
    "D_P_omega",
    "diamond",
    "elliptic_height",
    "krein_type",
    "make_standard_matrices",
    "nu_P_omega",
    "spectrum_report",
    "BasicForm",
    "CaseTag",
    "FormKind",
    "NormalFormDecomposition",
    "SplittingPair",
    "build_basic_form",
    "case_representative",
    "classify_case",
    "decompose",
    "index_profile",
    "splitting_numbers_numeric",
    "splitting_numbers_table",
]
