"""Dual action on the P-twisted loop space and its critical points."""

from pindex.variational.dual_action import (
    DualProblem,
    OrbitRecord,
    find_critical_points,
    geometric_distinctness,
    numeric_fenchel,
    psi_gradient,
    psi_hessian_matrix,
    psi_value,
    reconstruct_orbit,
)
from pindex.variational.fourier import DualElement, FourierBasis, apply_Pi
from pindex.variational.hessian import (
    CrossCheckRecord,
    analyze_orbit,
    comparison_forms,
    constant_crosscheck,
    hessian_index,
    index_interval_check,
    q_form_matrix,
    theorem32_crosscheck,
)

__all__ = [
    "CrossCheckRecord",
    "DualElement",
    "DualProblem",
    "FourierBasis",
    "OrbitRecord",
    "analyze_orbit",
    "apply_Pi",
    "comparison_forms",
    "constant_crosscheck",
    "find_critical_points",
    "geometric_distinctness",
    "hessian_index",
    "index_interval_check",
    "numeric_fenchel",
    "psi_gradient",
    "psi_hessian_matrix",
    "psi_value",
    "q_form_matrix",
    "reconstruct_orbit",
    "theorem32_crosscheck",
]
