"""
结构与谱分析
============

不可约性、周期与本原性、MDP 分类 (General / Ergodic / Regular)，
以及 Richardson 加速区间、对称部分正定性与最小多项式次数等谱判据。
"""

from .spectral import (
    SymmetricPartAnalysis,
    minimal_polynomial_degree,
    peripheral_eigenvalue_count,
    richardson_iteration_radius,
    richardson_nu_interval,
    spectral_radius,
    symmetric_part_analysis,
)
from .structure import (
    MatrixClassification,
    MdpClass,
    MdpVerdict,
    classify_matrix,
    classify_mdp,
    is_irreducible,
    period_and_primitivity,
)

__all__ = [
    "MatrixClassification",
    "MdpClass",
    "MdpVerdict",
    "is_irreducible",
    "period_and_primitivity",
    "classify_matrix",
    "classify_mdp",
    "SymmetricPartAnalysis",
    "spectral_radius",
    "peripheral_eigenvalue_count",
    "richardson_iteration_radius",
    "richardson_nu_interval",
    "symmetric_part_analysis",
    "minimal_polynomial_degree",
]
