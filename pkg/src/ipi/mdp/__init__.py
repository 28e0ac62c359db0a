"""
MDP 核心模块
============

模型表示、Bellman 算子、Bellman 残差、贪心策略提取与精确策略评估。
"""

from .bellman import (
    apply_T,
    apply_T_pi,
    bellman_residual,
    exact_policy_evaluation,
    extract_policy_system,
    solve_policy_system,
)
from .io import read_model, write_model
from .model import (
    MdpModel,
    Policy,
    PolicyLinearSystem,
    ValueVector,
    as_policy,
    as_value_vector,
    build_model,
    model_from_dense,
)

__all__ = [
    "MdpModel",
    "Policy",
    "PolicyLinearSystem",
    "ValueVector",
    "as_policy",
    "as_value_vector",
    "build_model",
    "model_from_dense",
    "apply_T",
    "apply_T_pi",
    "bellman_residual",
    "exact_policy_evaluation",
    "extract_policy_system",
    "solve_policy_system",
    "read_model",
    "write_model",
]
