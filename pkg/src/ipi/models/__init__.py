"""
模型生成器
==========

动态 SIS 传染病 MDP 与带种子的随机 MDP。
"""

from .random_mdp import RandomMdpSpec, generate_random_model, random_mdp_spec
from .sis import (
    NUM_ACTIONS,
    SisParams,
    TransitionRow,
    action_index,
    action_levels,
    action_matrix,
    build_sis_mdp,
    cost_table,
    infection_probability,
    load_sis_params,
    sis_params,
    sparsity_mask,
    stage_cost,
    transition_row,
)

__all__ = [
    "RandomMdpSpec",
    "random_mdp_spec",
    "generate_random_model",
    "SisParams",
    "TransitionRow",
    "NUM_ACTIONS",
    "sis_params",
    "load_sis_params",
    "action_index",
    "action_levels",
    "infection_probability",
    "transition_row",
    "stage_cost",
    "cost_table",
    "action_matrix",
    "sparsity_mask",
    "build_sis_mdp",
]
