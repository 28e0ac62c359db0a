"""
外层动态规划算法
================

值迭代、策略迭代、乐观策略迭代、非精确策略迭代，以及穷举预言机与求解报告。
"""

from .algorithms import (
    inexact_pi,
    optimistic_pi,
    outer_solvers,
    policy_iteration,
    solve_mdp,
    value_iteration,
)
from .config import ForcingSchedule, OuterConfig, outer_config
from .oracle import brute_force_optimal
from .report import (
    InnerAcceptance,
    SolveReport,
    SolveSummary,
    TerminatedBy,
    write_summary_json,
    write_trace_csv,
)

__all__ = [
    "OuterConfig",
    "ForcingSchedule",
    "outer_config",
    "value_iteration",
    "policy_iteration",
    "optimistic_pi",
    "inexact_pi",
    "solve_mdp",
    "outer_solvers",
    "brute_force_optimal",
    "SolveReport",
    "SolveSummary",
    "InnerAcceptance",
    "TerminatedBy",
    "write_trace_csv",
    "write_summary_json",
]
