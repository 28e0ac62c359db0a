"""
求解报告
========

SolveReport 记录外层迭代的全部轨迹，第 k 项对应迭代点 V_k：
- residual_history[k] = ‖r(V_k)‖∞
- error_history[k] = ‖V_k - V_ref‖∞ (提供参考解时)
- inner_iters_history[k] = 得到 V_k 所用的内层迭代次数 (k = 0 时为 0)
- time_history[k] = 记录 V_k 时的累计耗时

iPI 额外记录每次内层求解的验收信息 (阈值、被接受的残差、是否收敛)。
"""

import csv
import io
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import List, Optional, Union

from pydantic import BaseModel

from ipi.core.fileio import atomic_write_text
from ipi.mdp.model import Policy, ValueVector

TRACE_HEADER = ("iter", "residual_inf", "error_inf", "inner_iters", "cum_time_s")


class TerminatedBy(str, Enum):
    TOLERANCE = "Tolerance"
    MAX_ITERS = "MaxIters"
    TIME_BUDGET = "TimeBudget"


@dataclass(frozen=True)
class InnerAcceptance:
    """一次 iPI 内层求解的验收记录"""

    outer_iter: int
    alpha: float
    reference_residual_inf: float
    threshold: float
    accepted_residual_inf: float
    inner_iters: int
    converged: bool


class SolveSummary(BaseModel):
    solver: str
    inner: Optional[str] = None
    n: int
    m: int
    gamma: float
    alpha: Optional[float] = None
    outer_iters: int
    total_inner_iters: int
    wall_time_s: float
    final_residual_inf: float
    terminated_by: TerminatedBy


@dataclass
class SolveReport:
    solver: str
    n: int
    m: int
    gamma: float
    final_value: ValueVector
    final_policy: Policy
    outer_iters: int
    residual_history: List[float]
    inner_iters_history: List[int]
    time_history: List[float]
    wall_time_s: float
    terminated_by: TerminatedBy
    error_history: List[float] = field(default_factory=list)
    inner_acceptance: List[InnerAcceptance] = field(default_factory=list)
    inner: Optional[str] = None
    alpha: Optional[float] = None

    @property
    def total_inner_iters(self) -> int:
        return int(sum(self.inner_iters_history))

    @property
    def final_residual_inf(self) -> float:
        return self.residual_history[-1]

    @property
    def converged(self) -> bool:
        return self.terminated_by is TerminatedBy.TOLERANCE

    def to_summary(self) -> SolveSummary:
        return SolveSummary(
            solver=self.solver,
            inner=self.inner,
            n=self.n,
            m=self.m,
            gamma=self.gamma,
            alpha=self.alpha,
            outer_iters=self.outer_iters,
            total_inner_iters=self.total_inner_iters,
            wall_time_s=self.wall_time_s,
            final_residual_inf=self.final_residual_inf,
            terminated_by=self.terminated_by,
        )

    def trace_rows(self) -> List[List[Union[int, float, str]]]:
        """trace CSV 的数据行，无参考解时 error_inf 为空"""
        rows: List[List[Union[int, float, str]]] = []
        for k in range(self.outer_iters + 1):
            error: Union[float, str] = self.error_history[k] if self.error_history else ""
            rows.append(
                [
                    k,
                    self.residual_history[k],
                    error,
                    self.inner_iters_history[k],
                    self.time_history[k],
                ]
            )
        return rows

    def trace_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(TRACE_HEADER)
        writer.writerows(self.trace_rows())
        return buffer.getvalue()


def write_trace_csv(report: SolveReport, path: Union[str, Path]) -> Path:
    return atomic_write_text(path, report.trace_csv())


def write_summary_json(report: SolveReport, path: Union[str, Path]) -> Path:
    return atomic_write_text(path, report.to_summary().model_dump_json(indent=2) + "\n")


__all__ = [
    "SolveReport",
    "SolveSummary",
    "InnerAcceptance",
    "TerminatedBy",
    "TRACE_HEADER",
    "write_trace_csv",
    "write_summary_json",
]
