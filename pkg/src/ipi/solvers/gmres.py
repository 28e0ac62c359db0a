"""
GMRES
=====

Arnoldi (修正 Gram-Schmidt) 构造 Krylov 子空间的正交基 Q 与 Hessenberg 矩阵 H，
用逐步 Givens 旋转求解 min_y ‖ ‖Φ₀‖₂ e₁ - H y ‖₂。

每次迭代都重构真实迭代点与残差，以便按无穷范数判定停止条件。
"""

import logging
import math
from typing import Optional, Tuple

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike

from ipi.core.exceptions import InvalidParameter
from ipi.mdp.model import PolicyLinearSystem, ValueVector
from ipi.solvers.interface import (
    InnerSolver,
    InnerTrace,
    IterateCallback,
    StoppingRule,
    check_dimensions,
    inner_solver,
)
from ipi.solvers.descent import MinRes

logger = logging.getLogger(__name__)

# Arnoldi 次对角元低于该值视为 happy breakdown，此时迭代点即精确解
BREAKDOWN_TOL = 1e-14


def _givens(a: float, b: float) -> Tuple[float, float, float]:
    r = math.hypot(a, b)
    if r == 0.0:
        return 1.0, 0.0, 0.0
    return a / r, b / r, r


def _cycle(
    system: PolicyLinearSystem,
    theta: ValueVector,
    phi: ValueVector,
    rule: StoppingRule,
    steps: int,
    trace: InnerTrace,
    on_iterate: Optional[IterateCallback],
) -> Tuple[ValueVector, ValueVector, bool]:
    """
    从 theta 出发运行至多 steps 步 GMRES

    Returns:
        (迭代点, 残差, 是否结束)，结束指满足停止条件或发生 breakdown
    """
    n = system.n
    beta = float(np.linalg.norm(phi))
    if beta == 0.0:
        return theta, phi, True

    Q = np.zeros((steps + 1, n))
    H = np.zeros((steps + 1, steps))
    cs = np.zeros(steps)
    sn = np.zeros(steps)
    rhs = np.zeros(steps + 1)
    rhs[0] = beta
    Q[0] = phi / beta

    candidate, candidate_phi = theta, phi
    for j in range(steps):
        w = system.matvec(Q[j])
        for i in range(j + 1):
            H[i, j] = Q[i] @ w
            w -= H[i, j] * Q[i]
        H[j + 1, j] = np.linalg.norm(w)
        breakdown = H[j + 1, j] < BREAKDOWN_TOL
        if not breakdown:
            Q[j + 1] = w / H[j + 1, j]

        for i in range(j):
            upper = cs[i] * H[i, j] + sn[i] * H[i + 1, j]
            H[i + 1, j] = -sn[i] * H[i, j] + cs[i] * H[i + 1, j]
            H[i, j] = upper
        cs[j], sn[j], H[j, j] = _givens(H[j, j], H[j + 1, j])
        H[j + 1, j] = 0.0
        rhs[j + 1] = -sn[j] * rhs[j]
        rhs[j] = cs[j] * rhs[j]
        if H[j, j] == 0.0:
            return candidate, candidate_phi, False

        y = scipy.linalg.solve_triangular(H[: j + 1, : j + 1], rhs[: j + 1])
        candidate = theta + Q[: j + 1].T @ y
        candidate_phi = system.residual(candidate)
        residual_inf = trace.record(candidate_phi)
        if on_iterate is not None:
            on_iterate(candidate)
        if rule.is_met(residual_inf) or breakdown:
            return candidate, candidate_phi, True
        if trace.iterations_used >= rule.max_inner_iters:
            break
    return candidate, candidate_phi, breakdown


@inner_solver("gmres")
class Gmres(InnerSolver):
    """
    GMRES，可选重启

    restart 为 None 时不重启；否则每 restart 步从当前迭代点重新构造 Krylov 子空间。
    单步 step 等价于 GMRES(1)，即最小残差步。
    """

    def __init__(self, restart: Optional[int] = None):
        if restart is not None and restart < 1:
            raise InvalidParameter(f"GMRES 重启步数必须 ≥ 1，收到 {restart}")
        self.restart = restart

    @property
    def label(self) -> str:
        return f"gmres(restart={self.restart})" if self.restart else "gmres"

    def advance(
        self, system: PolicyLinearSystem, theta: ValueVector, phi: ValueVector
    ) -> ValueVector:
        return MinRes().advance(system, theta, phi)

    def solve(
        self,
        system: PolicyLinearSystem,
        theta0: ArrayLike,
        rule: StoppingRule,
        on_iterate: Optional[IterateCallback] = None,
    ) -> Tuple[ValueVector, InnerTrace]:
        theta = check_dimensions(system, theta0)
        phi = system.residual(theta)
        trace = InnerTrace(method=self.label)
        residual_inf = trace.record(phi)
        if on_iterate is not None:
            on_iterate(theta)
        done = rule.is_met(residual_inf)
        while not done and trace.iterations_used < rule.max_inner_iters:
            budget = rule.max_inner_iters - trace.iterations_used
            steps = min(self.restart or budget, budget)
            start = trace.iterations_used
            theta, phi, done = _cycle(
                system, theta, phi, rule, steps, trace, on_iterate
            )
            if trace.iterations_used == start:
                break
        trace.converged = rule.is_met(trace.final_residual_inf)
        if not trace.converged:
            logger.warning(
                "GMRES 未在上限内满足停止条件",
                extra={
                    "solver": self.label,
                    "inner_iters": trace.iterations_used,
                    "residual_inf": trace.final_residual_inf,
                    "threshold": rule.threshold,
                },
            )
        return theta, trace


def gmres(
    system: PolicyLinearSystem,
    theta0: ArrayLike,
    rule: StoppingRule,
    restart: Optional[int] = None,
) -> Tuple[ValueVector, InnerTrace]:
    """运行 GMRES 直到满足停止条件、发生 breakdown 或达到迭代上限"""
    return Gmres(restart).solve(system, theta0, rule)


__all__ = ["gmres", "Gmres", "BREAKDOWN_TOL"]
