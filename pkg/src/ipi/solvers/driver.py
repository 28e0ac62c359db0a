"""
内层求解驱动
============

按 InnerMethod 从注册中心实例化求解器，并运行到满足 α 相对残差停止条件。
"""

import math
from typing import Optional, Tuple, Union

from numpy.typing import ArrayLike

from ipi.core.exceptions import InvalidParameter
from ipi.mdp.model import PolicyLinearSystem, ValueVector
from ipi.solvers.interface import (
    InnerMethod,
    InnerSolver,
    InnerTrace,
    IterateCallback,
    StoppingRule,
    inner_solvers,
)


def create_inner_solver(method: InnerMethod) -> InnerSolver:
    """根据方法描述构造求解器实例"""
    cls = inner_solvers.get(method.kind)
    if method.kind == "richardson":
        return cls(nu=method.nu)  # type: ignore[call-arg]
    if method.kind == "sor":
        return cls(omega=method.omega)  # type: ignore[call-arg]
    if method.kind == "gmres":
        return cls(restart=method.restart)  # type: ignore[call-arg]
    return cls()


def solve_to_tolerance(
    system: PolicyLinearSystem,
    theta0: ArrayLike,
    method: Union[InnerMethod, InnerSolver],
    rule: StoppingRule,
    on_iterate: Optional[IterateCallback] = None,
) -> Tuple[ValueVector, InnerTrace]:
    """
    运行内层求解器直到 ‖Φ^π(θ_i)‖∞ ≤ α·reference_residual_inf 或达到上限

    未收敛不抛异常，由 trace.converged 标记。
    """
    solver = method if isinstance(method, InnerSolver) else create_inner_solver(method)
    return solver.solve(system, theta0, rule, on_iterate)


def stopping_iteration_bound(z: float, alpha: float, c_star: float, gamma: float) -> int:
    """
    z-收缩内层求解器满足停止条件所需迭代次数的上界

    ⌈log_z(α/C*·(1-γ)/(1+γ))⌉，C* 为求解器的范数等价常数 (≥ 1)。
    """
    if not 0.0 < z < 1.0:
        raise InvalidParameter(f"收缩因子 z 必须位于 (0, 1) 内，收到 {z}")
    if not 0.0 < alpha < 1.0:
        raise InvalidParameter(f"α 必须位于 (0, 1) 内，收到 {alpha}")
    if c_star < 1.0:
        raise InvalidParameter(f"C* 必须 ≥ 1，收到 {c_star}")
    if not 0.0 < gamma < 1.0:
        raise InvalidParameter(f"γ 必须位于 (0, 1) 内，收到 {gamma}")
    target = alpha / c_star * (1.0 - gamma) / (1.0 + gamma)
    return max(0, math.ceil(math.log(target) / math.log(z)))


__all__ = ["create_inner_solver", "solve_to_tolerance", "stopping_iteration_bound"]
