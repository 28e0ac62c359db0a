"""
策略评估内层求解器
==================

求解 (I - γP^π)θ = g^π 的迭代方法：
- 定常迭代：Richardson、Jacobi、Gauss-Seidel、SOR
- 精确线搜索：最速下降、最小残差
- Krylov 子空间：GMRES

所有求解器在导入本包时注册到 inner_solvers。
"""

from .descent import MinRes, SteepestDescent, minres_step, steepest_descent_step
from .driver import create_inner_solver, solve_to_tolerance, stopping_iteration_bound
from .gmres import Gmres, gmres
from .interface import (
    DEFAULT_MAX_INNER_ITERS,
    InnerMethod,
    InnerSolver,
    InnerTrace,
    IterateCallback,
    StoppingRule,
    inner_method,
    inner_solver,
    inner_solvers,
    stopping_rule,
)
from .stationary import (
    GaussSeidel,
    Jacobi,
    Richardson,
    Sor,
    gauss_seidel_sweep,
    jacobi_step,
    residual,
    richardson_contraction_number,
    richardson_step,
    sor_sweep,
)

__all__ = [
    "StoppingRule",
    "InnerMethod",
    "InnerTrace",
    "InnerSolver",
    "IterateCallback",
    "inner_method",
    "stopping_rule",
    "inner_solver",
    "inner_solvers",
    "DEFAULT_MAX_INNER_ITERS",
    "residual",
    "richardson_step",
    "jacobi_step",
    "gauss_seidel_sweep",
    "sor_sweep",
    "steepest_descent_step",
    "minres_step",
    "gmres",
    "solve_to_tolerance",
    "create_inner_solver",
    "richardson_contraction_number",
    "stopping_iteration_bound",
    "Richardson",
    "Jacobi",
    "GaussSeidel",
    "Sor",
    "SteepestDescent",
    "MinRes",
    "Gmres",
]
