"""
精确线搜索的梯度类方法
======================

二者都以最小化 ½‖Φ^π(θ)‖₂² 为目标：
- 最速下降：沿 -∇ = Aᵀ Φ^π(θ) 方向做精确线搜索
- 最小残差：沿残差方向 Φ^π(θ) 做精确线搜索；步长取常数时退化为 Richardson(ν = 1/η)
"""

import numpy as np
from numpy.typing import ArrayLike

from ipi.mdp.model import PolicyLinearSystem, ValueVector
from ipi.solvers.interface import LINE_SEARCH_FLOOR, InnerSolver, inner_solver


def steepest_descent_step(system: PolicyLinearSystem, theta: ArrayLike) -> ValueVector:
    """θ + η·AᵀΦ，η = ⟨Φ, AAᵀΦ⟩ / ‖AAᵀΦ‖₂²"""
    return SteepestDescent().step(system, theta)


def minres_step(system: PolicyLinearSystem, theta: ArrayLike) -> ValueVector:
    """θ + η·Φ，η = ⟨AΦ, Φ⟩ / ‖AΦ‖₂²"""
    return MinRes().step(system, theta)


@inner_solver("sd")
class SteepestDescent(InnerSolver):
    def advance(
        self, system: PolicyLinearSystem, theta: ValueVector, phi: ValueVector
    ) -> ValueVector:
        if not np.any(phi):
            return theta.copy()
        direction = system.rmatvec(phi)
        image = system.matvec(direction)
        denom = float(image @ image)
        if denom < LINE_SEARCH_FLOOR:
            return theta.copy()
        eta = float(phi @ image) / denom
        return theta + eta * direction


@inner_solver("minres")
class MinRes(InnerSolver):
    def advance(
        self, system: PolicyLinearSystem, theta: ValueVector, phi: ValueVector
    ) -> ValueVector:
        if not np.any(phi):
            return theta.copy()
        image = system.matvec(phi)
        denom = float(image @ image)
        if denom < LINE_SEARCH_FLOOR:
            return theta.copy()
        eta = float(image @ phi) / denom
        return theta + eta * phi


__all__ = ["steepest_descent_step", "minres_step", "SteepestDescent", "MinRes"]
