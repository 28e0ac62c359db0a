"""
定常迭代法
==========

Richardson 迭代及其预条件变体 (Jacobi / Gauss-Seidel / SOR)。
ν = 1 的 Richardson 迭代即策略评估的值迭代 T_π θ。
"""

import numpy as np
import scipy.sparse as sp
from numpy.typing import ArrayLike
from scipy.sparse.linalg import spsolve_triangular

from ipi.core.exceptions import InvalidParameter
from ipi.mdp.model import PolicyLinearSystem, ValueVector
from ipi.solvers.interface import InnerSolver, check_dimensions, inner_solver


def residual(system: PolicyLinearSystem, theta: ArrayLike) -> ValueVector:
    """Φ^π(θ) = g^π - θ + γP^π θ"""
    return system.residual(check_dimensions(system, theta))


def _check_nu(nu: float) -> float:
    if not nu > 0:
        raise InvalidParameter(f"Richardson 参数 ν 必须 > 0，收到 {nu}")
    return float(nu)


def _check_omega(omega: float) -> float:
    if not 0.0 < omega < 2.0:
        raise InvalidParameter(f"松弛因子 ω 必须位于 (0, 2) 内，收到 {omega}")
    return float(omega)


def richardson_step(system: PolicyLinearSystem, theta: ArrayLike, nu: float) -> ValueVector:
    """θ + (1/ν)·Φ^π(θ)"""
    return Richardson(nu).step(system, theta)


def jacobi_step(system: PolicyLinearSystem, theta: ArrayLike) -> ValueVector:
    """θ + D⁻¹Φ^π(θ)，D = diag(I - γP^π)"""
    return Jacobi().step(system, theta)


def sor_sweep(system: PolicyLinearSystem, theta: ArrayLike, omega: float) -> ValueVector:
    """按状态索引升序做一次 SOR 扫描"""
    return Sor(omega).step(system, theta)


def gauss_seidel_sweep(system: PolicyLinearSystem, theta: ArrayLike) -> ValueVector:
    """ω = 1 的 SOR 扫描"""
    return sor_sweep(system, theta, 1.0)


def richardson_contraction_number(nu: float, gamma: float) -> float:
    """
    Richardson 迭代在无穷范数下的收缩数 h(ν, γ) = |ν - 1|/ν + γ/ν

    ν > (1 + γ)/2 时 h < 1，误差单调收敛。
    """
    nu = _check_nu(nu)
    return abs(nu - 1.0) / nu + gamma / nu


@inner_solver("richardson")
class Richardson(InnerSolver):
    def __init__(self, nu: float = 1.0):
        self.nu = _check_nu(nu)

    @property
    def label(self) -> str:
        return f"richardson(nu={self.nu:g})"

    def advance(
        self, system: PolicyLinearSystem, theta: ValueVector, phi: ValueVector
    ) -> ValueVector:
        return theta + phi / self.nu


@inner_solver("jacobi")
class Jacobi(InnerSolver):
    def advance(
        self, system: PolicyLinearSystem, theta: ValueVector, phi: ValueVector
    ) -> ValueVector:
        return theta + phi / system.diagonal


@inner_solver("sor")
class Sor(InnerSolver):
    """
    逐次超松弛

    (D + ωL)θ' = ωg^π - (ωU + (ω - 1)D)θ，其中 I - γP^π = L + D + U；
    前代求解等价于按状态索引升序逐个更新并使用已更新的分量。
    """

    def __init__(self, omega: float = 1.0):
        self.omega = _check_omega(omega)
        self._cached_for: PolicyLinearSystem | None = None
        self._lower: sp.csr_matrix | None = None
        self._upper: sp.csr_matrix | None = None

    @property
    def label(self) -> str:
        return f"sor(omega={self.omega:g})"

    def _splitting(self, system: PolicyLinearSystem) -> tuple[sp.csr_matrix, sp.csr_matrix]:
        if self._cached_for is not system or self._lower is None or self._upper is None:
            D = sp.diags(system.diagonal, format="csr")
            self._lower = (D + self.omega * system.strict_lower).tocsr()
            self._upper = (self.omega * system.strict_upper + (self.omega - 1.0) * D).tocsr()
            self._cached_for = system
        return self._lower, self._upper

    def advance(
        self, system: PolicyLinearSystem, theta: ValueVector, phi: ValueVector
    ) -> ValueVector:
        lower, upper = self._splitting(system)
        rhs = self.omega * system.g_pi - upper @ theta
        return np.asarray(spsolve_triangular(lower, rhs, lower=True), dtype=np.float64)


@inner_solver("gs")
class GaussSeidel(Sor):
    def __init__(self) -> None:
        super().__init__(omega=1.0)

    @property
    def label(self) -> str:
        return "gs"


__all__ = [
    "residual",
    "richardson_step",
    "jacobi_step",
    "sor_sweep",
    "gauss_seidel_sweep",
    "richardson_contraction_number",
    "Richardson",
    "Jacobi",
    "Sor",
    "GaussSeidel",
]
