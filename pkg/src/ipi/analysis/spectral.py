"""
谱分析工具
==========

基于稠密特征值分解的判据，适用于 n 不超过数千的矩阵：
- richardson_nu_interval: Richardson 加速区间下界 ν̲
- symmetric_part_analysis: H = I - γP_s 的最小特征值与正定阈值 1/λ_max(P_s)
- peripheral_eigenvalue_count: 谱半径圆周上的特征值个数，与图周期互相印证
- minimal_polynomial_degree: 数值最小多项式次数 (Arnoldi 断裂)，GMRES 有限步终止的预言机
"""

from typing import NamedTuple, Optional

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, NDArray

from ipi.core.exceptions import DimensionMismatch, EigensolveFailure, InvalidParameter, TooLarge

MAX_ORACLE_DIMENSION = 64


class SymmetricPartAnalysis(NamedTuple):
    lambda_min_h: float
    positive_definite: bool
    gamma_threshold: float


def _square(M: ArrayLike) -> NDArray[np.float64]:
    matrix = M.toarray() if hasattr(M, "toarray") else np.asarray(M)
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionMismatch(f"需要方阵，收到形状 {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise EigensolveFailure("矩阵含有非有限值")
    return matrix


def _check_gamma(gamma: float) -> None:
    if not 0.0 < gamma < 1.0:
        raise InvalidParameter(f"折扣因子必须位于 (0, 1) 内，收到 {gamma}")


def _eigvals(matrix: NDArray[np.float64]) -> NDArray[np.complex128]:
    try:
        return scipy.linalg.eigvals(matrix)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError, ValueError) as e:
        raise EigensolveFailure(f"特征值分解失败: {e}") from e


def _eigvalsh(matrix: NDArray[np.float64]) -> NDArray[np.float64]:
    try:
        return scipy.linalg.eigvalsh(matrix)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError, ValueError) as e:
        raise EigensolveFailure(f"对称特征值分解失败: {e}") from e


def spectral_radius(M: ArrayLike) -> float:
    """ρ(M) = max |λ|"""
    return float(np.max(np.abs(_eigvals(_square(M)))))


def peripheral_eigenvalue_count(M: ArrayLike, modulus_tol: float = 1e-8) -> int:
    """
    模长与 ρ(M) 相差不超过 modulus_tol·max(1, ρ) 的特征值个数

    对不可约的随机矩阵，该数等于周期 (单位圆上的特征值恰为 h 次单位根)。
    """
    if not modulus_tol > 0:
        raise InvalidParameter(f"模长容差必须 > 0，收到 {modulus_tol}")
    moduli = np.abs(_eigvals(_square(M)))
    radius = float(np.max(moduli))
    return int(np.sum(radius - moduli <= modulus_tol * max(1.0, radius)))


def richardson_iteration_radius(P: ArrayLike, gamma: float, nu: float) -> float:
    """Richardson 迭代矩阵 I - (1/ν)(I - γP) 的谱半径"""
    if not nu > 0:
        raise InvalidParameter(f"Richardson 参数 ν 必须 > 0，收到 {nu}")
    matrix = _square(P)
    identity = np.eye(matrix.shape[0])
    return spectral_radius(identity - (identity - gamma * matrix) / nu)


def richardson_nu_interval(P_pi: ArrayLike, gamma: float) -> float:
    """
    ν̲ = max_{λ∈Λ(P)} [(1 - γRe λ) - γ√((γ² - 1)Im²λ + (1 - γRe λ)²)] / (1 - γ²)

    对任意 ν ∈ (ν̲, 1)，Richardson 迭代矩阵的谱半径小于 γ。
    """
    _check_gamma(gamma)
    eigenvalues = _eigvals(_square(P_pi))
    shifted = 1.0 - gamma * eigenvalues.real
    radicand = (gamma**2 - 1.0) * eigenvalues.imag**2 + shifted**2
    bounds = (shifted - gamma * np.sqrt(np.clip(radicand, 0.0, None))) / (1.0 - gamma**2)
    return float(np.max(bounds))


def symmetric_part_analysis(P_pi: ArrayLike, gamma: float) -> SymmetricPartAnalysis:
    """
    分析 H = I - γP_s，P_s = (P + Pᵀ)/2

    Returns:
        (λ_min(H), λ_min(H) > 0, 1/λ_max(P_s))
    """
    _check_gamma(gamma)
    P = _square(P_pi)
    symmetric = 0.5 * (P + P.T)
    lambda_max_ps = float(np.max(_eigvalsh(symmetric)))
    if lambda_max_ps <= 0.0:
        raise EigensolveFailure(f"λ_max(P_s) = {lambda_max_ps} 非正，输入不是行随机矩阵")
    lambda_min_h = float(np.min(_eigvalsh(np.eye(P.shape[0]) - gamma * symmetric)))
    return SymmetricPartAnalysis(
        lambda_min_h=lambda_min_h,
        positive_definite=lambda_min_h > 0.0,
        gamma_threshold=1.0 / lambda_max_ps,
    )


def minimal_polynomial_degree(
    A: ArrayLike,
    trials: int = 3,
    rank_tol: float = 1e-12,
    seed: Optional[int] = 0,
) -> int:
    """
    数值最小多项式次数

    对若干随机向量 v 做 Arnoldi (修正 Gram-Schmidt)，A q_k 在已有基上的剩余分量
    相对 ‖A q_k‖ 低于 rank_tol 时 Krylov 矩阵 [v, Av, …, A^k v] 视为秩亏，次数取 k + 1；
    返回各次试验的最大值。
    """
    matrix = _square(A)
    n = matrix.shape[0]
    if n > MAX_ORACLE_DIMENSION:
        raise TooLarge(f"最小多项式预言机仅支持 n ≤ {MAX_ORACLE_DIMENSION}，收到 n={n}")
    rng = np.random.default_rng(seed)
    degree = 0
    for _ in range(trials):
        v = rng.standard_normal(n)
        basis = [v / np.linalg.norm(v)]
        found = n
        for k in range(n):
            w = matrix @ basis[k]
            scale = float(np.linalg.norm(w))
            for q in basis:
                w -= (q @ w) * q
            remainder = float(np.linalg.norm(w))
            if scale == 0.0 or remainder <= rank_tol * scale:
                found = k + 1
                break
            basis.append(w / remainder)
        degree = max(degree, found)
    return degree


__all__ = [
    "SymmetricPartAnalysis",
    "spectral_radius",
    "peripheral_eigenvalue_count",
    "richardson_iteration_radius",
    "richardson_nu_interval",
    "symmetric_part_analysis",
    "minimal_polynomial_degree",
    "MAX_ORACLE_DIMENSION",
]
