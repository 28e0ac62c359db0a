"""
Bellman 算子与精确策略评估
==========================

- apply_T_pi: T_π V = g^π + γP^π V
- apply_T: TV 与贪心策略，平局取最小动作索引；可按状态分块并行，结果与分块方式无关
- bellman_residual: r(V) = V - TV
- extract_policy_system: 按行收集 P^π 与 g^π
- exact_policy_evaluation: 稀疏 LU (小规模时稠密求解) 求 V^π
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Tuple

import numpy as np
import scipy.linalg
import scipy.sparse.linalg as spla
from numpy.typing import ArrayLike, NDArray

from ipi.core.exceptions import FactorizationFailure, InvalidParameter
from ipi.mdp.model import (
    MdpModel,
    Policy,
    PolicyLinearSystem,
    ValueVector,
    as_policy,
    as_value_vector,
)

logger = logging.getLogger(__name__)

DENSE_FALLBACK_BELOW = 64
EVALUATION_RESIDUAL_TOL = 1e-10
# 少于该状态数时不值得切分线程
_MIN_STATES_PER_WORKER = 256


def extract_policy_system(model: MdpModel, policy: ArrayLike) -> PolicyLinearSystem:
    """构建策略 π 的线性系统：P^π 第 i 行取自 P_{π(i)} 的第 i 行，g^π[i] = g(i, π(i))"""
    actions = as_policy(policy, model)
    states = np.arange(model.n)
    p_pi = model.stacked[actions * model.n + states]
    g_pi = model.costs[states, actions].copy()
    g_pi.setflags(write=False)
    return PolicyLinearSystem(p_pi=p_pi, g_pi=g_pi, gamma=model.gamma)


def apply_T_pi(model: MdpModel, policy: ArrayLike, V: ArrayLike) -> ValueVector:
    """T_π V = g^π + γP^π V (稀疏矩阵-向量乘积)"""
    values = as_value_vector(V, model.n)
    return extract_policy_system(model, policy).bellman(values)


def _q_block(model: MdpModel, V: ValueVector, start: int, stop: int) -> NDArray[np.float64]:
    """状态 [start, stop) 上的 Q(i, a) = g(i, a) + γ Σ_j P(i, a, j) V(j)"""
    if start == 0 and stop == model.n:
        products = [P @ V for P in model.transitions]
    else:
        # CSR 行切片保留每行元素顺序，逐行求和顺序与整体乘积一致
        products = [P[start:stop] @ V for P in model.transitions]
    return model.costs[start:stop] + model.gamma * np.column_stack(products)


def _partition(n: int, workers: int) -> List[Tuple[int, int]]:
    chunks = max(1, min(workers, n // _MIN_STATES_PER_WORKER))
    bounds = np.linspace(0, n, chunks + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:])]


def apply_T(model: MdpModel, V: ArrayLike, workers: int = 1) -> Tuple[ValueVector, Policy]:
    """
    应用 Bellman 最优算子

    Args:
        model: MDP 模型
        V: 长度 n 的值向量
        workers: 按状态分块的线程数，输出与分块方式逐位一致

    Returns:
        (TV, 贪心策略)，平局时取最小动作索引
    """
    values = as_value_vector(V, model.n)
    if workers < 1:
        raise InvalidParameter(f"workers 必须 ≥ 1，收到 {workers}")
    blocks = _partition(model.n, workers)
    if len(blocks) == 1:
        q = _q_block(model, values, 0, model.n)
    else:
        with ThreadPoolExecutor(max_workers=len(blocks)) as pool:
            parts = list(pool.map(lambda b: _q_block(model, values, *b), blocks))
        q = np.vstack(parts)
    policy = np.argmin(q, axis=1).astype(np.intp)
    return q[np.arange(model.n), policy], policy


def bellman_residual(model: MdpModel, V: ArrayLike, workers: int = 1) -> ValueVector:
    """r(V) = V - TV"""
    values = as_value_vector(V, model.n)
    TV, _ = apply_T(model, values, workers=workers)
    return values - TV


def _max_residual(system: PolicyLinearSystem, x: ValueVector) -> float:
    return float(np.max(np.abs(system.residual(x)))) if system.n else 0.0


def solve_policy_system(
    system: PolicyLinearSystem, dense_fallback_below: int = DENSE_FALLBACK_BELOW
) -> ValueVector:
    """
    直接法求解 (I - γP^π)V = g^π

    n < dense_fallback_below 时使用稠密 LU，否则使用稀疏 LU (splu)。
    残差不满足 ‖g^π - (I - γP^π)V‖∞ ≤ 1e-10·max(1, ‖g^π‖∞) 时做一步迭代精化，
    仍不满足则抛出 FactorizationFailure。
    """
    A = system.coefficient_matrix
    try:
        if system.n < dense_fallback_below:
            lu = scipy.linalg.lu_factor(A.toarray(), check_finite=True)

            def solve(rhs: ValueVector) -> ValueVector:
                return scipy.linalg.lu_solve(lu, rhs)
        else:
            factor = spla.splu(A.tocsc())
            solve = factor.solve
        x = solve(np.asarray(system.g_pi, dtype=np.float64))
        tol = EVALUATION_RESIDUAL_TOL * max(1.0, float(np.max(np.abs(system.g_pi))))
        if not np.all(np.isfinite(x)):
            raise FactorizationFailure("策略评估得到非有限解")
        if _max_residual(system, x) > tol:
            logger.debug("策略评估残差超限，执行一步迭代精化")
            x = x + solve(system.residual(x))
            if _max_residual(system, x) > tol:
                raise FactorizationFailure(
                    f"策略评估残差 {_max_residual(system, x):.3e} 超过 {tol:.3e}"
                )
    except (RuntimeError, ValueError, np.linalg.LinAlgError, scipy.linalg.LinAlgError) as e:
        raise FactorizationFailure(f"策略评估分解失败: {e}") from e
    return x


def exact_policy_evaluation(
    model: MdpModel, policy: ArrayLike, dense_fallback_below: int = DENSE_FALLBACK_BELOW
) -> ValueVector:
    """精确策略评估，返回 V^π"""
    return solve_policy_system(extract_policy_system(model, policy), dense_fallback_below)


__all__ = [
    "extract_policy_system",
    "apply_T_pi",
    "apply_T",
    "bellman_residual",
    "solve_policy_system",
    "exact_policy_evaluation",
    "DENSE_FALLBACK_BELOW",
]
