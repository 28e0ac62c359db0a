"""
MDP 模型与策略线性系统
======================

本模块定义有限折扣 MDP 的不可变表示：
- MdpModel: 每个动作一个 CSR 稀疏行随机矩阵、n×m 的稠密代价表、折扣因子
- PolicyLinearSystem: 固定策略下的 (I - γP^π)θ = g^π，以 P^π 与 g^π 隐式存储
- build_model / model_from_dense: 从三元组或稠密数组构建并校验模型

值向量与策略直接用 numpy 数组表示，由 as_value_vector / as_policy 校验。
"""

from dataclasses import dataclass, replace
from functools import cached_property
from typing import Any, Iterable, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp
from numpy.typing import ArrayLike, NDArray

from ipi.core.exceptions import (
    DimensionMismatch,
    DuplicateTransition,
    GammaOutOfRange,
    IndexOutOfRange,
    InvalidParameter,
    ModelValidationError,
    NegativeProbability,
    RowSumError,
)

ValueVector = NDArray[np.float64]
Policy = NDArray[np.intp]
MatrixLike = Union[sp.spmatrix, sp.sparray, ArrayLike]

# 输入校验容差，不做静默归一化
ROW_SUM_TOL = 1e-9


def _freeze(array: NDArray[Any]) -> NDArray[Any]:
    array.setflags(write=False)
    return array


def _check_gamma(gamma: float) -> float:
    try:
        gamma = float(gamma)
    except (TypeError, ValueError) as e:
        raise GammaOutOfRange(f"折扣因子必须为实数，收到 {gamma!r}") from e
    if not 0.0 < gamma < 1.0:
        raise GammaOutOfRange(f"折扣因子必须位于 (0, 1) 内，收到 {gamma}")
    return gamma


def _validated_csr(matrix: MatrixLike, n: int, action: int) -> sp.csr_matrix:
    csr = sp.csr_matrix(matrix, dtype=np.float64, copy=True)
    if csr.shape != (n, n):
        raise DimensionMismatch(f"动作 {action} 的转移矩阵形状为 {csr.shape}，应为 {(n, n)}")
    csr.sum_duplicates()
    csr.sort_indices()
    if csr.nnz and not np.all(np.isfinite(csr.data)):
        raise ModelValidationError(f"动作 {action} 的转移矩阵含有非有限值")
    if csr.nnz and csr.data.min() < 0.0:
        row = int(np.searchsorted(csr.indptr, int(np.argmin(csr.data)), side="right") - 1)
        raise NegativeProbability(f"动作 {action} 第 {row} 行含有负概率")
    csr.eliminate_zeros()
    row_sums = np.asarray(csr.sum(axis=1)).ravel()
    deviation = np.abs(row_sums - 1.0)
    if np.any(deviation > ROW_SUM_TOL):
        row = int(np.argmax(deviation))
        raise RowSumError(
            f"动作 {action} 第 {row} 行概率和为 {row_sums[row]:.12g}，偏离 1 超过 {ROW_SUM_TOL}"
        )
    for array in (csr.data, csr.indices, csr.indptr):
        _freeze(array)
    return csr


@dataclass(frozen=True, eq=False)
class MdpModel:
    """
    不可变的有限折扣 MDP

    transitions[a][i, j] = P(i, a, j)，costs[i, a] = g(i, a)，
    cost_bound = max |g(i, a)|。构造完成后所有底层数组只读，可在线程间共享。
    """

    n: int
    m: int
    gamma: float
    transitions: Tuple[sp.csr_matrix, ...]
    costs: NDArray[np.float64]
    cost_bound: float

    @classmethod
    def from_matrices(
        cls,
        transitions: Sequence[MatrixLike],
        costs: ArrayLike,
        gamma: float,
    ) -> "MdpModel":
        """从每个动作的转移矩阵与 n×m 代价表构建并校验模型"""
        gamma = _check_gamma(gamma)
        cost_table = np.array(costs, dtype=np.float64)
        if cost_table.ndim != 2:
            raise DimensionMismatch(f"代价表必须是二维 n×m 数组，收到 ndim={cost_table.ndim}")
        n, m = cost_table.shape
        if n < 1 or m < 1:
            raise ModelValidationError(f"状态数与动作数必须 ≥ 1，收到 n={n}, m={m}")
        if len(transitions) != m:
            raise DimensionMismatch(f"需要 {m} 个转移矩阵，收到 {len(transitions)} 个")
        if not np.all(np.isfinite(cost_table)):
            raise ModelValidationError("代价表含有非有限值")
        matrices = tuple(_validated_csr(P, n, a) for a, P in enumerate(transitions))
        return cls(
            n=n,
            m=m,
            gamma=gamma,
            transitions=matrices,
            costs=_freeze(cost_table),
            cost_bound=float(np.abs(cost_table).max()),
        )

    @cached_property
    def stacked(self) -> sp.csr_matrix:
        """按动作纵向堆叠的 (m·n)×n 矩阵，第 a·n + i 行即 P_a 的第 i 行"""
        stacked = sp.vstack(self.transitions, format="csr")
        for array in (stacked.data, stacked.indices, stacked.indptr):
            _freeze(array)
        return stacked

    @property
    def nnz(self) -> int:
        return sum(P.nnz for P in self.transitions)

    def with_gamma(self, gamma: float) -> "MdpModel":
        """返回转移与代价相同、折扣因子不同的新模型"""
        return replace(self, gamma=_check_gamma(gamma))

    def __repr__(self) -> str:
        return f"MdpModel(n={self.n}, m={self.m}, gamma={self.gamma}, nnz={self.nnz})"


@dataclass(frozen=True, eq=False)
class PolicyLinearSystem:
    """
    固定策略下的策略评估线性系统 (I - γP^π)θ = g^π

    系数矩阵不显式存储，矩阵-向量乘积通过 P^π 完成；
    Jacobi / SOR 需要的对角与三角部分按需缓存。
    """

    p_pi: sp.csr_matrix
    g_pi: NDArray[np.float64]
    gamma: float

    @property
    def n(self) -> int:
        return int(self.g_pi.shape[0])

    def matvec(self, x: ValueVector) -> ValueVector:
        """A x，其中 A = I - γP^π"""
        return x - self.gamma * (self.p_pi @ x)

    def rmatvec(self, x: ValueVector) -> ValueVector:
        """Aᵀ x"""
        return x - self.gamma * (self.p_pi_t @ x)

    def bellman(self, theta: ValueVector) -> ValueVector:
        """T_π θ = g^π + γP^π θ"""
        return self.g_pi + self.gamma * (self.p_pi @ theta)

    def residual(self, theta: ValueVector) -> ValueVector:
        """Φ^π(θ) = g^π - θ + γP^π θ"""
        return self.g_pi - theta + self.gamma * (self.p_pi @ theta)

    @cached_property
    def p_pi_t(self) -> sp.csr_matrix:
        return self.p_pi.T.tocsr()

    @cached_property
    def diagonal(self) -> NDArray[np.float64]:
        """diag(I - γP^π)，每个元素 ≥ 1 - γ > 0"""
        return 1.0 - self.gamma * self.p_pi.diagonal()

    @cached_property
    def coefficient_matrix(self) -> sp.csr_matrix:
        identity = sp.identity(self.n, dtype=np.float64, format="csr")
        return (identity - self.gamma * self.p_pi).tocsr()

    @cached_property
    def strict_lower(self) -> sp.csr_matrix:
        return sp.tril(self.coefficient_matrix, k=-1, format="csr")

    @cached_property
    def strict_upper(self) -> sp.csr_matrix:
        return sp.triu(self.coefficient_matrix, k=1, format="csr")


def as_value_vector(V: ArrayLike, n: int) -> ValueVector:
    """校验并转换为长度 n 的有限实数向量"""
    values = np.asarray(V, dtype=np.float64)
    if values.ndim != 1 or values.shape[0] != n:
        raise DimensionMismatch(f"值向量形状为 {values.shape}，应为 ({n},)")
    if not np.all(np.isfinite(values)):
        raise InvalidParameter("值向量含有非有限值")
    return values


def as_policy(policy: ArrayLike, model: MdpModel) -> Policy:
    """校验并转换为长度 n、取值于 [0, m) 的确定性策略"""
    actions = np.asarray(policy)
    if actions.ndim != 1 or actions.shape[0] != model.n:
        raise DimensionMismatch(f"策略形状为 {actions.shape}，应为 ({model.n},)")
    if actions.size and not np.all(np.equal(np.mod(actions, 1), 0)):
        raise IndexOutOfRange("策略中的动作索引必须为整数")
    actions = actions.astype(np.intp)
    if actions.size and (actions.min() < 0 or actions.max() >= model.m):
        raise IndexOutOfRange(f"策略中的动作索引必须位于 [0, {model.m}) 内")
    return actions


def build_model(
    n: int,
    m: int,
    gamma: float,
    transition_triplets: Iterable[Sequence[float]],
    cost_table: ArrayLike,
) -> MdpModel:
    """
    从 (state, action, next_state, prob) 四元组构建模型

    Args:
        n: 状态数
        m: 动作数
        gamma: 折扣因子，须位于 (0, 1)
        transition_triplets: 任意顺序的 (i, a, j, p)，同一动作内 (i, j) 不可重复
        cost_table: n×m 代价表

    Returns:
        校验通过的不可变模型，cost_bound = max |g(i, a)|
    """
    _check_gamma(gamma)
    try:
        counts_valid = int(n) == n and int(m) == m and n >= 1 and m >= 1
    except (TypeError, ValueError):
        counts_valid = False
    if not counts_valid:
        raise ModelValidationError(f"状态数与动作数必须为正整数，收到 n={n!r}, m={m!r}")
    n, m = int(n), int(m)
    try:
        costs = np.asarray(cost_table, dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise ModelValidationError(f"代价表必须为实数矩阵: {e}") from e
    if costs.shape != (n, m):
        raise DimensionMismatch(f"代价表形状为 {costs.shape}，应为 {(n, m)}")

    try:
        entries = np.asarray(list(transition_triplets), dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise ModelValidationError(f"转移四元组必须由实数组成: {e}") from e
    if entries.size == 0:
        entries = entries.reshape(0, 4)
    elif entries.ndim != 2 or entries.shape[1] != 4:
        raise ModelValidationError(f"转移四元组数组形状应为 (k, 4)，收到 {entries.shape}")
    index_cols = entries[:, :3]
    if not np.all(np.equal(np.mod(index_cols, 1), 0)):
        raise IndexOutOfRange("状态与动作索引必须为整数")
    if len(entries):
        states, actions, targets = index_cols.astype(np.int64).T
    else:
        states = actions = targets = np.empty(0, dtype=np.int64)
    probs = entries[:, 3]
    if np.any((states < 0) | (states >= n) | (targets < 0) | (targets >= n)):
        raise IndexOutOfRange(f"状态索引必须位于 [0, {n}) 内")
    if np.any((actions < 0) | (actions >= m)):
        raise IndexOutOfRange(f"动作索引必须位于 [0, {m}) 内")
    if np.any(probs < 0):
        raise NegativeProbability("转移概率不能为负")

    matrices = []
    for a in range(m):
        mask = actions == a
        rows, cols = states[mask], targets[mask]
        linear = rows * n + cols
        unique, counts = np.unique(linear, return_counts=True)
        if np.any(counts > 1):
            dup = int(unique[np.argmax(counts > 1)])
            raise DuplicateTransition(f"动作 {a} 中 (i, j) = ({dup // n}, {dup % n}) 重复出现")
        matrices.append(sp.csr_matrix((probs[mask], (rows, cols)), shape=(n, n)))
    return MdpModel.from_matrices(matrices, costs, gamma)


def model_from_dense(P: ArrayLike, g: ArrayLike, gamma: float) -> MdpModel:
    """从形状为 (m, n, n) 的稠密转移张量与 n×m 代价表构建模型"""
    tensor = np.asarray(P, dtype=np.float64)
    if tensor.ndim != 3 or tensor.shape[1] != tensor.shape[2]:
        raise DimensionMismatch(f"转移张量形状应为 (m, n, n)，收到 {tensor.shape}")
    return MdpModel.from_matrices([sp.csr_matrix(P_a) for P_a in tensor], g, gamma)


__all__ = [
    "MdpModel",
    "PolicyLinearSystem",
    "ValueVector",
    "Policy",
    "ROW_SUM_TOL",
    "as_value_vector",
    "as_policy",
    "build_model",
    "model_from_dense",
]
