"""
矩阵与 MDP 的结构分类
=====================

- is_irreducible: 非零元构成的有向图是否强连通
- period_and_primitivity: 图周期 (BFS 层次差的最大公约数) 即循环指数 h(A)，周期为 1 时本原
- classify_mdp: 枚举确定性策略，判定 General / Ergodic / Regular，超出上限时为 Unknown
"""

import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np
import scipy.sparse as sp
from numpy.typing import ArrayLike
from scipy.sparse.csgraph import connected_components, shortest_path

from ipi.core.exceptions import DimensionMismatch, InvalidParameter, NegativeEntry, NotIrreducible
from ipi.mdp.bellman import extract_policy_system
from ipi.mdp.model import MdpModel

logger = logging.getLogger(__name__)

MatrixInput = Union[ArrayLike, sp.spmatrix, sp.sparray]


@dataclass(frozen=True)
class MatrixClassification:
    irreducible: bool
    period: int | None
    primitive: bool


class MdpVerdict(str, Enum):
    GENERAL = "General"
    ERGODIC = "Ergodic"
    REGULAR = "Regular"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class MdpClass:
    verdict: MdpVerdict
    policies_checked: int


def _pattern(P: MatrixInput) -> sp.csr_matrix:
    """非负方阵的非零模式"""
    matrix = sp.csr_matrix(P, dtype=np.float64)
    if matrix.shape[0] != matrix.shape[1]:
        raise DimensionMismatch(f"需要方阵，收到形状 {matrix.shape}")
    if matrix.nnz and matrix.data.min() < 0.0:
        raise NegativeEntry("矩阵含有负元素")
    matrix.eliminate_zeros()
    return matrix


def _strongly_connected(graph: sp.csr_matrix) -> bool:
    if graph.shape[0] == 1:
        return graph.nnz > 0
    count, _ = connected_components(graph, directed=True, connection="strong")
    return bool(count == 1)


def _graph_period(graph: sp.csr_matrix) -> int:
    levels = shortest_path(graph, unweighted=True, indices=0)
    coo = graph.tocoo()
    diffs = levels[coo.row] + 1 - levels[coo.col]
    return int(np.gcd.reduce(np.abs(diffs).astype(np.int64)))


def is_irreducible(P: MatrixInput) -> bool:
    """非零元有向图强连通 (单个强连通分量) 时返回 True"""
    return _strongly_connected(_pattern(P))


def period_and_primitivity(P: MatrixInput) -> MatrixClassification:
    """
    计算不可约矩阵的周期

    从状态 0 做 BFS 得到层次 ℓ，周期为所有边 (u, v) 上 ℓ(u) + 1 - ℓ(v) 的最大公约数。

    Raises:
        NotIrreducible: 矩阵可约
    """
    graph = _pattern(P)
    if not _strongly_connected(graph):
        raise NotIrreducible("矩阵可约，周期无定义")
    period = _graph_period(graph)
    return MatrixClassification(irreducible=True, period=period, primitive=period == 1)


def classify_matrix(P: MatrixInput) -> MatrixClassification:
    """不可约性与周期，一次调用完成；可约时 period 为 None"""
    graph = _pattern(P)
    if not _strongly_connected(graph):
        return MatrixClassification(irreducible=False, period=None, primitive=False)
    period = _graph_period(graph)
    return MatrixClassification(irreducible=True, period=period, primitive=period == 1)


def classify_mdp(model: MdpModel, policy_enumeration_cap: int = 100_000) -> MdpClass:
    """
    按策略枚举判定 MDP 类别

    任一 P^π 可约即为 General (即使枚举被截断，反例依然成立)；
    全部不可约为 Ergodic，且全部本原为 Regular；
    m^n 超过上限且未找到反例时为 Unknown。
    """
    if policy_enumeration_cap < 1:
        raise InvalidParameter(f"策略枚举上限必须 ≥ 1，收到 {policy_enumeration_cap}")
    total = model.m**model.n
    all_primitive = True
    checked = 0
    for actions in itertools.islice(
        itertools.product(range(model.m), repeat=model.n), policy_enumeration_cap
    ):
        checked += 1
        system = extract_policy_system(model, np.array(actions, dtype=np.intp))
        classification = classify_matrix(system.p_pi)
        if not classification.irreducible:
            logger.debug("发现可约策略", extra={"policies_checked": checked})
            return MdpClass(MdpVerdict.GENERAL, checked)
        all_primitive = all_primitive and classification.primitive

    if total > policy_enumeration_cap:
        return MdpClass(MdpVerdict.UNKNOWN, checked)
    verdict = MdpVerdict.REGULAR if all_primitive else MdpVerdict.ERGODIC
    return MdpClass(verdict, checked)


__all__ = [
    "MatrixClassification",
    "MdpVerdict",
    "MdpClass",
    "is_irreducible",
    "period_and_primitivity",
    "classify_matrix",
    "classify_mdp",
]
