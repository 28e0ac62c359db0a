"""
动态 SIS 传染病 MDP
===================

状态 s ∈ {0, …, N} 为易感人数，动作 a = (a₁, a₂) 由卫生措施等级 a₁ ∈ {0..4}
与社交距离等级 a₂ ∈ {0..3} 组成，扁平索引 a = a₁·4 + a₂，共 20 个动作。

- 感染概率 q(s, a) = 1 - exp(-λ(a)β(s)ψ(a))，β(s) = (N - s)/N
- 新增感染数 I ~ Binomial(s, q)，所有已感染者康复，下一状态 s' = N - I
- 阶段代价 g(s, a) = w_f·c_f(a) - w_q·c_q(a) + w_h·c_h·(N - s)

默认参数表 (均可通过配置文件覆盖)：
c_f = 0.1·a₁ + 0.2·a₂，c_q = clip(1 - (a₁/4 + a₂/3)/2, 0, 1)，
λ = 5·(1 - 0.2·a₂)，ψ = 0.2·(1 - 0.2·a₁)，w_f = w_q = w_h = 1，c_h = 0.01。
"""

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, NamedTuple, Optional, Tuple, Union

import numpy as np
import scipy.sparse as sp
import yaml
from numpy.typing import NDArray
from pydantic import AliasChoices, BaseModel, ConfigDict, Field, ValidationError, field_validator
from scipy.special import gammaln, xlog1py, xlogy

from ipi.core.exceptions import IndexOutOfRange, InvalidParameter
from ipi.mdp.model import MdpModel

logger = logging.getLogger(__name__)

HYGIENE_LEVELS = 5
DISTANCING_LEVELS = 4
NUM_ACTIONS = HYGIENE_LEVELS * DISTANCING_LEVELS
PRUNE_BELOW = 1e-15
# 二项分布只在均值 ± WINDOW_SIGMAS 个标准差 (再加 WINDOW_PAD 个状态) 内计算
WINDOW_SIGMAS = 10.0
WINDOW_PAD = 10

Table = List[List[float]]


def _levels() -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    a1, a2 = np.meshgrid(
        np.arange(HYGIENE_LEVELS, dtype=np.float64),
        np.arange(DISTANCING_LEVELS, dtype=np.float64),
        indexing="ij",
    )
    return a1, a2


def default_financial_cost() -> Table:
    a1, a2 = _levels()
    return (0.1 * a1 + 0.2 * a2).tolist()


def default_quality_of_life() -> Table:
    a1, a2 = _levels()
    return np.clip(1.0 - (a1 / 4.0 + a2 / 3.0) / 2.0, 0.0, 1.0).tolist()


def default_contact_rate() -> Table:
    _, a2 = _levels()
    return (5.0 * (1.0 - 0.2 * a2)).tolist()


def default_infection_chance() -> Table:
    a1, _ = _levels()
    return (0.2 * (1.0 - 0.2 * a1)).tolist()


class SisParams(BaseModel):
    """SIS 模型参数，所有表格按 [a₁][a₂] 组织 (5×4)"""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    population: int = Field(..., ge=1, validation_alias=AliasChoices("population", "N"))
    gamma: float = Field(0.9, gt=0, lt=1)
    w_f: float = Field(1.0, ge=0)
    w_q: float = Field(1.0, ge=0)
    w_h: float = Field(1.0, ge=0)
    c_h_per_case: float = Field(0.01, ge=0)
    c_f: Table = Field(default_factory=default_financial_cost)
    c_q: Table = Field(default_factory=default_quality_of_life)
    lambda_table: Table = Field(default_factory=default_contact_rate)
    psi_table: Table = Field(default_factory=default_infection_chance)

    @field_validator("c_f", "c_q", "lambda_table", "psi_table")
    @classmethod
    def _check_shape(cls, table: Table) -> Table:
        shape = np.asarray(table, dtype=np.float64).shape
        if shape != (HYGIENE_LEVELS, DISTANCING_LEVELS):
            raise ValueError(f"参数表形状应为 {(HYGIENE_LEVELS, DISTANCING_LEVELS)}，收到 {shape}")
        return table

    @field_validator("c_q")
    @classmethod
    def _check_quality(cls, table: Table) -> Table:
        values = np.asarray(table)
        if np.any((values < 0) | (values > 1)):
            raise ValueError("c_q 必须位于 [0, 1] 内")
        return table

    @field_validator("lambda_table")
    @classmethod
    def _check_contact_rate(cls, table: Table) -> Table:
        if np.any(np.asarray(table) <= 0):
            raise ValueError("接触率 λ 必须 > 0")
        return table

    @field_validator("psi_table")
    @classmethod
    def _check_infection_chance(cls, table: Table) -> Table:
        values = np.asarray(table)
        if np.any((values < 0) | (values > 1)):
            raise ValueError("单次接触感染概率 ψ 必须位于 [0, 1] 内")
        return table

    @property
    def n_states(self) -> int:
        return self.population + 1

    def flat(self, name: str) -> NDArray[np.float64]:
        """按扁平动作索引排列的参数表"""
        return np.asarray(getattr(self, name), dtype=np.float64).reshape(NUM_ACTIONS)


class TransitionRow(NamedTuple):
    next_states: NDArray[np.int64]
    probabilities: NDArray[np.float64]


def sis_params(**values: Any) -> SisParams:
    """构造 SisParams，参数非法时抛出 InvalidParameter"""
    try:
        return SisParams(**values)
    except ValidationError as e:
        error = e.errors()[0]
        raise InvalidParameter(f"SIS 参数 {error['loc']} 非法: {error['msg']}") from e


def load_sis_params(path: Union[str, Path], overrides: Optional[Dict[str, Any]] = None) -> SisParams:
    """从 JSON 或 YAML 文件读取 SIS 参数"""
    source = Path(path)
    with open(source, "r", encoding="utf-8") as f:
        try:
            data = json.load(f) if source.suffix == ".json" else yaml.safe_load(f)
        except (json.JSONDecodeError, yaml.YAMLError, UnicodeDecodeError) as e:
            raise InvalidParameter(f"无法解析 SIS 参数文件 {source}: {e}") from e
    if data is not None and not isinstance(data, dict):
        raise InvalidParameter(f"SIS 参数文件 {source} 必须是映射")
    return sis_params(**{**(data or {}), **(overrides or {})})


def action_index(a1: int, a2: int) -> int:
    """(卫生等级, 距离等级) -> 扁平动作索引"""
    if not (0 <= a1 < HYGIENE_LEVELS and 0 <= a2 < DISTANCING_LEVELS):
        raise IndexOutOfRange(f"动作等级 ({a1}, {a2}) 越界")
    return a1 * DISTANCING_LEVELS + a2


def action_levels(a: int) -> Tuple[int, int]:
    """扁平动作索引 -> (卫生等级, 距离等级)"""
    if not 0 <= a < NUM_ACTIONS:
        raise IndexOutOfRange(f"动作索引必须位于 [0, {NUM_ACTIONS}) 内，收到 {a}")
    return divmod(a, DISTANCING_LEVELS)


def _check_indices(s: int, a: int, params: SisParams) -> None:
    if not 0 <= s <= params.population:
        raise IndexOutOfRange(f"状态必须位于 [0, {params.population}] 内，收到 {s}")
    if not 0 <= a < NUM_ACTIONS:
        raise IndexOutOfRange(f"动作索引必须位于 [0, {NUM_ACTIONS}) 内，收到 {a}")


def _infection_probability(s: int, a: int, params: SisParams) -> float:
    beta = (params.population - s) / params.population
    exponent = params.flat("lambda_table")[a] * beta * params.flat("psi_table")[a]
    return float(-np.expm1(-exponent))


def infection_probability(s: int, a: int, params: SisParams) -> float:
    """易感者在一个时间步内被感染的概率 q(s, a)"""
    _check_indices(s, a, params)
    return _infection_probability(s, a, params)


def _binomial_row(s: int, q: float, population: int) -> TransitionRow:
    if s == 0 or q == 0.0:
        return TransitionRow(np.array([population]), np.array([1.0]))
    if q == 1.0:
        return TransitionRow(np.array([population - s]), np.array([1.0]))
    mean = s * q
    spread = WINDOW_SIGMAS * np.sqrt(s * q * (1.0 - q)) + WINDOW_PAD
    lo = max(0, int(np.floor(mean - spread)))
    hi = min(s, int(np.ceil(mean + spread)))
    infections = np.arange(lo, hi + 1)
    log_pmf = (
        gammaln(s + 1)
        - gammaln(infections + 1)
        - gammaln(s - infections + 1)
        + xlogy(infections, q)
        + xlog1py(s - infections, -q)
    )
    pmf = np.exp(log_pmf)
    keep = pmf >= PRUNE_BELOW
    pmf = pmf[keep]
    pmf /= pmf.sum()
    # s' = N - I，按下一状态升序排列
    return TransitionRow(population - infections[keep][::-1], pmf[::-1].copy())


def transition_row(s: int, a: int, params: SisParams) -> TransitionRow:
    """
    状态 s、动作 a 下的下一状态分布

    P(s' = N - i) = C(s, i) q^i (1 - q)^{s-i}，在对数空间计算，
    低于 1e-15 的概率被剪除后重新归一化。
    """
    _check_indices(s, a, params)
    return _binomial_row(s, _infection_probability(s, a, params), params.population)


def stage_cost(s: int, a: int, params: SisParams) -> float:
    """g(s, a) = w_f·c_f(a) - w_q·c_q(a) + w_h·c_h·(N - s)"""
    _check_indices(s, a, params)
    return float(
        params.w_f * params.flat("c_f")[a]
        - params.w_q * params.flat("c_q")[a]
        + params.w_h * params.c_h_per_case * (params.population - s)
    )


def cost_table(params: SisParams) -> NDArray[np.float64]:
    """(N+1)×20 的阶段代价表"""
    infected = params.population - np.arange(params.n_states, dtype=np.float64)
    action_part = params.w_f * params.flat("c_f") - params.w_q * params.flat("c_q")
    return action_part[None, :] + params.w_h * params.c_h_per_case * infected[:, None]


def action_matrix(params: SisParams, a: int) -> sp.csr_matrix:
    """动作 a 的转移矩阵，逐行由 transition_row 组装"""
    if not 0 <= a < NUM_ACTIONS:
        raise IndexOutOfRange(f"动作索引必须位于 [0, {NUM_ACTIONS}) 内，收到 {a}")
    states = np.arange(params.n_states)
    beta = (params.population - states) / params.population
    exponent = params.flat("lambda_table")[a] * beta * params.flat("psi_table")[a]
    hazard = -np.expm1(-exponent)
    rows = [
        _binomial_row(s, float(hazard[s]), params.population) for s in range(params.n_states)
    ]
    indptr = np.zeros(params.n_states + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(row.next_states) for row in rows])
    indices = np.concatenate([row.next_states for row in rows])
    data = np.concatenate([row.probabilities for row in rows])
    return sp.csr_matrix((data, indices, indptr), shape=(params.n_states, params.n_states))


def sparsity_mask(params: SisParams, a: int) -> sp.csr_matrix:
    """P_a 的布尔非零模式"""
    return action_matrix(params, a).astype(bool)


def build_sis_mdp(params: SisParams, workers: int = 1) -> MdpModel:
    """
    组装 N+1 个状态、20 个动作的 SIS MDP

    各动作的矩阵可并行构造，结果与构造顺序无关。
    """
    if workers > 1:
        with ThreadPoolExecutor(max_workers=min(workers, NUM_ACTIONS)) as pool:
            matrices = list(pool.map(lambda a: action_matrix(params, a), range(NUM_ACTIONS)))
    else:
        matrices = [action_matrix(params, a) for a in range(NUM_ACTIONS)]
    model = MdpModel.from_matrices(matrices, cost_table(params), params.gamma)
    logger.info(
        "SIS 模型已生成",
        extra={"population": params.population, "n": model.n, "m": model.m, "nnz": model.nnz},
    )
    return model


__all__ = [
    "SisParams",
    "TransitionRow",
    "HYGIENE_LEVELS",
    "DISTANCING_LEVELS",
    "NUM_ACTIONS",
    "sis_params",
    "load_sis_params",
    "action_index",
    "action_levels",
    "infection_probability",
    "transition_row",
    "stage_cost",
    "cost_table",
    "action_matrix",
    "sparsity_mask",
    "build_sis_mdp",
]
