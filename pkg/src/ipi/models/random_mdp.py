"""
随机 MDP 生成器
===============

每个 (状态, 动作) 均匀抽取 round(density·n) 个互不相同的后继状态，
权重取自参数全为 1 的对称 Dirichlet 分布；代价服从 [0, 1) 上的均匀分布。

ensure_regular 为真时，在每个对角元和一条随机 Hamiltonian 回路的每条边上加 ε = 1e-3
后按行归一化：回路对所有动作共用，保证任意策略的 P^π 不可约，对角元保证非周期。
结果完全由 seed 决定。
"""

import logging
from typing import Any

import numpy as np
import scipy.sparse as sp
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ipi.core.exceptions import InvalidSpec
from ipi.mdp.model import MdpModel

logger = logging.getLogger(__name__)

REGULARIZING_MASS = 1e-3


class RandomMdpSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1)
    m: int = Field(..., ge=1)
    gamma: float = Field(..., gt=0, lt=1)
    density: float = Field(1.0, gt=0, le=1)
    seed: int = Field(0, ge=0, lt=2**64)
    ensure_regular: bool = False

    @model_validator(mode="after")
    def _at_least_one_successor(self) -> "RandomMdpSpec":
        if self.density * self.n < 1:
            raise ValueError(f"density·n = {self.density * self.n:g} < 1，每行至少需要一个非零元")
        return self

    @property
    def successors(self) -> int:
        return min(self.n, max(1, int(round(self.density * self.n))))


def random_mdp_spec(**values: Any) -> RandomMdpSpec:
    """构造 RandomMdpSpec，非法时抛出 InvalidSpec"""
    try:
        return RandomMdpSpec(**values)
    except ValidationError as e:
        error = e.errors()[0]
        raise InvalidSpec(f"随机 MDP 规格非法: {error['msg']}") from e


def _action_matrix(
    spec: RandomMdpSpec, rng: np.random.Generator, cycle_next: np.ndarray | None
) -> sp.csr_matrix:
    n, k = spec.n, spec.successors
    columns = np.empty((n, k), dtype=np.int64)
    for i in range(n):
        columns[i] = rng.choice(n, size=k, replace=False)
    weights = rng.dirichlet(np.ones(k), size=n)
    rows = np.repeat(np.arange(n), k)
    cols = columns.ravel()
    data = weights.ravel()
    if cycle_next is not None:
        states = np.arange(n)
        rows = np.concatenate([rows, states, states])
        cols = np.concatenate([cols, states, cycle_next])
        data = np.concatenate([data, np.full(2 * n, REGULARIZING_MASS)])
    matrix = sp.csr_matrix((data, (rows, cols)), shape=(n, n))
    matrix.sum_duplicates()
    row_sums = np.asarray(matrix.sum(axis=1)).ravel()
    return sp.csr_matrix(sp.diags(1.0 / row_sums) @ matrix)


def generate_random_model(spec: RandomMdpSpec) -> MdpModel:
    """按规格生成随机 MDP，相同 seed 得到逐位相同的模型"""
    rng = np.random.default_rng(spec.seed)
    cycle_next = None
    if spec.ensure_regular:
        order = rng.permutation(spec.n)
        cycle_next = np.empty(spec.n, dtype=np.int64)
        cycle_next[order] = np.roll(order, -1)
    matrices = [_action_matrix(spec, rng, cycle_next) for _ in range(spec.m)]
    costs = rng.random((spec.n, spec.m))
    model = MdpModel.from_matrices(matrices, costs, spec.gamma)
    logger.info(
        "随机 MDP 已生成",
        extra={"n": model.n, "m": model.m, "gamma": model.gamma, "nnz": model.nnz, "seed": spec.seed},
    )
    return model


__all__ = ["RandomMdpSpec", "random_mdp_spec", "generate_random_model", "REGULARIZING_MASS"]
