"""
穷举策略的最优解预言机
======================

枚举全部 m^n 个确定性平稳策略并逐一精确评估，仅用于小规模实例的测试与校验。
"""

import itertools
import logging
from typing import Tuple

import numpy as np

from ipi.core.exceptions import OracleInconsistency, TooLarge
from ipi.mdp.bellman import exact_policy_evaluation
from ipi.mdp.model import MdpModel, Policy, ValueVector

logger = logging.getLogger(__name__)

MAX_ENUMERATED_POLICIES = 1_000_000
# 判定某策略达到逐元素最小值时的相对容差
_ATTAIN_TOL = 1e-9


def brute_force_optimal(model: MdpModel) -> Tuple[ValueVector, Policy]:
    """
    返回逐元素最小的代价向量 V* 与一个达到它的策略

    Raises:
        TooLarge: m^n 超过 MAX_ENUMERATED_POLICIES
        OracleInconsistency: 没有单个策略同时在所有状态上取到最小值
    """
    if model.m**model.n > MAX_ENUMERATED_POLICIES:
        raise TooLarge(
            f"策略数 {model.m}^{model.n} 超过穷举上限 {MAX_ENUMERATED_POLICIES}"
        )
    policies = [
        np.array(p, dtype=np.intp) for p in itertools.product(range(model.m), repeat=model.n)
    ]
    dense_below = model.n + 1
    values = np.array([exact_policy_evaluation(model, p, dense_below) for p in policies])
    best = values.min(axis=0)

    scale = max(1.0, float(np.max(np.abs(best))))
    gaps = np.max(values - best, axis=1)
    winner = int(np.argmin(gaps))
    if gaps[winner] > _ATTAIN_TOL * scale:
        raise OracleInconsistency(
            f"没有策略在所有状态上同时取到最小值 (最小偏差 {gaps[winner]:.3e})"
        )
    logger.debug(
        "穷举完成", extra={"policies_checked": len(policies), "n": model.n, "m": model.m}
    )
    return best, policies[winner]


__all__ = ["brute_force_optimal", "MAX_ENUMERATED_POLICIES"]
