"""
外层求解配置
============

OuterConfig 汇集外层终止条件、iPI 的强制参数 α 与内层方法、OPI 的内层扫描次数 w。
强制序列默认恒为 α；也可以按几何速率衰减 α_k = max(α·ρ^k, α_min)，
或由调用方传入任意 k -> α_k 的函数。
"""

from typing import Callable, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ipi.core.exceptions import InvalidParameter
from ipi.solvers.interface import DEFAULT_MAX_INNER_ITERS, InnerMethod

ForcingSchedule = Callable[[int], float]


class OuterConfig(BaseModel):
    """外层求解器参数"""

    model_config = ConfigDict(frozen=True)

    tol: float = Field(1e-8, gt=0)
    max_outer_iters: int = Field(10_000, ge=1)
    time_budget_s: Optional[float] = Field(500.0, gt=0)
    alpha: float = Field(0.1, gt=0, lt=1)
    inner_method: InnerMethod = Field(default_factory=lambda: InnerMethod(kind="gmres"))
    opi_w: int = Field(5, ge=1)
    max_inner_iters: int = Field(DEFAULT_MAX_INNER_ITERS, ge=1)
    forcing: Literal["constant", "geometric"] = "constant"
    forcing_decay: float = Field(0.5, gt=0, lt=1)
    forcing_min: float = Field(1e-12, gt=0, lt=1)
    workers: int = Field(1, ge=1)
    dense_fallback_below: int = Field(64, ge=0)

    def forcing_term(self, k: int) -> float:
        """第 k 次外层迭代 (从 0 开始) 使用的 α_k"""
        if self.forcing == "geometric":
            return max(self.alpha * self.forcing_decay**k, self.forcing_min)
        return self.alpha


def outer_config(**params: object) -> OuterConfig:
    """构造 OuterConfig，参数非法时抛出 InvalidParameter"""
    try:
        return OuterConfig(**params)  # type: ignore[arg-type]
    except ValidationError as e:
        error = e.errors()[0]
        field = ".".join(str(part) for part in error["loc"])
        raise InvalidParameter(f"外层求解参数 {field} 非法: {error['msg']}") from e


def resolve_forcing(config: OuterConfig, forcing: Optional[ForcingSchedule]) -> ForcingSchedule:
    """调用方传入的强制序列优先，否则使用配置中的序列"""
    if forcing is None:
        return config.forcing_term

    def checked(k: int) -> float:
        alpha_k = float(forcing(k))
        if not 0.0 < alpha_k < 1.0:
            raise InvalidParameter(f"强制序列第 {k} 项 {alpha_k} 不在 (0, 1) 内")
        return alpha_k

    return checked


__all__ = ["OuterConfig", "ForcingSchedule", "outer_config", "resolve_forcing"]
