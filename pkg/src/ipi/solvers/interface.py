"""
策略评估内层求解器接口
======================

本模块定义了所有内层迭代求解器必须遵循的统一接口，以及相关的值对象：
- StoppingRule: iPI 使用的 α 相对残差停止条件 (无穷范数)
- InnerMethod: 内层方法描述 (名称 + 参数)
- InnerTrace: 每次内层迭代的残差记录
- InnerSolver: 抽象基类，具体求解器通过 @inner_solver("名称") 注册
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, ClassVar, List, Optional, Tuple, Type

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ipi.core.exceptions import DimensionMismatch, InvalidParameter
from ipi.core.registry import Registry
from ipi.core.settings import InnerMethodName
from ipi.mdp.model import PolicyLinearSystem, ValueVector

logger = logging.getLogger(__name__)

DEFAULT_MAX_INNER_ITERS = 500
# 线搜索分母低于该值时视为残差已数值为零
LINE_SEARCH_FLOOR = 1e-300

IterateCallback = Callable[[ValueVector], None]


class StoppingRule(BaseModel):
    """‖Φ^π(θ)‖∞ ≤ α·‖Φ^π(θ₀)‖∞，或达到内层迭代上限"""

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(..., gt=0, lt=1)
    reference_residual_inf: float = Field(..., ge=0)
    max_inner_iters: int = Field(DEFAULT_MAX_INNER_ITERS, ge=1)

    @property
    def threshold(self) -> float:
        return self.alpha * self.reference_residual_inf

    def is_met(self, residual_inf: float) -> bool:
        return residual_inf <= self.threshold


class InnerMethod(BaseModel):
    """内层方法：名称与参数 (ν 用于 Richardson，ω 用于 SOR，restart 用于 GMRES)"""

    model_config = ConfigDict(frozen=True)

    kind: InnerMethodName
    nu: float = Field(1.0, gt=0)
    omega: float = Field(1.0, gt=0, lt=2)
    restart: Optional[int] = Field(None, ge=1)

    @property
    def label(self) -> str:
        if self.kind == "richardson":
            return f"richardson(nu={self.nu:g})"
        if self.kind == "sor":
            return f"sor(omega={self.omega:g})"
        if self.kind == "gmres" and self.restart:
            return f"gmres(restart={self.restart})"
        return self.kind


def inner_method(kind: str, **params: object) -> InnerMethod:
    """构造 InnerMethod，参数非法时抛出 InvalidParameter"""
    try:
        return InnerMethod(kind=kind, **params)  # type: ignore[arg-type]
    except ValidationError as e:
        raise InvalidParameter(f"内层方法参数非法: {e.errors()[0]['msg']}") from e


def stopping_rule(
    alpha: float, reference_residual_inf: float, max_inner_iters: int = DEFAULT_MAX_INNER_ITERS
) -> StoppingRule:
    """构造 StoppingRule，参数非法时抛出 InvalidParameter"""
    try:
        return StoppingRule(
            alpha=alpha,
            reference_residual_inf=reference_residual_inf,
            max_inner_iters=max_inner_iters,
        )
    except ValidationError as e:
        raise InvalidParameter(f"停止条件参数非法: {e.errors()[0]['msg']}") from e


@dataclass
class InnerTrace:
    """内层迭代记录，历史长度 = iterations_used + 1 (含初始残差)"""

    method: str = ""
    residual_inf_history: List[float] = field(default_factory=list)
    residual_2_history: List[float] = field(default_factory=list)
    iterations_used: int = 0
    converged: bool = False

    def record(self, phi: ValueVector) -> float:
        """记录一个残差向量，返回其无穷范数"""
        residual_inf = float(np.max(np.abs(phi))) if phi.size else 0.0
        if self.residual_inf_history:
            self.iterations_used += 1
        self.residual_inf_history.append(residual_inf)
        self.residual_2_history.append(float(np.linalg.norm(phi)))
        return residual_inf

    @property
    def final_residual_inf(self) -> float:
        return self.residual_inf_history[-1]


def check_dimensions(system: PolicyLinearSystem, theta: ArrayLike) -> ValueVector:
    values = np.array(theta, dtype=np.float64)
    if values.ndim != 1 or values.shape[0] != system.n:
        raise DimensionMismatch(f"迭代向量形状为 {values.shape}，应为 ({system.n},)")
    return values


class InnerSolver(ABC):
    """
    策略评估内层求解器接口

    子类实现 advance：给定当前迭代点及其残差，返回下一个迭代点。
    solve 负责残差记录与 α 停止条件判定，GMRES 等方法可整体重写 solve。
    """

    name: ClassVar[str]

    @property
    def label(self) -> str:
        return self.name

    @abstractmethod
    def advance(
        self, system: PolicyLinearSystem, theta: ValueVector, phi: ValueVector
    ) -> ValueVector:
        """
        执行一次迭代

        Args:
            system: 策略评估线性系统
            theta: 当前迭代点
            phi: 当前残差 Φ^π(θ)

        Returns:
            下一个迭代点 (新数组)
        """

    def step(self, system: PolicyLinearSystem, theta: ArrayLike) -> ValueVector:
        values = check_dimensions(system, theta)
        return self.advance(system, values, system.residual(values))

    def solve(
        self,
        system: PolicyLinearSystem,
        theta0: ArrayLike,
        rule: StoppingRule,
        on_iterate: Optional[IterateCallback] = None,
    ) -> Tuple[ValueVector, InnerTrace]:
        """
        迭代直到满足停止条件或达到上限

        on_iterate 在记录每个迭代点 (含初始点) 后被调用。
        """
        theta = check_dimensions(system, theta0)
        phi = system.residual(theta)
        trace = InnerTrace(method=self.label)
        residual_inf = trace.record(phi)
        if on_iterate is not None:
            on_iterate(theta)
        while not rule.is_met(residual_inf) and trace.iterations_used < rule.max_inner_iters:
            theta = self.advance(system, theta, phi)
            phi = system.residual(theta)
            residual_inf = trace.record(phi)
            if on_iterate is not None:
                on_iterate(theta)
        trace.converged = rule.is_met(residual_inf)
        if not trace.converged:
            logger.warning(
                "内层求解未在上限内满足停止条件",
                extra={
                    "solver": self.label,
                    "inner_iters": trace.iterations_used,
                    "residual_inf": residual_inf,
                    "threshold": rule.threshold,
                },
            )
        return theta, trace


inner_solvers: Registry[Type[InnerSolver]] = Registry("inner solver")


def inner_solver(name: str) -> Callable[[Type[InnerSolver]], Type[InnerSolver]]:
    """注册内层求解器类的装饰器"""

    def decorator(cls: Type[InnerSolver]) -> Type[InnerSolver]:
        cls.name = name
        return inner_solvers.register(name)(cls)

    return decorator


__all__ = [
    "StoppingRule",
    "InnerMethod",
    "InnerTrace",
    "InnerSolver",
    "inner_method",
    "stopping_rule",
    "inner_solver",
    "inner_solvers",
    "check_dimensions",
    "DEFAULT_MAX_INNER_ITERS",
    "LINE_SEARCH_FLOOR",
    "IterateCallback",
]
