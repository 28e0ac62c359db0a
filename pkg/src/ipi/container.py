"""
ipi 依赖注入容器
================

使用 dependency-injector 把配置装配成求解器对象：
- config: 由 Settings 填充的 Configuration
- inner_method / inner_solver: 内层方法描述与经注册中心实例化的求解器
- outer_config: 外层求解参数
- outer_solver: 按 config.solver.method 选择 vi / pi / opi / ipi

使用示例：
    from ipi.container import create_container
    container = create_container()
    report = container.outer_solver()(model, None, container.outer_config())
"""

from typing import Optional

from dependency_injector import containers, providers

from ipi.core.settings import Settings, get_settings
from ipi.dp.algorithms import inexact_pi, optimistic_pi, policy_iteration, value_iteration
from ipi.dp.config import OuterConfig
from ipi.solvers.driver import create_inner_solver
from ipi.solvers.interface import InnerMethod


class SolverContainer(containers.DeclarativeContainer):
    """求解器容器"""

    config = providers.Configuration()

    inner_method = providers.Factory(
        InnerMethod,
        kind=config.solver.inner,
        nu=config.solver.nu,
        omega=config.solver.omega,
        restart=config.solver.restart,
    )

    inner_solver = providers.Factory(create_inner_solver, method=inner_method)

    outer_config = providers.Factory(
        OuterConfig,
        tol=config.solver.tol,
        max_outer_iters=config.solver.max_outer_iters,
        time_budget_s=config.solver.time_budget_s,
        alpha=config.solver.alpha,
        inner_method=inner_method,
        opi_w=config.solver.opi_w,
        max_inner_iters=config.solver.max_inner_iters,
        forcing=config.solver.forcing,
        forcing_decay=config.solver.forcing_decay,
        forcing_min=config.solver.forcing_min,
        workers=config.threads,
        dense_fallback_below=config.solver.dense_fallback_below,
    )

    # 外层求解器按配置选择
    outer_solver = providers.Selector(
        config.solver.method,
        vi=providers.Object(value_iteration),
        pi=providers.Object(policy_iteration),
        opi=providers.Object(optimistic_pi),
        ipi=providers.Object(inexact_pi),
    )


def create_container(settings: Optional[Settings] = None) -> SolverContainer:
    """用给定配置 (默认全局配置) 创建容器"""
    container = SolverContainer()
    container.config.from_dict((settings or get_settings()).model_dump())
    return container


__all__ = ["SolverContainer", "create_container"]
