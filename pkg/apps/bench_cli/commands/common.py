"""
命令行公共部分
==============

求解器参数定义、命令行覆盖到 Settings 的映射、经依赖注入容器解析求解器、
参考解计算与退出码约定。
"""

import argparse
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, Optional

from ipi.container import create_container
from ipi.core.settings import Settings, get_settings
from ipi.dp import OuterConfig, SolveReport, TerminatedBy, policy_iteration
from ipi.mdp import MdpModel, ValueVector

logger = logging.getLogger("ipi.cli")

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_NOT_CONVERGED = 2

REFERENCE_TOL = 1e-12

INNER_CHOICES = ("richardson", "jacobi", "gs", "sor", "sd", "minres", "gmres")

# 命令行参数名 -> solver 配置段字段名
_SOLVER_FLAGS = {
    "method": "method",
    "inner": "inner",
    "nu": "nu",
    "omega": "omega",
    "restart": "restart",
    "alpha": "alpha",
    "forcing": "forcing",
    "opi_w": "opi_w",
    "tol": "tol",
    "max_outer": "max_outer_iters",
    "max_inner": "max_inner_iters",
    "time_budget": "time_budget_s",
    "reference": "reference",
}


def add_solver_arguments(parser: argparse.ArgumentParser) -> None:
    """求解器参数，未指定时使用配置文件中的值"""
    group = parser.add_argument_group("求解器参数")
    group.add_argument("--method", choices=["vi", "pi", "opi", "ipi"], help="外层算法")
    group.add_argument("--inner", choices=INNER_CHOICES, help="iPI 内层求解器")
    group.add_argument("--nu", type=float, help="Richardson 参数 ν")
    group.add_argument("--omega", type=float, help="SOR 松弛因子 ω")
    group.add_argument("--restart", type=int, help="GMRES 重启长度 (默认不重启)")
    group.add_argument("--alpha", type=float, help="iPI 强制参数 α ∈ (0, 1)")
    group.add_argument("--forcing", choices=["constant", "geometric"], help="强制序列")
    group.add_argument("--opi-w", type=int, help="OPI 每次外层迭代的内层步数 w")
    group.add_argument("--tol", type=float, help="外层容差 (默认 1e-8)")
    group.add_argument("--max-outer", type=int, help="外层迭代上限")
    group.add_argument("--max-inner", type=int, help="内层迭代上限 (默认 500)")
    group.add_argument("--time-budget", type=float, help="墙钟预算，秒 (默认 500)")
    group.add_argument(
        "--reference",
        choices=["none", "pi"],
        help="pi: 先用 PI (容差 1e-12) 求参考解以记录 error_inf",
    )


def solver_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """把命令行上显式给出的求解器参数转换为 Settings 覆盖"""
    solver = {
        field: getattr(args, flag)
        for flag, field in _SOLVER_FLAGS.items()
        if getattr(args, flag, None) is not None
    }
    return {"solver": solver} if solver else {}


def settings_from_args(
    args: argparse.Namespace, extra: Optional[Dict[str, Any]] = None
) -> Settings:
    overrides = solver_overrides(args)
    if extra:
        overrides.setdefault("solver", {}).update(extra)
    return get_settings().with_overrides(overrides)


@dataclass
class ResolvedSolver:
    """由容器解析出的外层求解器及其配置"""

    name: str
    run: Callable[..., SolveReport]
    config: OuterConfig
    reference_mode: str


def resolve_solver(settings: Settings) -> ResolvedSolver:
    container = create_container(settings)
    return ResolvedSolver(
        name=settings.solver.method,
        run=container.outer_solver(),
        config=container.outer_config(),
        reference_mode=settings.solver.reference,
    )


def compute_reference(model: MdpModel, config: OuterConfig) -> ValueVector:
    """PI 以 1e-12 容差求得的 V*，用于 error_inf 列"""
    reference_config = config.model_copy(
        update={"tol": REFERENCE_TOL, "time_budget_s": None}
    )
    report = policy_iteration(model, None, reference_config)
    if not report.converged:
        logger.warning(
            "参考解未达到容差",
            extra={"residual_inf": report.final_residual_inf, "solver": "pi"},
        )
    return report.final_value


def run_solver(resolved: ResolvedSolver, model: MdpModel) -> SolveReport:
    reference = None
    if resolved.reference_mode == "pi":
        reference = compute_reference(model, resolved.config)
    return resolved.run(model, None, resolved.config, reference=reference)


def exit_code_for(report: SolveReport) -> int:
    return EXIT_OK if report.terminated_by is TerminatedBy.TOLERANCE else EXIT_NOT_CONVERGED


def output_prefix(out: Optional[str], default: str) -> Path:
    """结果文件前缀，未指定时落在 io.output_dir 下"""
    prefix = Path(out) if out else Path(get_settings().io.output_dir) / default
    prefix.parent.mkdir(parents=True, exist_ok=True)
    return prefix


def with_suffix(prefix: Path, suffix: str) -> Path:
    return prefix.with_name(prefix.name + suffix)


__all__ = [
    "EXIT_OK",
    "EXIT_INPUT_ERROR",
    "EXIT_NOT_CONVERGED",
    "ResolvedSolver",
    "add_solver_arguments",
    "solver_overrides",
    "settings_from_args",
    "resolve_solver",
    "compute_reference",
    "run_solver",
    "exit_code_for",
    "output_prefix",
    "with_suffix",
]
