"""
外层动态规划求解器
==================

- value_iteration: V_{k+1} = TV_k
- policy_iteration: 贪心策略 + 精确策略评估
- optimistic_pi: V_{k+1} = T^w_{π_{k+1}} V_k
- inexact_pi: 策略评估由内层迭代求解到 ‖Φ^π(θ)‖∞ ≤ α_k‖Φ^π(V_k)‖∞

四个求解器共用同一个外层循环：每步先由 apply_T 得到 TV_k 与贪心策略 π_{k+1}，
记录 Bellman 残差，检查终止条件，再调用各自的更新规则。
墙钟预算只在外层迭代之间检查。
"""

import logging
import time
from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np
from numpy.typing import ArrayLike

from ipi.core.registry import Registry
from ipi.dp.config import ForcingSchedule, OuterConfig, resolve_forcing
from ipi.dp.report import InnerAcceptance, SolveReport, TerminatedBy
from ipi.mdp.bellman import apply_T, exact_policy_evaluation, extract_policy_system
from ipi.mdp.model import MdpModel, Policy, ValueVector, as_value_vector
from ipi.solvers.driver import create_inner_solver
from ipi.solvers.interface import StoppingRule

logger = logging.getLogger(__name__)


@dataclass
class _Update:
    value: ValueVector
    inner_iters: int = 0
    acceptance: Optional[InnerAcceptance] = None


# (k, V_k, TV_k, π_{k+1}) -> V_{k+1}
UpdateRule = Callable[[int, ValueVector, ValueVector, Policy], _Update]
OuterSolver = Callable[..., SolveReport]

outer_solvers: Registry[OuterSolver] = Registry("outer solver")


def _inf_norm(x: ValueVector) -> float:
    return float(np.max(np.abs(x))) if x.size else 0.0


def _initial_value(model: MdpModel, V0: Optional[ArrayLike]) -> ValueVector:
    if V0 is None:
        return np.zeros(model.n)
    return np.array(as_value_vector(V0, model.n), dtype=np.float64)


def _run_outer(
    solver: str,
    model: MdpModel,
    V0: Optional[ArrayLike],
    config: OuterConfig,
    update: UpdateRule,
    reference: Optional[ArrayLike],
    stop_on_step_difference: bool = False,
    inner: Optional[str] = None,
    alpha: Optional[float] = None,
) -> SolveReport:
    V = _initial_value(model, V0)
    ref = None if reference is None else as_value_vector(reference, model.n)
    started = time.perf_counter()

    TV, policy = apply_T(model, V, workers=config.workers)
    residual_inf = _inf_norm(V - TV)
    residuals: List[float] = [residual_inf]
    errors: List[float] = [] if ref is None else [_inf_norm(V - ref)]
    inner_iters: List[int] = [0]
    times: List[float] = [time.perf_counter() - started]
    acceptances: List[InnerAcceptance] = []
    logger.info(
        "外层求解开始",
        extra={
            "solver": solver,
            "inner": inner,
            "n": model.n,
            "m": model.m,
            "gamma": model.gamma,
            "residual_inf": residual_inf,
        },
    )

    k = 0
    step_difference = float("inf")
    while True:
        if residual_inf <= config.tol or (
            stop_on_step_difference and step_difference <= config.tol
        ):
            terminated_by = TerminatedBy.TOLERANCE
            break
        if k >= config.max_outer_iters:
            terminated_by = TerminatedBy.MAX_ITERS
            break
        if config.time_budget_s is not None and times[-1] >= config.time_budget_s:
            terminated_by = TerminatedBy.TIME_BUDGET
            break

        result = update(k, V, TV, policy)
        step_difference = _inf_norm(result.value - V)
        V = result.value
        k += 1

        TV, policy = apply_T(model, V, workers=config.workers)
        residual_inf = _inf_norm(V - TV)
        residuals.append(residual_inf)
        if ref is not None:
            errors.append(_inf_norm(V - ref))
        inner_iters.append(result.inner_iters)
        times.append(time.perf_counter() - started)
        if result.acceptance is not None:
            acceptances.append(result.acceptance)
        logger.debug(
            "外层迭代",
            extra={
                "solver": solver,
                "outer_iter": k,
                "residual_inf": residual_inf,
                "inner_iters": result.inner_iters,
                "elapsed_s": times[-1],
            },
        )

    report = SolveReport(
        solver=solver,
        inner=inner,
        alpha=alpha,
        n=model.n,
        m=model.m,
        gamma=model.gamma,
        final_value=V,
        final_policy=policy,
        outer_iters=k,
        residual_history=residuals,
        error_history=errors,
        inner_iters_history=inner_iters,
        time_history=times,
        wall_time_s=time.perf_counter() - started,
        terminated_by=terminated_by,
        inner_acceptance=acceptances,
    )
    log = logger.info if report.converged else logger.warning
    log(
        "外层求解结束",
        extra={
            "solver": solver,
            "outer_iter": k,
            "residual_inf": residual_inf,
            "inner_iters": report.total_inner_iters,
            "elapsed_s": report.wall_time_s,
            "terminated_by": terminated_by.value,
        },
    )
    return report


@outer_solvers.register("vi")
def value_iteration(
    model: MdpModel,
    V0: Optional[ArrayLike] = None,
    config: Optional[OuterConfig] = None,
    *,
    reference: Optional[ArrayLike] = None,
) -> SolveReport:
    """值迭代，‖V_{k+1} - V_k‖∞ = ‖r(V_k)‖∞ ≤ tol 时终止"""
    config = config or OuterConfig()

    def update(k: int, V: ValueVector, TV: ValueVector, policy: Policy) -> _Update:
        return _Update(value=TV)

    return _run_outer("vi", model, V0, config, update, reference)


@outer_solvers.register("pi")
def policy_iteration(
    model: MdpModel,
    V0: Optional[ArrayLike] = None,
    config: Optional[OuterConfig] = None,
    *,
    reference: Optional[ArrayLike] = None,
) -> SolveReport:
    """
    精确策略迭代

    π_{k+1} 为 V_k 的贪心策略，V_{k+1} = V^{π_{k+1}}；
    ‖V_{k+1} - V_k‖∞ ≤ tol 或 ‖r(V_k)‖∞ ≤ tol 时终止。
    """
    config = config or OuterConfig()

    def update(k: int, V: ValueVector, TV: ValueVector, policy: Policy) -> _Update:
        value = exact_policy_evaluation(model, policy, config.dense_fallback_below)
        return _Update(value=value)

    return _run_outer(
        "pi", model, V0, config, update, reference, stop_on_step_difference=True
    )


@outer_solvers.register("opi")
def optimistic_pi(
    model: MdpModel,
    V0: Optional[ArrayLike] = None,
    config: Optional[OuterConfig] = None,
    *,
    reference: Optional[ArrayLike] = None,
) -> SolveReport:
    """
    乐观策略迭代

    第一次 T_{π_{k+1}} 作用即 TV_k (π_{k+1} 为贪心策略)，其后再作用 w - 1 次；
    w = 1 时迭代序列与值迭代完全相同。
    """
    config = config or OuterConfig()
    w = config.opi_w

    def update(k: int, V: ValueVector, TV: ValueVector, policy: Policy) -> _Update:
        value = TV
        if w > 1:
            system = extract_policy_system(model, policy)
            for _ in range(w - 1):
                value = system.bellman(value)
        return _Update(value=value, inner_iters=w)

    return _run_outer("opi", model, V0, config, update, reference, inner=f"w={w}")


@outer_solvers.register("ipi")
def inexact_pi(
    model: MdpModel,
    V0: Optional[ArrayLike] = None,
    config: Optional[OuterConfig] = None,
    *,
    reference: Optional[ArrayLike] = None,
    forcing: Optional[ForcingSchedule] = None,
) -> SolveReport:
    """
    非精确策略迭代

    每次外层迭代以 θ₀ = V_k 为起点，用内层方法求解 π_{k+1} 的策略评估系统，
    直到 ‖Φ^{π_{k+1}}(θ)‖∞ ≤ α_k‖Φ^{π_{k+1}}(V_k)‖∞ 或达到内层上限；
    内层未收敛时仍接受最后的迭代点。
    """
    config = config or OuterConfig()
    forcing_term = resolve_forcing(config, forcing)
    inner_solver = create_inner_solver(config.inner_method)

    def update(k: int, V: ValueVector, TV: ValueVector, policy: Policy) -> _Update:
        system = extract_policy_system(model, policy)
        reference_residual_inf = _inf_norm(system.residual(V))
        alpha_k = forcing_term(k)
        rule = StoppingRule(
            alpha=alpha_k,
            reference_residual_inf=reference_residual_inf,
            max_inner_iters=config.max_inner_iters,
        )
        theta, trace = inner_solver.solve(system, V, rule)
        acceptance = InnerAcceptance(
            outer_iter=k + 1,
            alpha=alpha_k,
            reference_residual_inf=reference_residual_inf,
            threshold=rule.threshold,
            accepted_residual_inf=trace.final_residual_inf,
            inner_iters=trace.iterations_used,
            converged=trace.converged,
        )
        return _Update(value=theta, inner_iters=trace.iterations_used, acceptance=acceptance)

    return _run_outer(
        "ipi",
        model,
        V0,
        config,
        update,
        reference,
        inner=inner_solver.label,
        alpha=config.alpha,
    )


def solve_mdp(
    model: MdpModel,
    method: str,
    V0: Optional[ArrayLike] = None,
    config: Optional[OuterConfig] = None,
    *,
    reference: Optional[ArrayLike] = None,
) -> SolveReport:
    """按名称 (vi / pi / opi / ipi) 调用外层求解器"""
    return outer_solvers.get(method)(model, V0, config, reference=reference)


__all__ = [
    "value_iteration",
    "policy_iteration",
    "optimistic_pi",
    "inexact_pi",
    "solve_mdp",
    "outer_solvers",
    "OuterSolver",
]
