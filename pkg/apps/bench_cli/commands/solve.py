"""
求解命令
========

solve:    按配置 (命令行覆盖) 运行外层求解器，写出 <out>.trace.csv 与 <out>.summary.json
evaluate: 固定一个策略 (V=0 处的贪心策略或随机策略)，在其策略评估系统上
          以同一起点 θ₀ = 0 与严格容差运行多个内层求解器，
          每个求解器写出 <out>.<solver>.csv：iter,residual_inf,residual_2,error_inf，
          误差相对直接法解 V^π。
"""

import argparse
import csv
import io
import json
import logging
from typing import Dict, List

import numpy as np

from apps.bench_cli.commands.common import (
    EXIT_NOT_CONVERGED,
    EXIT_OK,
    add_solver_arguments,
    exit_code_for,
    output_prefix,
    resolve_solver,
    run_solver,
    settings_from_args,
    with_suffix,
)
from ipi.core.exceptions import InvalidParameter
from ipi.core.fileio import atomic_write_text
from ipi.dp import write_summary_json, write_trace_csv
from ipi.mdp import (
    MdpModel,
    Policy,
    PolicyLinearSystem,
    ValueVector,
    apply_T,
    extract_policy_system,
    read_model,
    solve_policy_system,
)
from ipi.solvers import create_inner_solver, inner_method, stopping_rule

logger = logging.getLogger("ipi.cli")

EVALUATION_HEADER = ("iter", "residual_inf", "residual_2", "error_inf")
DEFAULT_EVALUATION_SOLVERS = "richardson,jacobi,gs,sd,minres,gmres"
DEFAULT_EVALUATION_ALPHA = 1e-10


def register(subparsers: argparse._SubParsersAction) -> None:
    solve_parser = subparsers.add_parser("solve", help="求解 MDP 并写出轨迹与摘要")
    solve_parser.add_argument("model", type=str, help="模型文件 (.json / .npz)")
    add_solver_arguments(solve_parser)
    solve_parser.add_argument("--out", type=str, help="结果前缀 (默认 <output_dir>/<method>)")
    solve_parser.set_defaults(handler=solve)

    eval_parser = subparsers.add_parser("evaluate", help="在单一策略系统上比较内层求解器")
    eval_parser.add_argument("model", type=str, help="模型文件 (.json / .npz)")
    eval_parser.add_argument(
        "--policy",
        choices=["greedy", "random"],
        default="greedy",
        help="评估的策略：V=0 处的贪心策略或随机策略 (默认 greedy)",
    )
    eval_parser.add_argument("--seed", type=int, default=0, help="随机策略的种子")
    eval_parser.add_argument(
        "--solvers",
        type=str,
        default=DEFAULT_EVALUATION_SOLVERS,
        help=f"逗号分隔的内层求解器 (默认 {DEFAULT_EVALUATION_SOLVERS})",
    )
    eval_parser.add_argument(
        "--alpha",
        type=float,
        default=DEFAULT_EVALUATION_ALPHA,
        help="相对 ‖g^π‖∞ 的残差停止比例 (默认 1e-10)",
    )
    eval_parser.add_argument("--max-inner", type=int, default=500, help="迭代上限 (默认 500)")
    eval_parser.add_argument("--nu", type=float, default=1.0, help="Richardson 参数 ν")
    eval_parser.add_argument("--omega", type=float, default=1.0, help="SOR 松弛因子 ω")
    eval_parser.add_argument("--restart", type=int, help="GMRES 重启长度")
    eval_parser.add_argument("--out", type=str, help="结果前缀 (默认 <output_dir>/evaluate)")
    eval_parser.set_defaults(handler=evaluate)


def solve(args: argparse.Namespace) -> int:
    settings = settings_from_args(args)
    resolved = resolve_solver(settings)
    model = read_model(args.model)
    report = run_solver(resolved, model)

    prefix = output_prefix(args.out, resolved.name)
    write_trace_csv(report, with_suffix(prefix, ".trace.csv"))
    write_summary_json(report, with_suffix(prefix, ".summary.json"))
    print(report.to_summary().model_dump_json())
    return exit_code_for(report)


def _evaluation_policy(model: MdpModel, kind: str, seed: int) -> Policy:
    if kind == "random":
        rng = np.random.default_rng(seed)
        return rng.integers(0, model.m, size=model.n).astype(np.intp)
    _, policy = apply_T(model, np.zeros(model.n))
    return policy


def _evaluation_csv(
    residual_inf: List[float], residual_2: List[float], errors: List[float]
) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(EVALUATION_HEADER)
    for i, row in enumerate(zip(residual_inf, residual_2, errors)):
        writer.writerow([i, *row])
    return buffer.getvalue()


def evaluate_solvers(
    system: PolicyLinearSystem,
    exact: ValueVector,
    kinds: List[str],
    args: argparse.Namespace,
) -> Dict[str, Dict[str, object]]:
    """依次运行各内层求解器，返回 {标签: 结果}，结果含逐次迭代的误差"""
    rule = stopping_rule(
        args.alpha, float(np.max(np.abs(system.g_pi))), max_inner_iters=args.max_inner
    )
    results: Dict[str, Dict[str, object]] = {}
    for kind in kinds:
        params = {"nu": args.nu, "omega": args.omega, "restart": args.restart}
        solver = create_inner_solver(inner_method(kind, **params))
        errors: List[float] = []

        def record_error(theta: ValueVector) -> None:
            errors.append(float(np.max(np.abs(theta - exact))))

        _, trace = solver.solve(system, np.zeros(system.n), rule, on_iterate=record_error)
        results[solver.label] = {
            "iterations": trace.iterations_used,
            "converged": trace.converged,
            "final_residual_inf": trace.final_residual_inf,
            "final_error_inf": errors[-1],
            "csv": _evaluation_csv(trace.residual_inf_history, trace.residual_2_history, errors),
        }
        logger.info(
            "策略评估完成",
            extra={"solver": solver.label, "inner_iters": trace.iterations_used},
        )
    return results


def evaluate(args: argparse.Namespace) -> int:
    kinds = [kind.strip() for kind in args.solvers.split(",") if kind.strip()]
    if not kinds:
        raise InvalidParameter("至少需要一个内层求解器")
    model = read_model(args.model)
    policy = _evaluation_policy(model, args.policy, args.seed)
    system = extract_policy_system(model, policy)
    exact = solve_policy_system(system)

    results = evaluate_solvers(system, exact, kinds, args)
    prefix = output_prefix(args.out, "evaluate")
    summary = {}
    for label, result in results.items():
        atomic_write_text(with_suffix(prefix, f".{label}.csv"), str(result.pop("csv")))
        summary[label] = result
    print(json.dumps({"policy": args.policy, "n": model.n, "solvers": summary}, indent=2))
    all_converged = all(result["converged"] for result in summary.values())
    return EXIT_OK if all_converged else EXIT_NOT_CONVERGED
