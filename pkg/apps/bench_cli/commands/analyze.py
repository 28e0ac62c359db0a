"""
结构分析命令
============

classify: 枚举策略判定 MDP 类别，并对一个策略 (给定，或 V=0 处的贪心策略)
报告 P^π 的不可约性与周期、Richardson 加速下界 ν̲、对称部分 H = I - γP_s 的正定性，
以及谱半径圆周上的特征值个数 (analysis.modulus_tol) 与 I - γP^π 的最小多项式次数
(analysis.krylov_rank_tol，仅 n ≤ 64)。
谱分析使用稠密特征值分解，n 超过 DENSE_ANALYSIS_MAX 时跳过。
"""

import argparse
import json
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np

from apps.bench_cli.commands.common import EXIT_OK, with_suffix
from ipi.analysis import (
    classify_matrix,
    classify_mdp,
    minimal_polynomial_degree,
    peripheral_eigenvalue_count,
    richardson_nu_interval,
    symmetric_part_analysis,
)
from ipi.analysis.spectral import MAX_ORACLE_DIMENSION
from ipi.core.exceptions import InvalidParameter
from ipi.core.fileio import atomic_write_text
from ipi.core.settings import AnalysisSettings, get_settings
from ipi.mdp import MdpModel, Policy, apply_T, as_policy, extract_policy_system, read_model

DENSE_ANALYSIS_MAX = 2000


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("classify", help="MDP 结构分类与策略矩阵谱分析")
    parser.add_argument("model", type=str, help="模型文件 (.json / .npz)")
    parser.add_argument("--cap", type=int, help="策略枚举上限 (默认取配置 1e5)")
    parser.add_argument(
        "--policy",
        type=str,
        help="逗号分隔的动作索引；缺省时使用 V=0 处的贪心策略",
    )
    parser.add_argument("--out", type=str, help="结果前缀，写出 <out>.classify.json")
    parser.set_defaults(handler=classify)


def _parse_policy(text: Optional[str], model: MdpModel) -> Policy:
    if text is None:
        _, policy = apply_T(model, np.zeros(model.n))
        return policy
    try:
        actions = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise InvalidParameter(f"策略必须是逗号分隔的整数动作索引，收到 {text!r}") from e
    return as_policy(actions, model)


def classification_report(
    model: MdpModel,
    policy: Policy,
    analysis: Optional[AnalysisSettings] = None,
    cap: Optional[int] = None,
) -> Dict[str, Any]:
    analysis = analysis or get_settings().analysis
    mdp_class = classify_mdp(model, cap or analysis.classify_policy_cap)
    report: Dict[str, Any] = {
        "n": model.n,
        "m": model.m,
        "gamma": model.gamma,
        "verdict": mdp_class.verdict.value,
        "policies_checked": mdp_class.policies_checked,
        "policy": policy.tolist(),
    }

    system = extract_policy_system(model, policy)
    p_pi = system.p_pi
    matrix = classify_matrix(p_pi)
    report["policy_matrix"] = {
        "irreducible": matrix.irreducible,
        "period": matrix.period,
        "primitive": matrix.primitive,
    }

    if model.n > DENSE_ANALYSIS_MAX:
        report["spectral"] = None
        return report
    symmetric = symmetric_part_analysis(p_pi, model.gamma)
    report["spectral"] = {
        "richardson_nu_lower": richardson_nu_interval(p_pi, model.gamma),
        "symmetric_lambda_min": symmetric.lambda_min_h,
        "symmetric_positive_definite": symmetric.positive_definite,
        "symmetric_gamma_threshold": symmetric.gamma_threshold,
        "peripheral_eigenvalues": peripheral_eigenvalue_count(p_pi, analysis.modulus_tol),
        # GMRES 在 I - γP^π 上的有限终止步数
        "minimal_polynomial_degree": (
            minimal_polynomial_degree(
                system.coefficient_matrix, rank_tol=analysis.krylov_rank_tol
            )
            if model.n <= MAX_ORACLE_DIMENSION
            else None
        ),
    }
    return report


def classify(args: argparse.Namespace) -> int:
    model = read_model(args.model)
    report = classification_report(model, _parse_policy(args.policy, model), cap=args.cap)
    text = json.dumps(report, indent=2)
    if args.out:
        atomic_write_text(with_suffix(Path(args.out), ".classify.json"), text + "\n")
    print(text)
    return EXIT_OK
