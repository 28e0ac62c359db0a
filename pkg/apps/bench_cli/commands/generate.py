"""
模型生成命令
============

generate-random: 带种子的随机 MDP
generate-sis:    动态 SIS 传染病 MDP

输出按文件后缀选择格式：.json 为标准 MDP JSON，.npz 为压缩二进制。
"""

import argparse
import json
from typing import Any, Dict

from apps.bench_cli.commands.common import EXIT_OK
from ipi.core.settings import get_settings
from ipi.mdp import write_model
from ipi.models import (
    build_sis_mdp,
    generate_random_model,
    load_sis_params,
    random_mdp_spec,
    sis_params,
)


def register(subparsers: argparse._SubParsersAction) -> None:
    random_parser = subparsers.add_parser("generate-random", help="生成随机 MDP")
    random_parser.add_argument("--n", type=int, required=True, help="状态数")
    random_parser.add_argument("--m", type=int, required=True, help="动作数")
    random_parser.add_argument("--gamma", type=float, required=True, help="折扣因子")
    random_parser.add_argument("--density", type=float, default=1.0, help="每行非零元比例")
    random_parser.add_argument("--seed", type=int, default=0, help="随机种子")
    random_parser.add_argument(
        "--ensure-regular",
        action="store_true",
        help="加入自环与公共 Hamiltonian 回路，使每个 P^π 本原",
    )
    random_parser.add_argument("--out", type=str, required=True, help="输出文件 (.json / .npz)")
    random_parser.set_defaults(handler=generate_random)

    sis_parser = subparsers.add_parser("generate-sis", help="生成 SIS 传染病 MDP")
    sis_parser.add_argument("-N", "--population", type=int, help="人口规模 N")
    sis_parser.add_argument("--gamma", type=float, help="折扣因子")
    sis_parser.add_argument("--params", type=str, help="SIS 参数文件 (.json / .yaml)")
    sis_parser.add_argument("--out", type=str, required=True, help="输出文件 (.json / .npz)")
    sis_parser.set_defaults(handler=generate_sis)


def generate_random(args: argparse.Namespace) -> int:
    spec = random_mdp_spec(
        n=args.n,
        m=args.m,
        gamma=args.gamma,
        density=args.density,
        seed=args.seed,
        ensure_regular=args.ensure_regular,
    )
    path = write_model(args.out, generate_random_model(spec))
    print(json.dumps({"path": str(path), **spec.model_dump()}))
    return EXIT_OK


def generate_sis(args: argparse.Namespace) -> int:
    overrides: Dict[str, Any] = {}
    if args.population is not None:
        overrides["population"] = args.population
    if args.gamma is not None:
        overrides["gamma"] = args.gamma
    params = load_sis_params(args.params, overrides) if args.params else sis_params(**overrides)
    model = build_sis_mdp(params, workers=get_settings().threads)
    path = write_model(args.out, model)
    summary = {"path": str(path), "population": params.population, "n": model.n, "m": model.m}
    print(json.dumps({**summary, "nnz": model.nnz}))
    return EXIT_OK
