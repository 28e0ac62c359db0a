"""
ipi 基准工具启动脚本
====================

在未安装包的源码目录中直接运行命令行工具。
--env 选择 config/<env>.yaml 配置层，其余参数原样交给 ipi-bench。

使用方式：
    python run.py generate-sis -N 1000 --out sis.npz
    python run.py --env benchmark solve sis.npz --method ipi --inner gmres
    python run.py sweep gamma_sweep.json --out results/gamma
"""

import argparse
import os
import sys
from pathlib import Path

# 添加项目根目录与 src 到 Python 路径
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root / "src"))
sys.path.insert(0, str(project_root))


def parse_env(argv: list[str]) -> tuple[str, list[str]]:
    """拆出 --env，返回 (环境名, 剩余参数)"""
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument(
        "--env",
        type=str,
        choices=["development", "benchmark"],
        default=os.environ.get("IPI_ENV", "development"),
        help="运行环境 (默认: development)",
    )
    known, rest = parser.parse_known_args(argv)
    return known.env, rest


def main() -> int:
    env, rest = parse_env(sys.argv[1:])
    os.environ["IPI_ENV"] = env

    from apps.bench_cli.main import main as bench_main

    return bench_main(rest)


if __name__ == "__main__":
    sys.exit(main())
