"""
ipi 基准命令行入口
==================

子命令按功能分组，每组一个模块 (与 REST 路由器的组织方式一致)：
- generate-random / generate-sis: 生成模型文件
- classify: MDP 结构分类与策略矩阵谱分析
- solve / evaluate: 求解 MDP，或在单一策略系统上比较内层求解器
- sweep: 按 γ / α / 人口规模扫描求解器矩阵

退出码：0 按容差终止；2 达到迭代上限或时间预算；1 输入或参数错误。
日志写到标准错误，结果文件写到 --out 指定的位置。
"""

import argparse
import json
import logging
import sys
from typing import List, NoReturn, Optional

from pydantic import ValidationError

from apps.bench_cli.commands import analyze, generate, solve, sweep
from ipi.core.exceptions import IpiError
from ipi.core.logging_config import setup_logging
from ipi.core.settings import get_settings

logger = logging.getLogger("ipi.cli")

EXIT_INPUT_ERROR = 1


class BenchArgumentParser(argparse.ArgumentParser):
    """参数错误时打印用法并以退出码 1 结束"""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT_ERROR, f"{self.prog}: 错误: {message}\n")


def build_parser() -> BenchArgumentParser:
    parser = BenchArgumentParser(
        prog="ipi-bench",
        description="有限折扣 MDP 的 VI / PI / OPI / iPI 求解与基准工具",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
示例用法：
  %(prog)s generate-sis -N 1000 --gamma 0.9 --out sis.npz
  %(prog)s solve sis.npz --method ipi --inner gmres --alpha 0.1 --out results/sis
  %(prog)s sweep gamma_sweep.json --out results/gamma
        """,
    )
    parser.add_argument(
        "--log-level",
        type=str,
        default=None,
        help="覆盖 ipi 日志级别 (例如 DEBUG)",
    )
    subparsers = parser.add_subparsers(
        dest="command",
        required=True,
        parser_class=BenchArgumentParser,
    )
    generate.register(subparsers)
    analyze.register(subparsers)
    solve.register(subparsers)
    sweep.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """命令行主函数，返回退出码"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    settings = get_settings()
    setup_logging(settings.app.logging_config, args.log_level or settings.app.log_level)
    logger.info("命令开始", extra={"command": args.command})

    try:
        exit_code = int(args.handler(args))
    except (IpiError, OSError, json.JSONDecodeError, ValidationError, KeyError) as e:
        print(f"ipi-bench {args.command}: {type(e).__name__}: {e}", file=sys.stderr)
        logger.error("命令失败", extra={"command": args.command, "error": str(e)})
        return EXIT_INPUT_ERROR

    logger.info("命令结束", extra={"command": args.command, "exit_code": exit_code})
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
