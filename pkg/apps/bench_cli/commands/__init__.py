"""
ipi-bench 子命令
================

每个模块提供 register(subparsers)，把自己的子命令挂到主解析器上。
"""

from . import analyze, generate, solve, sweep

__all__ = ["analyze", "generate", "solve", "sweep"]
