"""
ipi 异常定义
============

本模块定义了整个库统一的异常层次结构。所有异常都继承自 IpiError，
命令行前端据此把库内错误统一映射为退出码 1。

数据校验类异常同时继承 ValueError / IndexError，
调用方可以按标准库语义捕获。
"""


class IpiError(Exception):
    """ipi 库异常基类"""
    pass


class ModelValidationError(IpiError, ValueError):
    """MDP 模型校验失败"""
    pass


class RowSumError(ModelValidationError):
    """转移矩阵某一行的概率和偏离 1"""
    pass


class NegativeProbability(ModelValidationError):
    """转移概率为负"""
    pass


class GammaOutOfRange(ModelValidationError):
    """折扣因子不在开区间 (0, 1) 内"""
    pass


class IndexOutOfRange(ModelValidationError, IndexError):
    """状态或动作索引越界"""
    pass


class DuplicateTransition(ModelValidationError):
    """同一动作下 (i, j) 重复出现"""
    pass


class DimensionMismatch(IpiError, ValueError):
    """向量或策略的维度与模型不一致"""
    pass


class InvalidParameter(IpiError, ValueError):
    """算法参数非法 (例如 ν ≤ 0, ω ∉ (0, 2))"""
    pass


class InvalidSpec(IpiError, ValueError):
    """生成器或扫描任务的描述文件非法"""
    pass


class FactorizationFailure(IpiError, ArithmeticError):
    """直接法分解或求解出现数值崩溃"""
    pass


class EigensolveFailure(IpiError, ArithmeticError):
    """稠密特征值计算失败"""
    pass


class NotIrreducible(IpiError, ValueError):
    """需要不可约矩阵的操作收到了可约矩阵"""
    pass


class NegativeEntry(IpiError, ValueError):
    """需要非负矩阵的操作收到了负元素"""
    pass


class TooLarge(IpiError, ValueError):
    """问题规模超过了枚举或稠密计算的保护上限"""
    pass


class OracleInconsistency(IpiError, RuntimeError):
    """穷举预言机得到的逐元素最小值没有被任何策略达到"""
    pass


__all__ = [
    "IpiError",
    "ModelValidationError",
    "RowSumError",
    "NegativeProbability",
    "GammaOutOfRange",
    "IndexOutOfRange",
    "DuplicateTransition",
    "DimensionMismatch",
    "InvalidParameter",
    "InvalidSpec",
    "FactorizationFailure",
    "EigensolveFailure",
    "NotIrreducible",
    "NegativeEntry",
    "TooLarge",
    "OracleInconsistency",
]
