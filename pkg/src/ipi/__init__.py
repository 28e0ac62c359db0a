"""
ipi: 有限折扣 MDP 的动态规划求解库
==================================

提供值迭代、策略迭代、乐观策略迭代与非精确策略迭代 (iPI)，
以及用于策略评估线性方程组的迭代内层求解器、转移矩阵结构分析，
和动态 SIS 传染病 MDP 生成器。
"""

__version__ = "1.0.0"
