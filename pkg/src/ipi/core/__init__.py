"""
ipi 核心模块
============

配置、日志、异常层次与通用注册中心。
"""
