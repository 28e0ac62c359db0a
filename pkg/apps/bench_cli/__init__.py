"""ipi 基准命令行工具"""
