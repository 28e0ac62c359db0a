"""
ipi 日志配置模块
================

从 logging_config.yaml 读取 dictConfig 配置并应用，
文件不存在或解析失败时回退到 basicConfig。
数据输出 (CSV / JSON) 走标准输出或文件，日志统一写到标准错误。
"""

import logging
import logging.config
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml

_FALLBACK_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def _ensure_log_dirs(config: Dict[str, Any]) -> None:
    """文件类 handler 的目录不存在时先创建"""
    for handler in (config.get("handlers") or {}).values():
        filename = handler.get("filename")
        if filename:
            Path(filename).parent.mkdir(parents=True, exist_ok=True)


def setup_logging(
    config_path: Union[str, Path] = "logging_config.yaml",
    log_level: Optional[str] = None,
) -> logging.Logger:
    """
    设置日志配置

    Args:
        config_path: dictConfig 格式的 YAML 文件路径
        log_level: 覆盖 ipi 日志器的级别 (例如 "DEBUG")

    Returns:
        ipi 根日志器
    """
    path = Path(config_path)
    try:
        if path.exists():
            with open(path, "r", encoding="utf-8") as f:
                config: Dict[str, Any] = yaml.safe_load(f)
            _ensure_log_dirs(config)
            logging.config.dictConfig(config)
        else:
            logging.basicConfig(level=logging.INFO, format=_FALLBACK_FORMAT)
    except (OSError, ValueError, yaml.YAMLError) as e:
        logging.basicConfig(level=logging.INFO, format=_FALLBACK_FORMAT)
        logging.getLogger(__name__).warning("日志配置失败，使用默认配置: %s", e)

    logger = logging.getLogger("ipi")
    if log_level:
        logger.setLevel(log_level.upper())
    logger.debug("日志系统初始化完成", extra={"config_path": str(path)})
    return logger


def get_logger(name: str) -> logging.Logger:
    """获取指定名称的 logger 实例"""
    return logging.getLogger(name)


__all__ = ["setup_logging", "get_logger"]
