"""
结构化日志格式化器模块

基于 json-log-formatter 输出 JSON 格式的日志，每条记录一行，
包含时间戳、级别、日志器名称、消息，以及通过 extra= 传入的求解器上下文
(solver, outer_iter, residual_inf, inner_iters, elapsed_s, n, m, gamma 等)。
"""

import logging
from datetime import datetime, timezone
from typing import Any, Dict

import json_log_formatter
import numpy as np


class StructuredLogFormatter(json_log_formatter.JSONFormatter):
    """
    结构化日志格式化器

    输出字段：
    - timestamp: ISO 8601 格式的时间戳 (UTC)
    - levelname: 日志级别
    - name: 日志器名称
    - message: 日志消息
    - 其余 extra 字段原样输出，numpy 标量和数组转换为普通 JSON 值
    """

    def json_record(
        self, message: str, extra: Dict[str, Any], record: logging.LogRecord
    ) -> Dict[str, Any]:
        log_entry: Dict[str, Any] = {
            "timestamp": datetime.fromtimestamp(record.created, tz=timezone.utc).isoformat(),
            "levelname": record.levelname,
            "name": record.name,
            "message": message,
        }
        # DEBUG 级别附带源码位置
        if record.levelno == logging.DEBUG:
            log_entry["filename"] = record.filename
            log_entry["lineno"] = record.lineno
        log_entry.update(extra)
        if record.exc_info:
            log_entry["exception"] = self.formatException(record.exc_info)
        return log_entry

    def to_json(self, record: Dict[str, Any]) -> str:
        try:
            return self.json_lib.dumps(
                record,
                ensure_ascii=False,
                separators=(",", ":"),
                default=self._json_serializer,
            )
        except (TypeError, ValueError, OverflowError) as e:
            fallback_entry = {
                "timestamp": record.get("timestamp"),
                "levelname": "ERROR",
                "name": "structured_log_formatter",
                "message": f"日志序列化失败: {e}",
                "original_message": str(record.get("message", "")),
            }
            return self.json_lib.dumps(fallback_entry, ensure_ascii=False)

    @staticmethod
    def _json_serializer(obj: Any) -> Any:
        """处理 numpy 与时间类型"""
        if isinstance(obj, np.generic):
            return obj.item()
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, datetime):
            return obj.isoformat()
        return str(obj)


__all__ = ["StructuredLogFormatter"]
