"""结构化日志与日志配置测试"""

import json
import logging

import numpy as np

from ipi.core.logging_config import setup_logging
from ipi.core.structured_logging import StructuredLogFormatter


def make_record(level=logging.INFO, **extra):
    record = logging.LogRecord("ipi.dp", level, __file__, 10, "外层迭代", None, None)
    for key, value in extra.items():
        setattr(record, key, value)
    return record


class TestStructuredLogFormatter:
    def test_solver_context_is_serialized(self):
        record = make_record(
            solver="ipi", outer_iter=np.int64(3), residual_inf=np.float64(1.5e-9), policy=np.arange(3)
        )

        entry = json.loads(StructuredLogFormatter().format(record))

        assert entry["message"] == "外层迭代"
        assert entry["levelname"] == "INFO"
        assert entry["name"] == "ipi.dp"
        assert entry["solver"] == "ipi"
        assert entry["outer_iter"] == 3
        assert entry["residual_inf"] == 1.5e-9
        assert entry["policy"] == [0, 1, 2]
        assert "lineno" not in entry

    def test_debug_records_carry_location(self):
        entry = json.loads(StructuredLogFormatter().format(make_record(logging.DEBUG)))

        assert entry["lineno"] == 10


class TestSetupLogging:
    def test_missing_config_falls_back(self, tmp_path):
        logger = setup_logging(tmp_path / "missing.yaml", "debug")

        assert logger.name == "ipi"
        assert logger.level == logging.DEBUG
        logger.setLevel(logging.NOTSET)

    def test_file_handler_directory_is_created(self, tmp_path):
        log_file = tmp_path / "logs" / "run.log"
        config = tmp_path / "logging.yaml"
        config.write_text(
            "\n".join(
                [
                    "version: 1",
                    "disable_existing_loggers: false",
                    "formatters:",
                    "  structured:",
                    "    (): ipi.core.structured_logging.StructuredLogFormatter",
                    "handlers:",
                    "  file:",
                    "    class: logging.FileHandler",
                    "    formatter: structured",
                    f"    filename: {log_file}",
                    "loggers:",
                    "  ipi:",
                    "    level: INFO",
                    "    handlers: [file]",
                    "    propagate: false",
                ]
            ),
            encoding="utf-8",
        )

        logger = setup_logging(config)
        logging.getLogger("ipi.dp").info("外层求解结束", extra={"terminated_by": "Tolerance"})
        for handler in logger.handlers:
            handler.flush()

        line = log_file.read_text(encoding="utf-8").strip().splitlines()[-1]
        assert json.loads(line)["terminated_by"] == "Tolerance"
        for handler in list(logger.handlers):
            handler.close()
            logger.removeHandler(handler)
        logger.propagate = True
