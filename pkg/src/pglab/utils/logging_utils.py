#!/usr/bin/env python3
"""
日志工具模块

控制台日志写到标准错误，标准输出只留给网表和报告数据。
"""

import logging
import logging.handlers
import os
import sys
import time
from pathlib import Path
from typing import Optional, Dict, Any, TextIO

from ..config import LoggingConstants, EnvVars


class ColoredFormatter(logging.Formatter):
    """级别名着色，只在目标流是终端时生效"""

    COLORS = {
        'DEBUG': '\033[36m',
        'INFO': '\033[32m',
        'WARNING': '\033[33m',
        'ERROR': '\033[31m',
        'CRITICAL': '\033[35m',
    }
    RESET = '\033[0m'

    def __init__(self, fmt: str, stream: TextIO):
        super().__init__(fmt)
        self.use_color = bool(getattr(stream, 'isatty', None) and stream.isatty())

    def format(self, record):
        if not self.use_color:
            return super().format(record)
        levelname = record.levelname
        record.levelname = f"{self.COLORS.get(levelname, '')}{levelname}{self.RESET}"
        try:
            return super().format(record)
        finally:
            record.levelname = levelname


class PgLabLogger:
    """pglab 日志管理器

    持有根日志器，按 logging 配置段设置级别、格式和可选的轮转日志文件。
    PGLAB_LOG_LEVEL 环境变量优先于配置中的级别。
    """

    def __init__(self, name: str = LoggingConstants.ROOT_LOGGER, stream: Optional[TextIO] = None):
        self.name = name
        self.stream = stream
        self.logger = logging.getLogger(name)
        self._configured = False

    @staticmethod
    def resolve_level(log_config: Dict[str, Any]) -> int:
        level = os.environ.get(EnvVars.LOG_LEVEL) or log_config.get('level', LoggingConstants.DEFAULT_LEVEL)
        return getattr(logging, str(level).upper(), logging.INFO)

    def configure(self, config: Optional[Dict[str, Any]] = None):
        """配置日志系统

        Args:
            config: logging 配置段，键为 level、format、file
        """
        if self._configured:
            return

        log_config = config or {}
        level = self.resolve_level(log_config)
        format_str = log_config.get('format', LoggingConstants.DEFAULT_FORMAT)

        self.logger.setLevel(level)
        for handler in list(self.logger.handlers):
            self.logger.removeHandler(handler)
            handler.close()

        # 每次配置时取当前的 sys.stderr，便于测试替换
        stream = self.stream or sys.stderr
        console = logging.StreamHandler(stream)
        console.setLevel(level)
        console.setFormatter(ColoredFormatter(format_str, stream))
        self.logger.addHandler(console)

        log_file = log_config.get('file')
        if log_file:
            self._add_file_handler(Path(log_file), format_str, level)

        self._configured = True
        self.logger.debug(f"日志系统已配置: 级别={logging.getLevelName(level)}, 文件={log_file or '无'}")

    def _add_file_handler(self, log_path: Path, format_str: str, level: int):
        try:
            log_path.parent.mkdir(parents=True, exist_ok=True)
            handler = logging.handlers.RotatingFileHandler(
                log_path,
                maxBytes=LoggingConstants.FILE_MAX_BYTES,
                backupCount=LoggingConstants.FILE_BACKUP_COUNT,
                encoding='utf-8'
            )
        except OSError as e:
            self.logger.warning(f"无法创建日志文件 {log_path}: {e}")
            return
        handler.setLevel(level)
        handler.setFormatter(logging.Formatter(format_str))
        self.logger.addHandler(handler)

    def get_logger(self, name: Optional[str] = None) -> logging.Logger:
        """获取子日志器，name 为空时返回根日志器"""
        if not self._configured:
            self.configure()
        return self.logger if name is None else self.logger.getChild(name)

    @classmethod
    def setup_from_config(cls, config: Dict[str, Any]) -> 'PgLabLogger':
        """从完整配置字典创建日志管理器"""
        manager = cls()
        manager.configure(config.get('logging', {}))
        return manager


class LogContextManager:
    """临时改变日志级别"""

    def __init__(self, logger: logging.Logger, level: int):
        self.logger = logger
        self.new_level = level
        self.old_level = logger.level

    def __enter__(self) -> logging.Logger:
        self.old_level = self.logger.level
        self.logger.setLevel(self.new_level)
        return self.logger

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.logger.setLevel(self.old_level)


class ProgressLogger:
    """扫描类任务的进度日志

    每一步以 DEBUG 记录，结束时以 INFO 记录总数和速率。
    """

    def __init__(self, logger: logging.Logger, total: int):
        self.logger = logger
        self.total = total
        self.current = 0
        self._start = time.monotonic()

    def update(self, message: str = ""):
        self.current += 1
        percentage = 100.0 * self.current / self.total if self.total else 100.0
        line = f"进度: {self.current}/{self.total} ({percentage:.1f}%)"
        self.logger.debug(f"{line} - {message}" if message else line)

    def finish(self, message: str = "完成"):
        elapsed = time.monotonic() - self._start
        rate = self.current / elapsed if elapsed > 0 else float('inf')
        self.logger.info(f"{message} - {self.current} 项, 用时 {elapsed:.2f}秒 ({rate:.1f} 项/秒)")


# 全局日志管理器
_global_logger_manager: Optional[PgLabLogger] = None


def get_logger(name: Optional[str] = None) -> logging.Logger:
    """获取全局日志器

    Args:
        name: 子日志器名称

    Returns:
        logging.Logger: 日志器实例
    """
    global _global_logger_manager
    if _global_logger_manager is None:
        _global_logger_manager = PgLabLogger()
        _global_logger_manager.configure()
    return _global_logger_manager.get_logger(name)


def setup_logging(config: Dict[str, Any]) -> PgLabLogger:
    """按完整配置字典重新设置全局日志

    Args:
        config: 包含 logging 段的配置字典
    """
    global _global_logger_manager
    _global_logger_manager = PgLabLogger.setup_from_config(config)
    return _global_logger_manager


def with_log_level(logger: logging.Logger, level: int) -> LogContextManager:
    return LogContextManager(logger, level)


def create_progress_logger(logger: logging.Logger, total: int) -> ProgressLogger:
    return ProgressLogger(logger, total)
