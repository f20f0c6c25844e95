#!/usr/bin/env python3
"""
电源门控分析工具辅助模块
"""

from .report_generator import (
    ReportGenerator, format_number,
    emit_report, parse_report, emit_sweep, parse_sweep,
    emit_rail, emit_sta, emit_fit, emit_verification, emit_comparison
)
from .logging_utils import (
    PgLabLogger, LogContextManager, ProgressLogger,
    get_logger, setup_logging, with_log_level, create_progress_logger
)

__all__ = [
    # 报告生成
    'ReportGenerator', 'format_number',
    'emit_report', 'parse_report', 'emit_sweep', 'parse_sweep',
    'emit_rail', 'emit_sta', 'emit_fit', 'emit_verification', 'emit_comparison',

    # 日志工具
    'PgLabLogger', 'LogContextManager', 'ProgressLogger',
    'get_logger', 'setup_logging', 'with_log_level', 'create_progress_logger'
]
