#!/usr/bin/env python3
"""
电源门控分析工具配置模块
"""

from .settings import Config, get_config, set_config, load_config_from_file
from .constants import (
    PROJECT_ROOT, PACKAGE_DATA_DIR, DEFAULT_PARAMS_FILE, DEFAULT_LIBRARY_FILE,
    PAPER_DATASET_FILE, SUPPORTED_REPORT_FORMATS,
    Strategies, ClusterKind, SleepMode, LogicFunctions,
    DeviceDefaults, GatingDefaults, RailDefaults, PowerDefaults,
    LoggingConstants, ReportConstants, ErrorCodes, EnvVars
)

__all__ = [
    # 配置管理
    'Config', 'get_config', 'set_config', 'load_config_from_file',

    # 路径常量
    'PROJECT_ROOT', 'PACKAGE_DATA_DIR', 'DEFAULT_PARAMS_FILE', 'DEFAULT_LIBRARY_FILE',
    'PAPER_DATASET_FILE', 'SUPPORTED_REPORT_FORMATS',

    # 领域常量
    'Strategies', 'ClusterKind', 'SleepMode', 'LogicFunctions',
    'DeviceDefaults', 'GatingDefaults', 'RailDefaults', 'PowerDefaults',

    # 系统常量
    'LoggingConstants', 'ReportConstants', 'ErrorCodes', 'EnvVars'
]
