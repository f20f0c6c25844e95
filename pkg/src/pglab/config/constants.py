#!/usr/bin/env python3
"""
电源门控分析工具常量定义
"""

from pathlib import Path

# 项目根目录
PROJECT_ROOT = Path(__file__).parent.parent.parent.parent

# 随包发布的数据文件
PACKAGE_DATA_DIR = Path(__file__).parent.parent / "data"
DEFAULT_PARAMS_FILE = PACKAGE_DATA_DIR / "device_45nm.params"
DEFAULT_LIBRARY_FILE = PACKAGE_DATA_DIR / "cells_45nm.net"
PAPER_DATASET_FILE = PACKAGE_DATA_DIR / "paper_tables.yaml"

# 支持的输出格式
SUPPORTED_REPORT_FORMATS = ('json', 'csv')


class Strategies:
    """支持的电源门控策略"""
    CONVENTIONAL = "conventional"
    CBSTD = "cbstd"
    DSTN = "dstn"
    TUNABLE = "tunable"

    # 命令行简写
    ALIASES = {
        'conv': CONVENTIONAL,
        'conventional': CONVENTIONAL,
        'cbstd': CBSTD,
        'dstn': DSTN,
        'tunable': TUNABLE,
    }

    @classmethod
    def all_types(cls):
        return [cls.CONVENTIONAL, cls.CBSTD, cls.DSTN, cls.TUNABLE]

    @classmethod
    def resolve(cls, name: str) -> str:
        key = name.strip().lower()
        if key not in cls.ALIASES:
            raise ValueError(f"不支持的门控策略: {name}. 支持的策略: {sorted(cls.ALIASES)}")
        return cls.ALIASES[key]


class ClusterKind:
    """簇类型"""
    CRITICAL = "CRITICAL"
    NON_CRITICAL = "NON_CRITICAL"


class SleepMode:
    """睡眠晶体管类型"""
    FIXED = "FIXED"
    TUNABLE = "TUNABLE"


class LogicFunctions:
    """单元逻辑功能"""
    AND2 = "AND2"
    HA_SUM = "HA_SUM"
    HA_CARRY = "HA_CARRY"
    FA_SUM = "FA_SUM"
    FA_CARRY = "FA_CARRY"
    BUF = "BUF"
    HA = "HA"
    FA = "FA"

    # 输入/输出个数
    ARITY = {
        AND2: (2, 1),
        HA_SUM: (2, 1),
        HA_CARRY: (2, 1),
        FA_SUM: (3, 1),
        FA_CARRY: (3, 1),
        BUF: (1, 1),
        HA: (2, 2),
        FA: (3, 2),
    }

    @classmethod
    def all_types(cls):
        return list(cls.ARITY)


class DeviceDefaults:
    """器件模型默认值"""
    THERMAL_VOLTAGE = 0.0259
    # exp(1.8) 前置因子
    PREFACTOR_EXPONENT = 1.8
    PARAM_KEYS = ('mu0_cox', 'vth0', 'dvth', 'm', 'gamma_prime', 'eta', 'v_t', 'alpha', 'vdd')


class GatingDefaults:
    """门控相关默认值"""
    IR_FRACTION = 0.1
    ALPHA_DROP = 0.1
    DELAY_BUDGET = 1.10
    ST_LENGTH = 45e-9
    CONVENTIONAL_CANDIDATES = (135e-9, 270e-9, 400e-9, 540e-9, 700e-9)
    CBSTD_CANDIDATES = (100e-9, 135e-9, 270e-9, 400e-9)
    NC_WIDTH = 270e-9
    TUNABLE_UNIT = 135e-9
    DEFAULT_WORD = "1000"
    WORD_BITS = 4
    VST_TOLERANCE = 1e-9
    CONTROL_CELL = "AND2_CTRL"


class RailDefaults:
    """分布式睡眠晶体管网络默认值"""
    N_ROWS = 7
    R_RAIL = 1.0e5
    R_RAIL_CAP = 1.0e12
    ALLOWED_VIOLATIONS = 1


class PowerDefaults:
    """功耗默认值"""
    FREQ = 2.0e8
    ACTIVITY = 0.1588
    DUTY_ACTIVE = 0.5
    ST_CAP_PER_WIDTH = 1.5e-8


# 日志相关常量
class LoggingConstants:
    """日志相关常量"""
    DEFAULT_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    DEFAULT_LEVEL = 'INFO'
    SUPPORTED_LEVELS = ['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL']
    ROOT_LOGGER = 'pglab'
    FILE_MAX_BYTES = 10 * 1024 * 1024
    FILE_BACKUP_COUNT = 5


# 报告相关常量
class ReportConstants:
    """报告生成相关常量"""
    SIGNIFICANT_DIGITS = 6
    PERCENT_TOLERANCE = 0.01
    POWER_REDUCTION_TOLERANCE = 0.02
    CONSISTENCY_RTOL = 1e-9
    PASS = "PASS"
    FAIL = "FAIL"
    KNOWN_DISCREPANCY = "KNOWN_DISCREPANCY"
    INFEASIBLE = "INFEASIBLE"


# 错误码定义
class ErrorCodes:
    """错误码定义"""
    SUCCESS = 0
    INFEASIBLE = 1
    INPUT_ERROR = 2
    UNKNOWN_ERROR = 99


# 环境变量名称
class EnvVars:
    """环境变量名称"""
    PARAMS_FILE = "PGLAB_PARAMS"
    CONFIG_FILE = "PGLAB_CONFIG"
    LOG_LEVEL = "PGLAB_LOG_LEVEL"
