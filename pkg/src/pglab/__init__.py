#!/usr/bin/env python3
"""
pglab 电源门控分析工具

对组合逻辑网表做静态时序分析，按常规、CBSTD、DSTN 与可调睡眠晶体管单元
四种策略设计睡眠晶体管，并核算 IR 压降、延迟退化与平均功耗。
"""

__version__ = "1.0.0"
__description__ = "电源门控睡眠晶体管设计与分析工具"

from .config import (
    Config, get_config, set_config, load_config_from_file,
    Strategies, SUPPORTED_REPORT_FORMATS, DEFAULT_LIBRARY_FILE
)
from .config.params import load_device_params, parse_device_params, format_device_params

from .models import (
    PgLabError, DomainError, FileFormatError, NetlistError, ParamsFileError,
    InfeasibleError, ReportError, DeviceParams, Circuit, GatingPlan,
    parse_netlist, write_netlist, load_cell_library, generate_multiplier4x4, critical_path
)

from .reporting import (
    AnalysisSettings, AnalysisReport, run_strategy, compare_strategies,
    get_supported_strategies, load_paper_dataset, verify_paper_tables
)

from .utils import (
    ReportGenerator, emit_report, parse_report, get_logger, setup_logging
)


# 便捷函数
def default_library():
    """加载随包发布的单元库

    Example:
        >>> from pglab import default_library, generate_multiplier4x4
        >>> c = generate_multiplier4x4(default_library())
        >>> len(c.gates)
        28
    """
    with open(DEFAULT_LIBRARY_FILE, 'r', encoding='utf-8') as f:
        return load_cell_library(f.read())


def analyze(netlist_text: str, strategy: str, params_path=None, **options) -> AnalysisReport:
    """便捷的端到端分析函数

    Args:
        netlist_text: 网表文本
        strategy: 门控策略名
        params_path: 器件参数文件，缺省为随包参数
        **options: 传给 run_strategy 的覆盖项

    Returns:
        AnalysisReport: 分析报告

    Example:
        >>> from pglab import analyze, default_library, generate_multiplier4x4, write_netlist
        >>> text = write_netlist(generate_multiplier4x4(default_library()))
        >>> report = analyze(text, 'tunable', word='1000')
        >>> print(f"功耗降低: {report.derived['power_reduction_pct']:.2f}%")
    """
    c = parse_netlist(netlist_text)
    p = load_device_params(params_path)
    return run_strategy(c, strategy, p, AnalysisSettings.from_config(get_config()), **options)


# 导出的公共API
__all__ = [
    # 版本信息
    '__version__', '__description__',

    # 配置管理
    'Config', 'get_config', 'set_config', 'load_config_from_file',
    'Strategies', 'SUPPORTED_REPORT_FORMATS', 'DEFAULT_LIBRARY_FILE',
    'load_device_params', 'parse_device_params', 'format_device_params',

    # 模型
    'PgLabError', 'DomainError', 'FileFormatError', 'NetlistError', 'ParamsFileError',
    'InfeasibleError', 'ReportError', 'DeviceParams', 'Circuit', 'GatingPlan',
    'parse_netlist', 'write_netlist', 'load_cell_library', 'generate_multiplier4x4', 'critical_path',

    # 分析与报告
    'AnalysisSettings', 'AnalysisReport', 'run_strategy', 'compare_strategies',
    'get_supported_strategies', 'load_paper_dataset', 'verify_paper_tables',
    'ReportGenerator', 'emit_report', 'parse_report', 'get_logger', 'setup_logging',

    # 便捷函数
    'default_library', 'analyze'
]
