#!/usr/bin/env python3
"""
派生指标、参考数据复核与策略分析
"""

from .metrics import delta_d_over_d, shift_from_dbc, improvement_over_dbc, power_reduction
from .paper import (
    TableRow, ComparisonRow, PaperDataset, VerificationLine, VerificationReport,
    load_paper_dataset, verify_paper_tables
)
from .analysis import (
    AnalysisSettings, AnalysisReport, Verdict, STRATEGY_RUNNERS,
    run_strategy, compare_strategies, get_supported_strategies, with_overrides
)

__all__ = [
    # 派生指标
    'delta_d_over_d', 'shift_from_dbc', 'improvement_over_dbc', 'power_reduction',

    # 参考数据
    'TableRow', 'ComparisonRow', 'PaperDataset', 'VerificationLine', 'VerificationReport',
    'load_paper_dataset', 'verify_paper_tables',

    # 策略分析
    'AnalysisSettings', 'AnalysisReport', 'Verdict', 'STRATEGY_RUNNERS',
    'run_strategy', 'compare_strategies', 'get_supported_strategies', 'with_overrides'
]
