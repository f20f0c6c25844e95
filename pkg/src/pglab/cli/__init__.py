#!/usr/bin/env python3
"""
电源门控分析工具CLI模块
"""

from .main import main, create_cli_parser, cli_entry
from .commands import (
    GenMultCommand, StaCommand, GateCommand, SweepCommand, VerifyPaperCommand,
    FitCommand, CompareCommand, ConfigCommand
)

__all__ = [
    'main', 'create_cli_parser', 'cli_entry',
    'GenMultCommand', 'StaCommand', 'GateCommand', 'SweepCommand', 'VerifyPaperCommand',
    'FitCommand', 'CompareCommand', 'ConfigCommand'
]
