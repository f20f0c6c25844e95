#!/usr/bin/env python3
"""
电源门控分析工具主CLI入口
"""

import argparse
import sys
from typing import Optional, List

from .commands import (
    GenMultCommand, StaCommand, GateCommand, SweepCommand, VerifyPaperCommand,
    FitCommand, CompareCommand, ConfigCommand
)
from ..config import ErrorCodes
from ..models import InfeasibleError, PgLabError

# 子命令名 -> (命令类, 帮助, 是否带报告参数)
COMMANDS = {
    'gen-mult4x4': (GenMultCommand, '生成 4x4 阵列乘法器网表', True),
    'sta': (StaCommand, '静态时序分析，输出 d0 与关键路径', True),
    'gate': (GateCommand, '按指定策略设计睡眠晶体管并核算功耗', True),
    'sweep': (SweepCommand, '可调睡眠晶体管单元 16 个配置字扫描', True),
    'verify-paper': (VerifyPaperCommand, '复核随包参考数据中可推导的数值', True),
    'fit': (FitCommand, '标定延迟退化模型', True),
    'compare': (CompareCommand, '未门控基线与四种策略对比', True),
    'config': (ConfigCommand, '查看或生成配置文件', False),
}


def create_cli_parser() -> argparse.ArgumentParser:
    """创建CLI参数解析器"""
    from .. import __version__

    parser = argparse.ArgumentParser(
        prog='pglab',
        description='电源门控睡眠晶体管设计与分析工具',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
示例:
  # 生成乘法器网表并做静态时序分析
  pglab gen-mult4x4 | pglab sta -

  # 可调睡眠晶体管单元，配置字 1000
  pglab gate mult.net --strategy tunable --word 1000

  # DSTN，并写出各行虚拟地电压
  pglab gate mult.net --strategy dstn --rail-out rail.csv

  # 复核参考数据
  pglab verify-paper
        """
    )

    parser.add_argument(
        '--version',
        action='version',
        version=f'pglab v{__version__}'
    )

    subparsers = parser.add_subparsers(
        dest='command',
        help='可用命令',
        metavar='COMMAND'
    )

    for name, (command_cls, help_text, report) in COMMANDS.items():
        sub = subparsers.add_parser(name, help=help_text, description=help_text)
        command_cls.add_arguments(sub)
        command_cls().add_common_arguments(sub, report=report)

    return parser


def show_help_hint():
    """显示帮助提示"""
    print("使用 --help 查看详细帮助信息", file=sys.stderr)
    print("", file=sys.stderr)
    print("快速开始:", file=sys.stderr)
    print("  pglab gen-mult4x4 -o mult.net           # 生成网表", file=sys.stderr)
    print("  pglab gate mult.net --strategy cbstd    # 门控分析", file=sys.stderr)
    print("  pglab verify-paper                      # 复核参考数据", file=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    """主入口函数

    Args:
        argv: 命令行参数列表，如果为None则使用sys.argv[1:]

    Returns:
        int: 退出码，0 成功，1 不可行，2 输入错误，99 未知错误
    """
    parser = create_cli_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else ErrorCodes.INPUT_ERROR

    if not args.command:
        print("❌ 请指定要执行的命令", file=sys.stderr)
        show_help_hint()
        return ErrorCodes.INPUT_ERROR

    try:
        command_cls = COMMANDS[args.command][0]
        return command_cls().execute(args)

    except KeyboardInterrupt:
        print("\n❌ 用户中断操作", file=sys.stderr)
        return ErrorCodes.UNKNOWN_ERROR

    except InfeasibleError as e:
        print(f"❌ 无可行方案: {e}", file=sys.stderr)
        return ErrorCodes.INFEASIBLE

    except (PgLabError, OSError, ValueError) as e:
        print(f"❌ 输入错误: {e}", file=sys.stderr)
        return ErrorCodes.INPUT_ERROR

    except Exception as e:
        print(f"❌ 程序执行出错: {e}", file=sys.stderr)
        if getattr(args, 'verbose', False):
            import traceback
            traceback.print_exc()
        return ErrorCodes.UNKNOWN_ERROR


def cli_entry():
    """CLI入口点，用于setuptools entry_points"""
    sys.exit(main())


if __name__ == '__main__':
    sys.exit(main())
