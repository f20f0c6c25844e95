#!/usr/bin/env python3
"""
CLI命令实现
"""

import argparse
import io
import logging
import sys
from pathlib import Path
from typing import List, Optional

import pandas as pd
import yaml

from ..config import (
    get_config, load_config_from_file, DEFAULT_LIBRARY_FILE,
    SUPPORTED_REPORT_FORMATS, LoggingConstants, ReportConstants, ErrorCodes, Strategies
)
from ..config.params import load_device_params, resolve_params_path
from ..models import (
    Circuit, DeviceParams, FileFormatError, cbstd_partition, critical_path, fit_delay_model,
    generate_multiplier4x4, load_cell_library, parse_netlist, tunable_sweep, write_netlist,
    all_words
)
from ..reporting import (
    AnalysisSettings, compare_strategies, load_paper_dataset, run_strategy, verify_paper_tables,
    with_overrides
)
from ..utils import (
    ReportGenerator, emit_rail, setup_logging, get_logger, create_progress_logger, with_log_level
)


def float_list(text: str) -> List[float]:
    """逗号分隔的浮点数列表，如 135e-9,270e-9"""
    try:
        values = [float(item) for item in text.split(',') if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"无法解析的数值列表: {text}")
    if not values:
        raise argparse.ArgumentTypeError("数值列表为空")
    return values


class BaseCommand:
    """命令基类"""

    # 子类覆盖：默认输出格式与可选格式
    default_format: Optional[str] = None
    formats = SUPPORTED_REPORT_FORMATS

    def __init__(self):
        self.logger = None

    def setup_logging(self, args):
        """设置日志系统"""
        config = get_config()
        log_level = getattr(args, 'log_level', None)
        if log_level:
            config.set('logging.level', log_level)
        setup_logging({'logging': config.get_logging_config()})
        self.logger = get_logger(self.__class__.__name__)

    def add_common_arguments(self, parser: argparse.ArgumentParser, report: bool = True):
        """添加通用参数"""
        parser.add_argument(
            '--config', '-c',
            type=Path,
            help='配置文件路径 (YAML或JSON格式)'
        )
        parser.add_argument(
            '--log-level',
            choices=LoggingConstants.SUPPORTED_LEVELS,
            help='日志级别'
        )
        parser.add_argument(
            '--verbose', '-v',
            action='store_true',
            help='详细输出 (相当于 --log-level DEBUG)'
        )
        if not report:
            return
        parser.add_argument(
            '--params',
            type=Path,
            help='器件参数文件 (默认: PGLAB_PARAMS 或随包 45nm 参数)'
        )
        parser.add_argument(
            '--format',
            choices=list(self.formats),
            help=f'输出格式 (默认: {self.default_format or "配置中的 output.format"})'
        )
        parser.add_argument(
            '--out', '-o',
            type=Path,
            help='输出文件路径 (默认: 标准输出)'
        )

    def load_config(self, args):
        """加载配置"""
        if args.verbose:
            args.log_level = 'DEBUG'

        if args.config:
            if not args.config.exists():
                raise FileNotFoundError(f"配置文件不存在: {args.config}")
            load_config_from_file(args.config)

    def execute(self, args) -> int:
        self.load_config(args)
        self.setup_logging(args)
        return self.run(args)

    def run(self, args) -> int:
        raise NotImplementedError

    # 辅助方法

    def output_format(self, args) -> str:
        output = get_config().get_output_config()
        return args.format or self.default_format or output.get('format', 'json')

    def reporter(self, args) -> ReportGenerator:
        return ReportGenerator(self.output_format(args), args.out)

    def device_params(self, args) -> DeviceParams:
        path = resolve_params_path(args.params, get_config().get_device_config().get('params_file'))
        self.logger.debug(f"器件参数文件: {path}")
        return load_device_params(path)

    def settings(self) -> AnalysisSettings:
        return AnalysisSettings.from_config(get_config())

    def cell_library(self):
        path = Path(get_config().get_device_config().get('library_file') or DEFAULT_LIBRARY_FILE)
        with open(path, 'r', encoding='utf-8') as f:
            return load_cell_library(f.read())

    def read_netlist(self, source: str) -> Circuit:
        """读取网表，'-' 表示标准输入"""
        if source == '-':
            text = sys.stdin.read()
        else:
            with open(source, 'r', encoding='utf-8') as f:
                text = f.read()
        c = parse_netlist(text)
        self.logger.info(f"网表: {len(c.gates)} 个门, {len(c.primary_inputs)} 个输入, "
                         f"{len(c.primary_outputs)} 个输出")
        return c

    @staticmethod
    def add_netlist_argument(parser: argparse.ArgumentParser):
        parser.add_argument('netlist', help="网表文件路径，'-' 表示标准输入")


class GenMultCommand(BaseCommand):
    """生成 4x4 阵列乘法器网表"""

    @staticmethod
    def add_arguments(parser: argparse.ArgumentParser):
        parser.add_argument(
            '--rows',
            type=int,
            help='行数 (默认: 配置中的 rail.n_rows)'
        )

    def run(self, args) -> int:
        settings = self.settings()
        c = generate_multiplier4x4(self.cell_library(), args.rows or settings.n_rows)
        self.logger.info(f"🔧 已生成 4x4 乘法器: {len(c.gates)} 个门")
        ReportGenerator(output=args.out).write(write_netlist(c))
        return ErrorCodes.SUCCESS


class StaCommand(BaseCommand):
    """静态时序分析命令"""

    @staticmethod
    def add_arguments(parser: argparse.ArgumentParser):
        BaseCommand.add_netlist_argument(parser)

    def run(self, args) -> int:
        c = self.read_netlist(args.netlist)
        p = self.device_params(args)
        tr = critical_path(c, p, self.settings().effective_vth(p))
        self.logger.info(f"⏱️ d0 = {tr.d0:.6g}s, 关键路径: {' -> '.join(tr.critical_path)}")
        self.reporter(args).sta(tr)
        return ErrorCodes.SUCCESS


class GateCommand(BaseCommand):
    """门控策略分析命令"""

    @staticmethod
    def add_arguments(parser: argparse.ArgumentParser):
        BaseCommand.add_netlist_argument(parser)
        parser.add_argument(
            '--strategy', '-s',
            required=True,
            choices=sorted(Strategies.ALIASES),
            help='门控策略'
        )
        parser.add_argument(
            '--word',
            type=str,
            help='可调单元配置字 B3B2B1B0 (tunable)'
        )
        parser.add_argument(
            '--w',
            type=float,
            dest='width',
            help='指定睡眠晶体管宽度 (m)；tunable 策略下为单位宽度'
        )
        parser.add_argument(
            '--candidates',
            type=float_list,
            help='候选宽度列表 (m)，逗号分隔'
        )
        parser.add_argument(
            '--rows',
            type=int,
            help='DSTN 行数 (默认: 网表行标记或配置中的 rail.n_rows)'
        )
        parser.add_argument(
            '--rail-out',
            type=Path,
            help='DSTN 节点电压 CSV 输出路径'
        )

    def run(self, args) -> int:
        strategy = Strategies.resolve(args.strategy)
        c = self.read_netlist(args.netlist)
        p = self.device_params(args)
        settings = self.settings()

        options = {'n_rows': args.rows}
        if strategy == Strategies.TUNABLE:
            options.update(word=args.word, w_unit=args.width)
        else:
            if args.word:
                self.logger.warning(f"--word 只用于 tunable 策略，{strategy} 忽略该参数")
            options['candidates'] = [args.width] if args.width else args.candidates

        self.logger.info(f"🚀 运行门控策略: {strategy}")
        report = run_strategy(c, strategy, p, settings, **options)
        self._show_summary(report)
        self.reporter(args).analysis(report)

        if args.rail_out:
            if report.rail is None:
                self.logger.warning("--rail-out 只对 dstn 策略有效，未写出节点电压")
            else:
                ReportGenerator(output=args.rail_out).write(
                    emit_rail(report.rail.solution, report.rail.verdict.limit, 'csv'))
        return ErrorCodes.SUCCESS

    def _show_summary(self, report):
        """显示分析结果摘要"""
        widths = ", ".join(f"{cid}={w * 1e9:g}nm" for cid, w in report.widths.items())
        self.logger.info(f"📊 {report.strategy}: {widths}")
        self.logger.info(f"  延迟 {report.delay:.6g}s (d0 {report.d0:.6g}s, d_BC {report.d_bc:.6g}s)")
        self.logger.info(f"  最大 vST {report.max_vst:.6g}V, 平均功耗 {report.p_avg:.6g}W, "
                         f"降低 {report.derived['power_reduction_pct']:.2f}%")
        for verdict in report.verdicts:
            mark = "✅" if verdict.passed else "❌"
            self.logger.info(f"  {mark} {verdict.name}: {verdict.detail}")


class SweepCommand(BaseCommand):
    """可调单元 16 个配置字扫描"""

    default_format = 'csv'

    @staticmethod
    def add_arguments(parser: argparse.ArgumentParser):
        BaseCommand.add_netlist_argument(parser)
        parser.add_argument(
            '--unit',
            type=float,
            help='单位宽度 (m) (默认: 配置中的 gating.tunable_unit)'
        )

    def run(self, args) -> int:
        c = self.read_netlist(args.netlist)
        p = self.device_params(args)
        settings = with_overrides(self.settings(), tunable_unit=args.unit)
        vth = settings.effective_vth(p)

        tr = critical_path(c, p, vth)
        clusters = cbstd_partition(c, tr, settings.n_nc, settings.current_scale)
        progress = create_progress_logger(self.logger, len(all_words()))
        # 非关键簇宽度固定，越限警告会在每个配置字上重复
        with with_log_level(logging.getLogger(tunable_sweep.__module__), logging.ERROR):
            rows = tunable_sweep(c, tr, clusters, settings.tunable_unit, p, settings.power_params(p.vdd),
                                 settings.nc_width, vth, settings.alpha_drop, settings.st_length,
                                 c.cells.get(settings.control_cell), progress.update)
        progress.finish("扫描完成")
        feasible = [row for row in rows if row.feasible]
        fastest = min(feasible, key=lambda row: row.delay)
        self.logger.info(f"可行配置字 {len(feasible)}/{len(rows)}, 最快 {fastest.word}: 延迟={fastest.delay:.6g}s")
        self.reporter(args).sweep(rows)
        return ErrorCodes.SUCCESS


class VerifyPaperCommand(BaseCommand):
    """复核随包参考数据"""

    default_format = 'text'
    formats = ('text',) + SUPPORTED_REPORT_FORMATS

    @staticmethod
    def add_arguments(parser: argparse.ArgumentParser):
        parser.add_argument(
            '--dataset',
            type=Path,
            help='参考数据 YAML (默认: 随包数据)'
        )

    def run(self, args) -> int:
        report = verify_paper_tables(load_paper_dataset(args.dataset))
        self.reporter(args).verification(report)
        if report.failures:
            self.logger.error(f"❌ {len(report.failures)} 项复核失败")
            return ErrorCodes.INPUT_ERROR
        self.logger.info(f"✅ 复核完成: {report.count(ReportConstants.PASS)} 项通过, "
                         f"{len(report.known_discrepancies)} 项已知不一致")
        return ErrorCodes.SUCCESS


class FitCommand(BaseCommand):
    """延迟退化模型拟合"""

    @staticmethod
    def add_arguments(parser: argparse.ArgumentParser):
        parser.add_argument(
            '--rows-csv',
            type=Path,
            help='数据行 CSV，列为 v_st,delay (默认: 参考数据中的常规门控表)'
        )
        parser.add_argument(
            '--d0',
            type=float,
            help='未门控参考延迟 (s) (默认: 参考数据中的 d0)'
        )

    def run(self, args) -> int:
        ds = load_paper_dataset()
        rows = self._read_rows(args.rows_csv) if args.rows_csv else ds.conventional_points()
        d0 = args.d0 or ds.scalars['d0']
        fit_config = get_config().get_timing_config().get('fit', {})

        fit = fit_delay_model(rows, d0, ds.scalars['vdd'], **fit_config)
        self.logger.info(f"📈 拟合 vth={fit.vth_fit:.6g}V, α={fit.alpha_fit:.6g}, "
                         f"最大相对误差 {fit.residual:.3%}")
        self.reporter(args).fit(fit)
        return ErrorCodes.SUCCESS

    @staticmethod
    def _read_rows(path: Path):
        with open(path, 'r', encoding='utf-8') as f:
            text = f.read()
        try:
            df = pd.read_csv(io.StringIO(text))
            return list(zip(df['v_st'].astype(float), df['delay'].astype(float)))
        except (KeyError, ValueError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
            raise FileFormatError(f"数据行 CSV 需要 v_st,delay 两列: {e}")


class CompareCommand(BaseCommand):
    """策略对比命令"""

    default_format = 'csv'

    @staticmethod
    def add_arguments(parser: argparse.ArgumentParser):
        BaseCommand.add_netlist_argument(parser)

    def run(self, args) -> int:
        c = self.read_netlist(args.netlist)
        p = self.device_params(args)
        rows = compare_strategies(c, p, self.settings())
        self._show_comparison_summary(rows)
        self.reporter(args).comparison(rows)
        return ErrorCodes.SUCCESS

    def _show_comparison_summary(self, rows):
        self.logger.info("📊 策略对比摘要:")
        for row in rows:
            if row['p_avg_w'] is None:
                self.logger.info(f"  {row['strategy']}: {row['status']}")
            else:
                self.logger.info(f"  {row['strategy']}: 延迟 {row['delay_s']:.6g}s, "
                                 f"功耗 {row['p_avg_w']:.6g}W ({row['status']})")


class ConfigCommand(BaseCommand):
    """配置管理命令"""

    @staticmethod
    def add_arguments(parser: argparse.ArgumentParser):
        """添加配置命令参数"""
        subparsers = parser.add_subparsers(dest='config_action', help='配置操作')

        show_parser = subparsers.add_parser('show', help='显示当前配置')
        show_parser.add_argument(
            '--key', '-k',
            type=str,
            help='显示特定配置项 (支持点分割路径，如 gating.ir_fraction)'
        )

        generate_parser = subparsers.add_parser('generate', help='生成默认配置文件')
        generate_parser.add_argument(
            '--output', '-o',
            type=Path,
            default=Path('config.yaml'),
            help='输出文件路径 (默认: config.yaml)'
        )

    def run(self, args) -> int:
        """执行配置命令"""
        if args.config_action == 'show':
            return self._show_config(args)
        elif args.config_action == 'generate':
            return self._generate_config(args)
        self.logger.error("未指定配置操作，使用 --help 查看可用操作")
        return ErrorCodes.INPUT_ERROR

    def _show_config(self, args) -> int:
        """显示配置"""
        config = get_config()
        if args.key:
            value = config.get(args.key)
            if value is None:
                self.logger.error(f"配置项 '{args.key}' 不存在")
                return ErrorCodes.INPUT_ERROR
            sys.stdout.write(yaml.safe_dump({args.key: value}, default_flow_style=False, allow_unicode=True))
        else:
            sys.stdout.write(yaml.safe_dump(config.config, default_flow_style=False,
                                            allow_unicode=True, indent=2))
        return ErrorCodes.SUCCESS

    def _generate_config(self, args) -> int:
        """生成默认配置文件，格式由扩展名决定"""
        get_config().save_config(args.output)
        self.logger.info(f"默认配置文件已生成: {args.output}")
        return ErrorCodes.SUCCESS
