#!/usr/bin/env python3
"""
报告生成工具

所有数值以 6 位有效数字的科学计数法字符串输出，字段顺序固定，
相同输入得到逐字节相同的文本。
"""

import io
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import pandas as pd

from ..config.constants import ReportConstants, SUPPORTED_REPORT_FORMATS
from ..models.base import ReportError
from ..models.gating import SweepRow
from ..models.rail_network import RailSolution
from ..models.timing import DelayFit, TimingResult
from ..reporting.analysis import DERIVED_KEYS, AnalysisReport, Verdict
from ..reporting.paper import VerificationReport

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ['word', 'eff_width_m', 'vgnd1_v', 'delay_s', 'avg_power_w', 'feasible']
RAIL_COLUMNS = ['node', 'v_volts', 'violator']
VERIFY_COLUMNS = ['check', 'printed', 'computed', 'status', 'note']
COMPARE_COLUMNS = ['strategy', 'st_width_m', 'delay_s', 'max_vst_v', 'p_avg_w',
                   'delta_d_over_d_pct', 'improvement_pct', 'power_reduction_pct', 'status']
REPORT_SCALARS = [('d0_s', 'd0'), ('delay_s', 'delay'), ('d_bc_s', 'd_bc'), ('max_vst_v', 'max_vst'),
                  ('p_avg_w', 'p_avg'), ('p_ungated_w', 'p_ungated')]


def format_number(x: Optional[float]) -> Optional[str]:
    """6 位有效数字的科学计数法"""
    if x is None:
        return None
    return f"{float(x):.{ReportConstants.SIGNIFICANT_DIGITS - 1}e}"


def _number(text: Any, what: str) -> Optional[float]:
    if text is None or text == "":
        return None
    try:
        value = float(text)
    except (TypeError, ValueError):
        raise ReportError(f"字段 {what} 不是数值: {text!r}")
    if not math.isfinite(value):
        raise ReportError(f"字段 {what} 不是有限数值: {text!r}")
    return value


def _check_format(fmt: str, extra: Sequence[str] = ()):
    if fmt not in SUPPORTED_REPORT_FORMATS and fmt not in extra:
        raise ReportError(f"不支持的输出格式: {fmt}. 支持的格式: {list(SUPPORTED_REPORT_FORMATS) + list(extra)}")


def _dump_json(data: Any) -> str:
    return json.dumps(data, ensure_ascii=False, indent=2) + "\n"


def _dump_csv(rows: List[Dict[str, Any]], columns: Sequence[str]) -> str:
    return pd.DataFrame(rows, columns=list(columns)).to_csv(index=False, lineterminator="\n")


def _read_csv(text: str) -> pd.DataFrame:
    try:
        return pd.read_csv(io.StringIO(text), dtype=str, keep_default_na=False)
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise ReportError(f"CSV 报告无法解析: {e}")


def _long_form(pairs: Iterable[Tuple[str, Any]]) -> str:
    return _dump_csv([{'field': k, 'value': v} for k, v in pairs], ['field', 'value'])


def _flag(value: Any) -> bool:
    return str(value).strip().lower() in ('true', '1', 'pass')


# 分析报告

def _report_pairs(r: AnalysisReport) -> List[Tuple[str, Any]]:
    pairs = [('strategy', r.strategy), ('word', r.word or "")]
    pairs += [(f"width.{cid}", format_number(w)) for cid, w in r.widths.items()]
    pairs += [(key, format_number(getattr(r, attr))) for key, attr in REPORT_SCALARS]
    pairs += [(f"derived.{key}", format_number(r.derived[key])) for key in DERIVED_KEYS]
    pairs += [(f"verdict.{v.name}", ReportConstants.PASS if v.passed else ReportConstants.FAIL)
              for v in r.verdicts]
    return pairs


def emit_report(r: AnalysisReport, fmt: str = 'json') -> str:
    """序列化分析报告，输出前先做自洽检查

    Args:
        r: 分析报告
        fmt: 'json' 或 'csv'（field,value 两列）

    Raises:
        ReportError: 派生值不自洽或格式不支持
    """
    _check_format(fmt)
    r.check_consistency()
    if fmt == 'csv':
        return _long_form(_report_pairs(r))

    data = {'strategy': r.strategy, 'word': r.word,
            'widths_m': {cid: format_number(w) for cid, w in r.widths.items()}}
    data.update({key: format_number(getattr(r, attr)) for key, attr in REPORT_SCALARS})
    data['derived'] = {key: format_number(r.derived[key]) for key in DERIVED_KEYS}
    data['verdicts'] = [{'name': v.name, 'passed': v.passed, 'detail': v.detail} for v in r.verdicts]
    return _dump_json(data)


def _build_report(strategy: str, word: Optional[str], widths: Dict[str, float],
                  scalars: Dict[str, Optional[float]], derived: Dict[str, Optional[float]],
                  verdicts: List[Verdict]) -> AnalysisReport:
    missing = [key for key, _ in REPORT_SCALARS if scalars.get(key) is None]
    if missing:
        raise ReportError(f"报告缺少字段: {', '.join(missing)}")
    r = AnalysisReport(strategy, widths, *(scalars[key] for key, _ in REPORT_SCALARS),
                       verdicts=verdicts, word=word or None)
    # 派生值由原始字段重算，文本中的派生值只需在打印精度内一致
    for key in DERIVED_KEYS:
        printed = derived.get(key)
        if printed is None:
            raise ReportError(f"报告缺少派生字段: {key}")
        if abs(printed - r.derived[key]) > ReportConstants.PERCENT_TOLERANCE:
            raise ReportError(f"派生字段 {key} 不自洽: 报告 {printed!r}, 重算 {r.derived[key]!r}")
    return r


def parse_report(text: str, fmt: str = 'json') -> AnalysisReport:
    """读回 emit_report 的输出

    Raises:
        ReportError: 文本无法解析或字段缺失
    """
    _check_format(fmt)
    if fmt == 'json':
        try:
            data = json.loads(text)
            verdicts = [Verdict(v['name'], bool(v['passed']), v.get('detail', ""))
                        for v in data.get('verdicts', [])]
            widths = {cid: _number(w, cid) for cid, w in data.get('widths_m', {}).items()}
            scalars = {key: _number(data.get(key), key) for key, _ in REPORT_SCALARS}
            derived = {key: _number(v, key) for key, v in data.get('derived', {}).items()}
            return _build_report(data['strategy'], data.get('word'), widths, scalars, derived, verdicts)
        except (json.JSONDecodeError, KeyError, TypeError) as e:
            raise ReportError(f"JSON 报告无法解析: {e}")

    df = _read_csv(text)
    if list(df.columns) != ['field', 'value']:
        raise ReportError(f"CSV 报告表头应为 field,value: {list(df.columns)}")
    strategy, word = None, None
    widths, scalars, derived, verdicts = {}, {}, {}, []
    for field, value in zip(df['field'], df['value']):
        if field == 'strategy':
            strategy = value
        elif field == 'word':
            word = value
        elif field.startswith('width.'):
            widths[field[len('width.'):]] = _number(value, field)
        elif field.startswith('derived.'):
            derived[field[len('derived.'):]] = _number(value, field)
        elif field.startswith('verdict.'):
            verdicts.append(Verdict(field[len('verdict.'):], value == ReportConstants.PASS))
        else:
            scalars[field] = _number(value, field)
    if strategy is None:
        raise ReportError("CSV 报告缺少 strategy 字段")
    return _build_report(strategy, word, widths, scalars, derived, verdicts)


# 扫描表

def _sweep_record(row: SweepRow) -> Dict[str, Any]:
    return {'word': row.word, 'eff_width_m': format_number(row.eff_width), 'vgnd1_v': format_number(row.vgnd1),
            'delay_s': format_number(row.delay), 'avg_power_w': format_number(row.avg_power),
            'feasible': row.feasible}


def emit_sweep(rows: Sequence[SweepRow], fmt: str = 'csv') -> str:
    """可调单元扫描表，可直接用于绘图"""
    _check_format(fmt)
    records = [_sweep_record(row) for row in rows]
    if fmt == 'csv':
        return _dump_csv(records, SWEEP_COLUMNS)
    return _dump_json(records)


def parse_sweep(text: str, fmt: str = 'csv') -> List[SweepRow]:
    """读回 emit_sweep 的输出"""
    _check_format(fmt)
    if fmt == 'csv':
        df = _read_csv(text)
        if list(df.columns) != SWEEP_COLUMNS:
            raise ReportError(f"扫描表表头应为 {','.join(SWEEP_COLUMNS)}: {list(df.columns)}")
        records = df.to_dict('records')
    else:
        try:
            records = json.loads(text)
        except json.JSONDecodeError as e:
            raise ReportError(f"JSON 扫描表无法解析: {e}")
    try:
        return [SweepRow(str(r['word']), _number(r['eff_width_m'], 'eff_width_m'),
                         _number(r['vgnd1_v'], 'vgnd1_v'), _number(r['delay_s'], 'delay_s'),
                         _number(r['avg_power_w'], 'avg_power_w'), _flag(r['feasible']))
                for r in records]
    except (KeyError, TypeError) as e:
        raise ReportError(f"扫描表字段缺失: {e}")


# 其他报告

def emit_rail(sol: RailSolution, limit: float, fmt: str = 'csv') -> str:
    """虚拟地轨节点电压，violator 标记 v > limit 的节点"""
    _check_format(fmt)
    records = [{'node': k, 'v_volts': format_number(v), 'violator': v > limit} for k, v in enumerate(sol.v)]
    if fmt == 'csv':
        return _dump_csv(records, RAIL_COLUMNS)
    return _dump_json({'limit_v': format_number(limit), 'max_v': format_number(sol.max_v),
                       'residual': format_number(sol.residual), 'nodes': records})


def emit_sta(tr: TimingResult, fmt: str = 'json') -> str:
    """STA 结果：d0、关键路径与各门到达时间"""
    _check_format(fmt)
    arrivals = sorted(tr.per_gate_arrival.items())
    if fmt == 'csv':
        pairs = [('d0_s', format_number(tr.d0)), ('critical_path', " ".join(tr.critical_path))]
        pairs += [(f"arrival.{g}", format_number(t)) for g, t in arrivals]
        return _long_form(pairs)
    return _dump_json({'d0_s': format_number(tr.d0), 'critical_path': list(tr.critical_path),
                       'arrival_s': {g: format_number(t) for g, t in arrivals}})


def emit_fit(fit: DelayFit, fmt: str = 'json') -> str:
    """延迟模型拟合结果"""
    _check_format(fmt)
    pairs = [('vth_fit', format_number(fit.vth_fit)), ('alpha_fit', format_number(fit.alpha_fit)),
             ('d0_ref_s', format_number(fit.d0_ref)), ('max_rel_error', format_number(fit.residual)),
             ('vdd_v', format_number(fit.vdd))]
    if fmt == 'csv':
        return _long_form(pairs)
    return _dump_json(dict(pairs))


def emit_verification(report: VerificationReport, fmt: str = 'text') -> str:
    """复核报告，text 格式为逐行摘要"""
    _check_format(fmt, extra=('text',))
    if fmt == 'text':
        return report.to_text()
    records = report.to_records()
    if fmt == 'csv':
        return _dump_csv(records, VERIFY_COLUMNS)
    summary = {ReportConstants.PASS: report.count(ReportConstants.PASS),
               ReportConstants.KNOWN_DISCREPANCY: len(report.known_discrepancies),
               ReportConstants.FAIL: len(report.failures)}
    return _dump_json({'lines': records, 'summary': summary})


def emit_comparison(rows: Sequence[Dict[str, Any]], fmt: str = 'csv') -> str:
    """策略对比表"""
    _check_format(fmt)
    records = [{col: (row.get(col) if col in ('strategy', 'status') else format_number(row.get(col)))
                for col in COMPARE_COLUMNS} for row in rows]
    if fmt == 'csv':
        return _dump_csv(records, COMPARE_COLUMNS)
    return _dump_json(records)


class ReportGenerator:
    """报告写出器：按格式渲染并写到文件或标准输出"""

    def __init__(self, fmt: str = 'json', output: Optional[Path] = None):
        """初始化报告生成器

        Args:
            fmt: 输出格式
            output: 输出文件，None 表示标准输出
        """
        self.fmt = fmt
        self.output = Path(output) if output else None
        self.logger = logging.getLogger(__name__)

    def write(self, text: str) -> Optional[Path]:
        """写出报告文本

        Returns:
            Optional[Path]: 写入的文件路径，写到标准输出时为 None
        """
        if self.output is None:
            sys.stdout.write(text)
            sys.stdout.flush()
            return None

        self.output.parent.mkdir(parents=True, exist_ok=True)
        with open(self.output, 'w', encoding='utf-8', newline='') as f:
            f.write(text)
        self.logger.info(f"报告已保存至: {self.output}")
        return self.output

    def analysis(self, r: AnalysisReport) -> Optional[Path]:
        return self.write(emit_report(r, self.fmt))

    def sweep(self, rows: Sequence[SweepRow]) -> Optional[Path]:
        return self.write(emit_sweep(rows, self.fmt))

    def sta(self, tr: TimingResult) -> Optional[Path]:
        return self.write(emit_sta(tr, self.fmt))

    def fit(self, fit: DelayFit) -> Optional[Path]:
        return self.write(emit_fit(fit, self.fmt))

    def verification(self, report: VerificationReport) -> Optional[Path]:
        return self.write(emit_verification(report, self.fmt))

    def comparison(self, rows: Sequence[Dict[str, Any]]) -> Optional[Path]:
        return self.write(emit_comparison(rows, self.fmt))
