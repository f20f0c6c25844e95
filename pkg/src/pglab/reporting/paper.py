#!/usr/bin/env python3
"""
参考数据集与表格复核

从随包发布的 YAML 读取三张表和标量常数，重新计算每一个可由表内数据推出的数值，
逐行给出 PASS 或 KNOWN_DISCREPANCY（两边数值都打印，不做调和）。
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import yaml

from ..config.constants import PAPER_DATASET_FILE, ReportConstants
from ..models.base import ReportError
from ..models.gating import select_min_width, tunable_effective_width
from .metrics import delta_d_over_d, improvement_over_dbc, power_reduction, shift_from_dbc

logger = logging.getLogger(__name__)

NM = 1e-9
MV = 1e-3


@dataclass(frozen=True)
class TableRow:
    """宽度扫描表的一行，printed_pct 为表中印刷的百分比"""
    w_nm: float
    l_nm: float
    delay: float
    vst_mv: float
    printed_pct: float


@dataclass(frozen=True)
class ComparisonRow:
    """策略对比表的一行"""
    strategy: str
    label: str
    avg_power: float
    delay: float
    max_vst_mv: float
    improvement_pct: float
    vdd: float = 1.0
    w_nm: Optional[float] = None
    word: Optional[str] = None


@dataclass(frozen=True)
class PaperDataset:
    """只读参考数据集"""
    scalars: Dict[str, Any]
    conventional: Tuple[TableRow, ...]
    cbstd: Tuple[TableRow, ...]
    comparison: Tuple[ComparisonRow, ...]
    sweep_endpoints: Dict[str, float] = field(default_factory=dict)

    def comparison_row(self, strategy: str) -> ComparisonRow:
        for row in self.comparison:
            if row.strategy == strategy:
                return row
        raise ReportError(f"对比表中没有策略: {strategy}")

    def conventional_points(self) -> List[Tuple[float, float]]:
        """常规门控表的 (vST [V], 延迟 [s]) 数据点"""
        return [(row.vst_mv * MV, row.delay) for row in self.conventional]


def _table(raw: Dict[str, Any], key: str, pct_key: str) -> Tuple[TableRow, ...]:
    try:
        return tuple(TableRow(float(r['w_nm']), float(r['l_nm']), float(r['delay']),
                              float(r['vst_mv']), float(r[pct_key])) for r in raw[key])
    except (KeyError, TypeError, ValueError) as e:
        raise ReportError(f"数据集表 {key} 格式错误: {e}")


def load_paper_dataset(path: Optional[Path] = None) -> PaperDataset:
    """加载参考数据集

    Args:
        path: YAML 文件路径，缺省为随包数据

    Raises:
        ReportError: 文件缺少字段或字段类型不对
    """
    path = Path(path) if path else PAPER_DATASET_FILE
    with open(path, 'r', encoding='utf-8') as f:
        raw = yaml.safe_load(f) or {}

    try:
        scalars = dict(raw['scalars'])
        comparison = tuple(
            ComparisonRow(r['strategy'], r['label'], float(r['avg_power']), float(r['delay']),
                          float(r['max_vst_mv']), float(r['improvement_pct']), float(r.get('vdd', 1.0)),
                          r.get('w_nm'), r.get('word'))
            for r in raw['table_comparison'])
        endpoints = {k: float(v) for k, v in raw.get('sweep_endpoints', {}).items()}
        for key in ('d0', 'd_bc', 'budget', 'budget_limit', 'ungated_power',
                    'power_reduction_pct', 'delay_increase_pct', 'ir_fraction', 'vdd'):
            scalars[key] = float(scalars[key])
    except (KeyError, TypeError, ValueError) as e:
        raise ReportError(f"数据集格式错误 {path}: {e}")

    return PaperDataset(scalars, _table(raw, 'table_conventional', 'delta_d_pct'),
                        _table(raw, 'table_cbstd', 'shift_pct'), comparison, endpoints)


@dataclass(frozen=True)
class VerificationLine:
    """复核结果的一行"""
    name: str
    printed: str
    computed: str
    status: str
    note: str = ""


@dataclass
class VerificationReport:
    """复核报告"""
    lines: List[VerificationLine] = field(default_factory=list)

    @property
    def known_discrepancies(self) -> List[VerificationLine]:
        return [line for line in self.lines if line.status == ReportConstants.KNOWN_DISCREPANCY]

    @property
    def failures(self) -> List[VerificationLine]:
        return [line for line in self.lines if line.status == ReportConstants.FAIL]

    def count(self, status: str) -> int:
        return sum(1 for line in self.lines if line.status == status)

    def to_records(self) -> List[Dict[str, str]]:
        return [{'check': line.name, 'printed': line.printed, 'computed': line.computed,
                 'status': line.status, 'note': line.note} for line in self.lines]

    def to_text(self) -> str:
        width = max((len(line.name) for line in self.lines), default=0)
        out = [f"{line.status:<18} {line.name:<{width}}  printed={line.printed}  computed={line.computed}"
               + (f"  ({line.note})" if line.note else "")
               for line in self.lines]
        out.append(f"SUMMARY: {self.count(ReportConstants.PASS)} PASS, "
                   f"{len(self.known_discrepancies)} KNOWN_DISCREPANCY, {len(self.failures)} FAIL")
        return "\n".join(out) + "\n"


def _percent_line(report: VerificationReport, name: str, printed: float, computed: float,
                  tolerance: float):
    ok = abs(computed - printed) <= tolerance
    status = ReportConstants.PASS if ok else ReportConstants.KNOWN_DISCREPANCY
    note = f"±{tolerance:g} pp" if ok else f"差 {computed - printed:+.4f} pp，超出 ±{tolerance:g} pp"
    report.lines.append(VerificationLine(name, f"{printed:.2f}", f"{computed:.4f}", status, note))


def _check_line(report: VerificationReport, name: str, printed: str, computed: str, ok: bool,
                note: str = ""):
    status = ReportConstants.PASS if ok else ReportConstants.FAIL
    report.lines.append(VerificationLine(name, printed, computed, status, note))


def verify_paper_tables(ds: PaperDataset) -> VerificationReport:
    """复核参考数据集中所有可推导的数值

    Args:
        ds: 参考数据集

    Returns:
        VerificationReport: 每项一行，无副作用
    """
    report = VerificationReport()
    s = ds.scalars
    tol = ReportConstants.PERCENT_TOLERANCE

    for row in ds.conventional:
        _percent_line(report, f"conventional W={row.w_nm:g}nm Δd/d", row.printed_pct,
                      delta_d_over_d(row.delay, s['d0']), tol)
    for row in ds.cbstd:
        _percent_line(report, f"cbstd W={row.w_nm:g}nm shift from d_BC", row.printed_pct,
                      shift_from_dbc(row.delay, s['d_bc']), tol)
    for row in ds.comparison:
        _percent_line(report, f"{row.strategy} improvement over d_BC", row.improvement_pct,
                      improvement_over_dbc(row.delay, s['d_bc']), tol)

    limit = s['budget'] * s['d_bc']
    _check_line(report, "delay budget limit", f"{s['budget_limit']:.4e}", f"{limit:.5e}",
                f"{limit:.4e}" == f"{s['budget_limit']:.4e}", "5 位有效数字")

    tunable = ds.comparison_row('tunable')
    _percent_line(report, "tunable power reduction", s['power_reduction_pct'],
                  power_reduction(tunable.avg_power, s['ungated_power']),
                  ReportConstants.POWER_REDUCTION_TOLERANCE)
    _percent_line(report, "tunable delay increase", s['delay_increase_pct'],
                  delta_d_over_d(tunable.delay, s['d0']), tol)

    best = [row for row in ds.conventional if row.delay == s['d_bc']]
    _check_line(report, "d_BC is the conventional selection delay", f"{s['d_bc']:.4e}",
                ", ".join(f"W={r.w_nm:g}nm" for r in best) or "无", bool(best))

    widths = [row.w_nm for row in ds.conventional]
    chosen = select_min_width(widths, {r.w_nm: r.vst_mv * MV for r in ds.conventional},
                              s['ir_fraction'] * s['vdd'])
    matches_dbc = any(r.w_nm == chosen and r.delay == s['d_bc'] for r in ds.conventional)
    _check_line(report, "conventional table selection", "700nm", f"{chosen:g}nm", matches_dbc,
                f"表中数据, vST ≤ {s['ir_fraction']:.0%}·Vdd")

    widths = [row.w_nm for row in ds.cbstd]
    chosen = select_min_width(widths, {r.w_nm: r.delay for r in ds.cbstd}, limit)
    _check_line(report, "cbstd table selection", "400nm", f"{chosen:g}nm", chosen == 400,
                f"表中数据, 延迟 ≤ {s['budget']:g}·d_BC")

    unit = float(s.get('tunable_unit_nm', 135)) * NM
    word = str(s.get('nominal_word', '1000'))
    width = tunable_effective_width(word, unit)
    _check_line(report, f"tunable width of word {word}", "540nm", f"{width / NM:g}nm",
                math.isclose(width, 540 * NM, rel_tol=1e-12))

    ep = ds.sweep_endpoints
    if ep:
        trend = ep['power_last'] > ep['power_first'] and ep['delay_last'] < ep['delay_first']
        _check_line(report, "sweep trend 0001→1111",
                    f"P {ep['power_first']:.5e}→{ep['power_last']:.5e}, "
                    f"d {ep['delay_first']:.4e}→{ep['delay_last']:.4e}",
                    "功耗上升, 延迟下降" if trend else "趋势不符", trend)

    for line in report.known_discrepancies:
        logger.warning(f"已知不一致: {line.name}: 印刷值 {line.printed}, 计算值 {line.computed}")
    return report
