#!/usr/bin/env python3
"""
策略分析编排

把 STA、d_BC、各策略选宽与功耗核算串成一次完整分析，生成 AnalysisReport。
"""

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

from ..config.constants import (
    GatingDefaults, PowerDefaults, RailDefaults, ReportConstants, Strategies
)
from ..config.settings import Config
from ..models.base import DeviceParams, InfeasibleError, ReportError
from ..models.gating import (
    GatingPlan, cbstd_gating, cbstd_partition, conventional_gating, tunable_plan
)
from ..models.netlist import Circuit, RowAssignment, assign_rows, row_assignment_from_tags
from ..models.power import PowerParams, PowerReport, average_power
from ..models.rail_network import DstnResult, dstn_plan, dstn_size
from ..models.timing import TimingResult, critical_path
from .metrics import delta_d_over_d, improvement_over_dbc, power_reduction, shift_from_dbc

logger = logging.getLogger(__name__)

DERIVED_KEYS = ('delta_d_over_d_pct', 'shift_from_dbc_pct', 'improvement_pct', 'power_reduction_pct')


@dataclass(frozen=True)
class AnalysisSettings:
    """一次分析用到的全部配置项"""
    vth: Optional[float] = None
    ir_fraction: float = GatingDefaults.IR_FRACTION
    alpha_drop: float = GatingDefaults.ALPHA_DROP
    st_length: float = GatingDefaults.ST_LENGTH
    conventional_candidates: Tuple[float, ...] = GatingDefaults.CONVENTIONAL_CANDIDATES
    cbstd_candidates: Tuple[float, ...] = GatingDefaults.CBSTD_CANDIDATES
    delay_budget: float = GatingDefaults.DELAY_BUDGET
    n_nc: int = 1
    nc_width: float = GatingDefaults.NC_WIDTH
    tunable_unit: float = GatingDefaults.TUNABLE_UNIT
    word: str = GatingDefaults.DEFAULT_WORD
    current_scale: float = 1.0
    control_cell: str = GatingDefaults.CONTROL_CELL
    n_rows: int = RailDefaults.N_ROWS
    r_rail: float = RailDefaults.R_RAIL
    allowed_violations: int = RailDefaults.ALLOWED_VIOLATIONS
    dstn_candidates: Tuple[float, ...] = GatingDefaults.CONVENTIONAL_CANDIDATES
    freq: float = PowerDefaults.FREQ
    activity: float = PowerDefaults.ACTIVITY
    duty_active: float = PowerDefaults.DUTY_ACTIVE
    st_cap_per_width: float = PowerDefaults.ST_CAP_PER_WIDTH

    @classmethod
    def from_config(cls, config: Config) -> 'AnalysisSettings':
        """从 Config 读取各段配置"""
        gating = config.get_gating_config()
        rail = config.get_rail_config()
        power = config.get_power_config()
        defaults = cls()
        return cls(
            vth=config.get_timing_config().get('vth'),
            ir_fraction=float(gating.get('ir_fraction', defaults.ir_fraction)),
            alpha_drop=float(gating.get('alpha_drop', defaults.alpha_drop)),
            st_length=float(gating.get('st_length', defaults.st_length)),
            conventional_candidates=tuple(float(w) for w in gating.get(
                'conventional_candidates', defaults.conventional_candidates)),
            cbstd_candidates=tuple(float(w) for w in gating.get('cbstd_candidates', defaults.cbstd_candidates)),
            delay_budget=float(gating.get('delay_budget', defaults.delay_budget)),
            n_nc=int(gating.get('n_nc', defaults.n_nc)),
            nc_width=float(gating.get('nc_width', defaults.nc_width)),
            tunable_unit=float(gating.get('tunable_unit', defaults.tunable_unit)),
            word=str(gating.get('default_word', defaults.word)),
            current_scale=float(gating.get('current_scale', defaults.current_scale)),
            control_cell=str(gating.get('control_cell', defaults.control_cell)),
            n_rows=int(rail.get('n_rows', defaults.n_rows)),
            r_rail=float(rail.get('r_rail', defaults.r_rail)),
            allowed_violations=int(rail.get('allowed_violations', defaults.allowed_violations)),
            dstn_candidates=tuple(float(w) for w in rail.get('candidates', defaults.dstn_candidates)),
            freq=float(power.get('freq', defaults.freq)),
            activity=float(power.get('activity', defaults.activity)),
            duty_active=float(power.get('duty_active', defaults.duty_active)),
            st_cap_per_width=float(power.get('st_cap_per_width', defaults.st_cap_per_width)),
        )

    def power_params(self, vdd: float) -> PowerParams:
        return PowerParams(self.freq, self.activity, self.duty_active, vdd, self.st_cap_per_width)

    def effective_vth(self, p: DeviceParams) -> float:
        return p.vth if self.vth is None else self.vth


@dataclass(frozen=True)
class Verdict:
    """约束判定"""
    name: str
    passed: bool
    detail: str = ""


@dataclass
class AnalysisReport:
    """一次策略分析的结果

    derived 中的百分比必须能由原始字段重新算出。plan 与 rail 只供调用方使用，不参与序列化。
    """
    strategy: str
    widths: Dict[str, float]
    d0: float
    delay: float
    d_bc: float
    max_vst: float
    p_avg: float
    p_ungated: float
    derived: Dict[str, float] = field(default_factory=dict)
    verdicts: List[Verdict] = field(default_factory=list)
    word: Optional[str] = None
    plan: Optional[GatingPlan] = field(default=None, repr=False, compare=False)
    rail: Optional[DstnResult] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if not self.derived:
            self.derived = self.compute_derived()

    def compute_derived(self) -> Dict[str, float]:
        return {
            'delta_d_over_d_pct': delta_d_over_d(self.delay, self.d0),
            'shift_from_dbc_pct': shift_from_dbc(self.delay, self.d_bc),
            'improvement_pct': improvement_over_dbc(self.delay, self.d_bc),
            'power_reduction_pct': power_reduction(self.p_avg, self.p_ungated),
        }

    def check_consistency(self, rtol: float = ReportConstants.CONSISTENCY_RTOL):
        """派生值与原始字段自洽，否则抛出 ReportError"""
        expected = self.compute_derived()
        for key in DERIVED_KEYS:
            if key not in self.derived:
                raise ReportError(f"报告缺少派生字段: {key}")
            if not math.isclose(self.derived[key], expected[key], rel_tol=rtol, abs_tol=rtol):
                raise ReportError(f"派生字段 {key} 不自洽: 报告 {self.derived[key]!r}, 重算 {expected[key]!r}")

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)


@dataclass
class _Context:
    """多个策略共享的中间结果"""
    tr: TimingResult
    conventional: GatingPlan
    baseline: PowerReport
    vth: float

    @property
    def d_bc(self) -> float:
        return self.conventional.gated_delay


def _context(c: Circuit, p: DeviceParams, settings: AnalysisSettings) -> _Context:
    vth = settings.effective_vth(p)
    tr = critical_path(c, p, vth)
    conv = conventional_gating(c, settings.conventional_candidates, p, settings.ir_fraction, vth,
                               settings.alpha_drop, settings.st_length, settings.current_scale, tr)
    baseline = average_power(c, None, settings.power_params(p.vdd), p)
    logger.info(f"未门控 d0={tr.d0:.6g}s, d_BC={conv.gated_delay:.6g}s, 平均功耗={baseline.p_avg:.6g}W")
    return _Context(tr, conv, baseline, vth)


def _run_conventional(c, p, settings, ctx, candidates=None, **_) -> Tuple[GatingPlan, None]:
    if candidates is None:
        return ctx.conventional, None
    plan = conventional_gating(c, candidates, p, settings.ir_fraction, ctx.vth, settings.alpha_drop,
                               settings.st_length, settings.current_scale, ctx.tr)
    return plan, None


def _run_cbstd(c, p, settings, ctx, candidates=None, **_) -> Tuple[GatingPlan, None]:
    plan = cbstd_gating(c, ctx.tr, candidates or settings.cbstd_candidates, p, ctx.d_bc,
                        settings.delay_budget, settings.n_nc, settings.nc_width, ctx.vth,
                        settings.alpha_drop, settings.st_length, settings.current_scale,
                        settings.ir_fraction)
    return plan, None


def _rows_for(c: Circuit, settings: AnalysisSettings, n_rows: Optional[int]) -> RowAssignment:
    if n_rows is None and all(g.row is not None for g in c.gates):
        return row_assignment_from_tags(c)
    return assign_rows(c, n_rows or settings.n_rows)


def _run_dstn(c, p, settings, ctx, candidates=None, n_rows=None, **_) -> Tuple[GatingPlan, DstnResult]:
    rows = _rows_for(c, settings, n_rows)
    result = dstn_size(c, rows, candidates or settings.dstn_candidates, settings.r_rail, p,
                       settings.ir_fraction, settings.allowed_violations, ctx.d_bc,
                       settings.delay_budget, ctx.vth, settings.alpha_drop, settings.st_length,
                       settings.current_scale, ctx.tr)
    return dstn_plan(c, rows, result, ctx.tr, settings.st_length, settings.current_scale), result


def _run_tunable(c, p, settings, ctx, word=None, w_unit=None, **_) -> Tuple[GatingPlan, None]:
    clusters = cbstd_partition(c, ctx.tr, settings.n_nc, settings.current_scale)
    control = c.cells.get(settings.control_cell)
    if control is None:
        logger.warning(f"电路单元库中没有控制门 {settings.control_cell}，功耗中不计控制逻辑")
    plan = tunable_plan(c, ctx.tr, clusters, word or settings.word, w_unit or settings.tunable_unit,
                        p, settings.nc_width, ctx.vth, settings.alpha_drop, settings.st_length,
                        control, settings.ir_fraction)
    return plan, None


# 策略注册表
STRATEGY_RUNNERS: Dict[str, Callable[..., Tuple[GatingPlan, Optional[DstnResult]]]] = {
    Strategies.CONVENTIONAL: _run_conventional,
    Strategies.CBSTD: _run_cbstd,
    Strategies.DSTN: _run_dstn,
    Strategies.TUNABLE: _run_tunable,
}


def get_supported_strategies() -> list:
    """获取支持的策略列表"""
    return list(STRATEGY_RUNNERS.keys())


def _verdicts(strategy: str, plan: GatingPlan, rail: Optional[DstnResult], p: DeviceParams,
              settings: AnalysisSettings, d_bc: float) -> List[Verdict]:
    limit = settings.ir_fraction * p.vdd
    if rail is not None:
        ir = Verdict("ir_drop", rail.verdict.passed,
                     f"越限节点 {list(rail.verdict.violators)}, 允许 {settings.allowed_violations} 个")
    else:
        # 与 max_vst 相同，覆盖全部簇
        over = sorted(cl.id for cl in plan.clusters if plan.vst_per_cluster[cl.id] > limit)
        detail = f"限值 {limit:.6g}V"
        if over:
            detail += f", 越限簇 {over}"
        ir = Verdict("ir_drop", not over, detail)
    budget = settings.delay_budget * d_bc
    delay_ok = plan.gated_delay <= budget
    verdicts = [ir]
    if strategy != Strategies.CONVENTIONAL:
        verdicts.append(Verdict("delay_budget", delay_ok, f"上限 {budget:.6g}s"))
    for v in verdicts:
        if not v.passed:
            logger.warning(f"{strategy} 约束未满足: {v.name} ({v.detail})")
    return verdicts


def _report(strategy: str, plan: GatingPlan, rail: Optional[DstnResult], c: Circuit,
            p: DeviceParams, settings: AnalysisSettings, ctx: _Context) -> AnalysisReport:
    power = average_power(c, plan, settings.power_params(p.vdd), p)
    word = None
    for st in plan.st_per_cluster.values():
        if st.word is not None:
            word = st.word
    report = AnalysisReport(
        strategy=strategy,
        widths={cid: st.geom.w for cid, st in sorted(plan.st_per_cluster.items())},
        d0=ctx.tr.d0,
        delay=plan.gated_delay,
        d_bc=ctx.d_bc,
        max_vst=plan.max_vst,
        p_avg=power.p_avg,
        p_ungated=ctx.baseline.p_avg,
        verdicts=_verdicts(strategy, plan, rail, p, settings, ctx.d_bc),
        word=word,
        plan=plan,
        rail=rail,
    )
    report.check_consistency()
    return report


def run_strategy(c: Circuit, strategy: str, p: DeviceParams, settings: Optional[AnalysisSettings] = None,
                 **options: Any) -> AnalysisReport:
    """端到端运行一个门控策略

    Args:
        c: 电路
        strategy: 策略名或别名
        p: 器件参数
        settings: 分析配置，缺省为默认值
        **options: 策略相关覆盖项: candidates, word, w_unit, n_rows

    Returns:
        AnalysisReport: 分析报告

    Raises:
        InfeasibleError: 没有方案满足约束
    """
    settings = settings or AnalysisSettings()
    strategy = Strategies.resolve(strategy)
    ctx = _context(c, p, settings)
    plan, rail = STRATEGY_RUNNERS[strategy](c, p, settings, ctx, **options)
    return _report(strategy, plan, rail, c, p, settings, ctx)


def compare_strategies(c: Circuit, p: DeviceParams,
                       settings: Optional[AnalysisSettings] = None) -> List[Dict[str, Any]]:
    """未门控基线加四种策略的对比表

    不可行的策略记为 INFEASIBLE 行而不中断比较。

    Returns:
        List[Dict[str, Any]]: 每个策略一行，数值为 float，缺失为 None
    """
    settings = settings or AnalysisSettings()
    ctx = _context(c, p, settings)
    rows = [{
        'strategy': 'ungated', 'st_width_m': None, 'delay_s': ctx.tr.d0, 'max_vst_v': 0.0,
        'p_avg_w': ctx.baseline.p_avg, 'delta_d_over_d_pct': 0.0,
        'improvement_pct': improvement_over_dbc(ctx.tr.d0, ctx.d_bc),
        'power_reduction_pct': 0.0, 'status': ReportConstants.PASS,
    }]
    for strategy in get_supported_strategies():
        try:
            plan, rail = STRATEGY_RUNNERS[strategy](c, p, settings, ctx)
        except InfeasibleError as e:
            logger.warning(f"{strategy} 不可行: {e}")
            rows.append({'strategy': strategy, 'st_width_m': None, 'delay_s': None, 'max_vst_v': None,
                         'p_avg_w': None, 'delta_d_over_d_pct': None, 'improvement_pct': None,
                         'power_reduction_pct': None, 'status': ReportConstants.INFEASIBLE})
            continue
        report = _report(strategy, plan, rail, c, p, settings, ctx)
        rows.append({
            'strategy': strategy,
            'st_width_m': plan.total_st_width,
            'delay_s': report.delay,
            'max_vst_v': report.max_vst,
            'p_avg_w': report.p_avg,
            'delta_d_over_d_pct': report.derived['delta_d_over_d_pct'],
            'improvement_pct': report.derived['improvement_pct'],
            'power_reduction_pct': report.derived['power_reduction_pct'],
            'status': ReportConstants.PASS if report.passed else ReportConstants.FAIL,
        })
    return rows


def with_overrides(settings: AnalysisSettings, **changes: Any) -> AnalysisSettings:
    """返回替换了部分字段的配置，值为 None 的项忽略"""
    return dataclasses.replace(settings, **{k: v for k, v in changes.items() if v is not None})
