#!/usr/bin/env python3
"""
电源门控策略

常规单睡眠晶体管、CBSTD 簇划分与预算选宽、可调睡眠晶体管单元（加权并联、
SLPBAR1 控制与 16 字扫描），以及这些策略共用的 vST 自洽求解。
"""

import logging
import re
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import bisect

from ..config.constants import ClusterKind, GatingDefaults, SleepMode, Strategies
from .base import DeviceParams, DomainError, Geometry, InfeasibleError
from .device_model import on_resistance
from .netlist import CellDef, Circuit, topological_order
from .timing import TimingResult, circuit_delay_gated, critical_path

logger = logging.getLogger(__name__)

_WORD_RE = re.compile(r'^[01]{%d}$' % GatingDefaults.WORD_BITS)


@dataclass(frozen=True)
class Cluster:
    """共享同一睡眠晶体管的门集合，i_peak 为峰值放电电流之和 (A)"""
    id: str
    gate_ids: FrozenSet[str]
    kind: str
    i_peak: float

    def __post_init__(self):
        object.__setattr__(self, 'gate_ids', frozenset(self.gate_ids))
        if not self.gate_ids:
            raise DomainError(f"簇 {self.id} 不能为空")
        if not self.i_peak > 0:
            raise DomainError(f"簇 {self.id} 的峰值电流必须为正: {self.i_peak}")
        if self.kind not in (ClusterKind.CRITICAL, ClusterKind.NON_CRITICAL):
            raise DomainError(f"未知簇类型: {self.kind}")


def _check_word(word: str) -> str:
    if not isinstance(word, str) or not _WORD_RE.match(word):
        raise DomainError(f"配置字必须是 {GatingDefaults.WORD_BITS} 位二进制串 (B3B2B1B0): {word!r}")
    return word


@dataclass(frozen=True)
class SleepTransistor:
    """睡眠晶体管；可调模式下 geom.w 为并联导通器件的总宽度"""
    geom: Geometry
    mode: str = SleepMode.FIXED
    word: Optional[str] = None
    slpbar1: int = 1

    def __post_init__(self):
        if self.mode == SleepMode.TUNABLE:
            if self.word is None:
                raise DomainError("可调睡眠晶体管需要配置字")
            _check_word(self.word)
        elif self.mode == SleepMode.FIXED:
            if self.word is not None:
                raise DomainError("固定睡眠晶体管不能带配置字")
        else:
            raise DomainError(f"未知睡眠晶体管类型: {self.mode}")
        if self.slpbar1 not in (0, 1):
            raise DomainError(f"SLPBAR1 必须为 0 或 1: {self.slpbar1}")


@dataclass(frozen=True)
class SizingRow:
    """候选宽度的评估结果"""
    width: float
    vst: float
    delay: float
    feasible: bool


@dataclass(frozen=True)
class GatingPlan:
    """一种门控策略的实例

    Attributes:
        strategy: 策略名
        clusters: 划分全部门的簇
        st_per_cluster: 簇 id → 睡眠晶体管
        vst_per_cluster: 簇 id → 求得的 vST (V)
        gated_delay: 门控后的电路延迟 (s)
        control_cells: 额外加入的控制门
        sizing: 选宽过程中评估过的候选
    """
    strategy: str
    clusters: Tuple[Cluster, ...]
    st_per_cluster: Dict[str, SleepTransistor]
    vst_per_cluster: Dict[str, float] = field(default_factory=dict)
    gated_delay: Optional[float] = None
    control_cells: Tuple[CellDef, ...] = ()
    sizing: Tuple[SizingRow, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'clusters', tuple(self.clusters))
        seen = set()
        for cl in self.clusters:
            if cl.id in seen:
                raise DomainError(f"簇 id 重复: {cl.id}")
            seen.add(cl.id)
            if cl.id not in self.st_per_cluster:
                raise DomainError(f"簇 {cl.id} 没有睡眠晶体管")
        members = [g for cl in self.clusters for g in cl.gate_ids]
        if len(members) != len(set(members)):
            raise DomainError("簇之间存在重叠的门")

    def check_partition(self, c: Circuit):
        """簇必须恰好覆盖电路的全部门"""
        covered = {g for cl in self.clusters for g in cl.gate_ids}
        expected = set(c.gate_map)
        if covered != expected:
            missing = sorted(expected - covered)
            extra = sorted(covered - expected)
            raise DomainError(f"簇没有划分电路: 缺少 {missing}, 多出 {extra}")

    def cluster(self, cluster_id: str) -> Cluster:
        for cl in self.clusters:
            if cl.id == cluster_id:
                return cl
        raise DomainError(f"没有簇: {cluster_id}")

    def vst_per_gate(self) -> Dict[str, float]:
        return {g: self.vst_per_cluster.get(cl.id, 0.0) for cl in self.clusters for g in cl.gate_ids}

    @property
    def max_vst(self) -> float:
        return max(self.vst_per_cluster.values(), default=0.0)

    @property
    def total_st_width(self) -> float:
        return sum(st.geom.w for st in self.st_per_cluster.values())


def cluster_current(c: Circuit, gate_ids: Iterable[str], current_scale: float = 1.0) -> float:
    """簇峰值电流：成员单元 i_peak 之和乘以标定系数"""
    return current_scale * sum(c.gate(g).cell.i_peak for g in gate_ids)


def solve_vst(i_peak0: float, r_on: float, p: DeviceParams, vth: Optional[float] = None,
              alpha: Optional[float] = None) -> float:
    """自洽求解睡眠晶体管压降

    求 v = r_on·i_peak0·((Vdd − v − vth)/(Vdd − vth))^α 在 [0, Vdd − vth) 上的唯一根，
    用二分法，容差 1e-9 V。

    Args:
        i_peak0: vST = 0 时的峰值放电电流 (A)
        r_on: 睡眠晶体管导通电阻 (Ω)
        p: 器件参数
        vth: 有效阈值电压，缺省为 p.vth
        alpha: 指数，缺省为 p.alpha；0 表示恒流极限

    Returns:
        float: vST (V)

    Raises:
        InfeasibleError: 区间内无根
    """
    vth = p.vth if vth is None else vth
    alpha = p.alpha if alpha is None else alpha
    if i_peak0 <= 0:
        raise DomainError(f"峰值电流必须为正: {i_peak0}")
    if r_on < 0:
        raise DomainError(f"导通电阻不能为负: {r_on}")
    if alpha < 0:
        raise DomainError(f"指数不能为负: {alpha}")
    headroom = p.vdd - vth
    if headroom <= 0:
        raise DomainError(f"阈值电压必须小于电源电压: vth={vth}, vdd={p.vdd}")
    if r_on == 0:
        return 0.0

    drop = r_on * i_peak0
    if alpha == 0:
        if drop >= headroom:
            raise InfeasibleError(f"恒流压降 {drop:.6g}V 超出可用余量 {headroom:.6g}V")
        return drop

    def residual(v: float) -> float:
        return v - drop * ((headroom - v) / headroom) ** alpha

    return float(bisect(residual, 0.0, headroom, xtol=GatingDefaults.VST_TOLERANCE))


def select_min_width(candidates: Iterable[float], values: Mapping[float, float], limit: float) -> float:
    """返回满足 values[w] ≤ limit 的最小候选宽度

    Raises:
        InfeasibleError: 没有候选满足约束
    """
    ordered = sorted(candidates)
    for w in ordered:
        if values[w] <= limit:
            return w
    raise InfeasibleError(
        f"没有候选宽度满足约束 (上限 {limit:.6g}): "
        + ", ".join(f"{w * 1e9:g}nm→{values[w]:.6g}" for w in ordered))


def _vst_for_width(i_peak: float, width: float, p: DeviceParams, vth: float,
                   alpha_drop: float, l: float) -> float:
    return solve_vst(i_peak, on_resistance(Geometry(width, l), p, alpha_drop, vth), p, vth)


def conventional_gating(c: Circuit, candidates: Sequence[float], p: DeviceParams,
                        frac: float = GatingDefaults.IR_FRACTION, vth: Optional[float] = None,
                        alpha_drop: float = GatingDefaults.ALPHA_DROP,
                        l: float = GatingDefaults.ST_LENGTH, current_scale: float = 1.0,
                        tr: Optional[TimingResult] = None) -> GatingPlan:
    """常规门控：一个睡眠晶体管门控全部逻辑

    选出 vST ≤ frac·Vdd 的最小候选宽度。

    Args:
        c: 电路
        candidates: 候选宽度 (m)
        p: 器件参数
        frac: IR 压降占 Vdd 的上限比例
        vth: 有效阈值电压
        alpha_drop: 睡眠晶体管尺寸公式中的压降比例
        l: 睡眠晶体管沟道长度 (m)
        current_scale: 峰值电流标定系数
        tr: 未门控 STA 结果，缺省时现算

    Returns:
        GatingPlan: 记录选中宽度的 vST 与门控延迟
    """
    vth = p.vth if vth is None else vth
    tr = tr or critical_path(c, p, vth)
    cluster = Cluster("all", frozenset(c.gate_map), ClusterKind.CRITICAL,
                      cluster_current(c, c.gate_map, current_scale))

    vsts = {}
    rows = []
    for w in sorted(candidates):
        vsts[w] = _vst_for_width(cluster.i_peak, w, p, vth, alpha_drop, l)
        delay = circuit_delay_gated(c, tr, dict.fromkeys(cluster.gate_ids, vsts[w]), p, vth)
        rows.append(SizingRow(w, vsts[w], delay, vsts[w] <= frac * p.vdd))
        logger.debug(f"常规门控候选 W={w * 1e9:g}nm: vST={vsts[w]:.6g}V, 延迟={delay:.6g}s")

    chosen = select_min_width(candidates, vsts, frac * p.vdd)
    row = next(r for r in rows if r.width == chosen)
    logger.info(f"常规门控选定 W={chosen * 1e9:g}nm, vST={row.vst:.6g}V")

    plan = GatingPlan(Strategies.CONVENTIONAL, (cluster,),
                      {cluster.id: SleepTransistor(Geometry(chosen, l))},
                      {cluster.id: row.vst}, row.delay, sizing=tuple(rows))
    plan.check_partition(c)
    return plan


def cbstd_partition(c: Circuit, tr: TimingResult, n_nc: int = 1,
                    current_scale: float = 1.0) -> List[Cluster]:
    """CBSTD 簇划分

    关键路径上的门组成关键簇，其余门按拓扑序均分为 n_nc 个非关键簇（空桶丢弃）。
    """
    if n_nc < 1:
        raise DomainError(f"非关键簇个数必须至少为1: {n_nc}")
    critical = frozenset(tr.critical_path)
    clusters = [Cluster("critical", critical, ClusterKind.CRITICAL,
                        cluster_current(c, critical, current_scale))]

    rest = [g for g in topological_order(c) if g not in critical]
    buckets = [list(b) for b in np.array_split(np.array(rest, dtype=object), n_nc) if len(b)]
    for index, bucket in enumerate(buckets):
        clusters.append(Cluster(f"nc{index}", frozenset(bucket), ClusterKind.NON_CRITICAL,
                                cluster_current(c, bucket, current_scale)))
    return clusters


def cbstd_select_width(candidates: Sequence[float], delays: Mapping[float, float], d_bc: float,
                       budget: float = GatingDefaults.DELAY_BUDGET) -> float:
    """选出门控延迟不超过 budget·d_BC 的最小候选宽度"""
    return select_min_width(candidates, delays, budget * d_bc)


def _fixed_nc(clusters: Sequence[Cluster], nc_width: float, p: DeviceParams, vth: float,
              alpha_drop: float, l: float, frac: float):
    st, vst = {}, {}
    for cl in clusters:
        if cl.kind != ClusterKind.NON_CRITICAL:
            continue
        st[cl.id] = SleepTransistor(Geometry(nc_width, l))
        vst[cl.id] = _vst_for_width(cl.i_peak, nc_width, p, vth, alpha_drop, l)
        if vst[cl.id] > frac * p.vdd:
            logger.warning(f"非关键簇 {cl.id} 的 vST={vst[cl.id]:.6g}V 超过 {frac:.0%}·Vdd")
    return st, vst


def _critical(clusters: Sequence[Cluster]) -> Cluster:
    for cl in clusters:
        if cl.kind == ClusterKind.CRITICAL:
            return cl
    raise DomainError("簇列表中没有关键簇")


def cbstd_gating(c: Circuit, tr: TimingResult, candidates: Sequence[float], p: DeviceParams,
                 d_bc: float, budget: float = GatingDefaults.DELAY_BUDGET, n_nc: int = 1,
                 nc_width: float = GatingDefaults.NC_WIDTH, vth: Optional[float] = None,
                 alpha_drop: float = GatingDefaults.ALPHA_DROP,
                 l: float = GatingDefaults.ST_LENGTH, current_scale: float = 1.0,
                 frac: float = GatingDefaults.IR_FRACTION) -> GatingPlan:
    """完整的 CBSTD 流程：划分、非关键簇固定宽度、关键簇按延迟预算选宽"""
    vth = p.vth if vth is None else vth
    clusters = cbstd_partition(c, tr, n_nc, current_scale)
    crit = _critical(clusters)
    st, vst = _fixed_nc(clusters, nc_width, p, vth, alpha_drop, l, frac)

    delays, vst_by_width, rows = {}, {}, []
    for w in sorted(candidates):
        vst_by_width[w] = _vst_for_width(crit.i_peak, w, p, vth, alpha_drop, l)
        per_cluster = dict(vst, **{crit.id: vst_by_width[w]})
        per_gate = {g: per_cluster[cl.id] for cl in clusters for g in cl.gate_ids}
        delays[w] = circuit_delay_gated(c, tr, per_gate, p, vth)
        rows.append(SizingRow(w, vst_by_width[w], delays[w], delays[w] <= budget * d_bc))
        logger.debug(f"CBSTD 候选 W={w * 1e9:g}nm: vST={vst_by_width[w]:.6g}V, 延迟={delays[w]:.6g}s")

    chosen = cbstd_select_width(candidates, delays, d_bc, budget)
    logger.info(f"CBSTD 选定关键簇 W={chosen * 1e9:g}nm, 延迟={delays[chosen]:.6g}s "
                f"(上限 {budget * d_bc:.6g}s)")

    st[crit.id] = SleepTransistor(Geometry(chosen, l))
    vst[crit.id] = vst_by_width[chosen]
    plan = GatingPlan(Strategies.CBSTD, tuple(clusters), st, vst, delays[chosen], sizing=tuple(rows))
    plan.check_partition(c)
    return plan


def tunable_effective_width(word: str, w_unit: float) -> float:
    """加权并联睡眠晶体管的等效宽度 Σ i·w_unit·B(i−1)，B3 控制 4·w_unit 器件

    Args:
        word: 配置字，字符顺序 B3 B2 B1 B0
        w_unit: 单位宽度 (m)
    """
    _check_word(word)
    units = sum(i * int(word[GatingDefaults.WORD_BITS - i]) for i in range(1, GatingDefaults.WORD_BITS + 1))
    return units * w_unit


def tunable_control(slpbar1: int, word: str) -> str:
    """控制与门输出：器件 i−1 导通当且仅当 SLPBAR1 = 1 且 B(i−1) = 1

    Returns:
        str: 各器件开关状态，顺序与配置字相同 (B3..B0)
    """
    _check_word(word)
    if slpbar1 not in (0, 1):
        raise DomainError(f"SLPBAR1 必须为 0 或 1: {slpbar1}")
    return "".join(str(slpbar1 & int(bit)) for bit in word)


def tunable_plan(c: Circuit, tr: TimingResult, clusters: Sequence[Cluster], word: str,
                 w_unit: float, p: DeviceParams, nc_width: float = GatingDefaults.NC_WIDTH,
                 vth: Optional[float] = None, alpha_drop: float = GatingDefaults.ALPHA_DROP,
                 l: float = GatingDefaults.ST_LENGTH, control_cell: Optional[CellDef] = None,
                 frac: float = GatingDefaults.IR_FRACTION) -> GatingPlan:
    """关键簇使用可调睡眠晶体管单元、非关键簇使用固定宽度的门控方案

    Raises:
        InfeasibleError: 配置字为 "0000"，工作模式下没有导通路径
    """
    vth = p.vth if vth is None else vth
    eff_width = tunable_effective_width(word, w_unit)
    if eff_width == 0:
        raise InfeasibleError(f"配置字 {word} 关断全部睡眠晶体管，工作模式下没有导通路径")

    crit = _critical(clusters)
    st, vst = _fixed_nc(clusters, nc_width, p, vth, alpha_drop, l, frac)
    st[crit.id] = SleepTransistor(Geometry(eff_width, l), SleepMode.TUNABLE, word, 1)
    vst[crit.id] = _vst_for_width(crit.i_peak, eff_width, p, vth, alpha_drop, l)

    per_gate = {g: vst[cl.id] for cl in clusters for g in cl.gate_ids}
    delay = circuit_delay_gated(c, tr, per_gate, p, vth)
    controls = (control_cell,) * GatingDefaults.WORD_BITS if control_cell else ()

    plan = GatingPlan(Strategies.TUNABLE, tuple(clusters), st, vst, delay, controls)
    plan.check_partition(c)
    logger.debug(f"可调单元 {word}: W={eff_width * 1e9:g}nm, VGND1={vst[crit.id]:.6g}V, 延迟={delay:.6g}s")
    return plan


@dataclass(frozen=True)
class SweepRow:
    """可调单元扫描的一行；不可行时数值字段为 None"""
    word: str
    eff_width: float
    vgnd1: Optional[float]
    delay: Optional[float]
    avg_power: Optional[float]
    feasible: bool


def all_words() -> List[str]:
    """全部配置字，升序"""
    return [format(i, f'0{GatingDefaults.WORD_BITS}b') for i in range(2 ** GatingDefaults.WORD_BITS)]


def tunable_sweep(c: Circuit, tr: TimingResult, clusters: Sequence[Cluster], w_unit: float,
                  p: DeviceParams, pp=None, nc_width: float = GatingDefaults.NC_WIDTH,
                  vth: Optional[float] = None, alpha_drop: float = GatingDefaults.ALPHA_DROP,
                  l: float = GatingDefaults.ST_LENGTH, control_cell: Optional[CellDef] = None,
                  progress: Optional[Callable[[str], None]] = None) -> List[SweepRow]:
    """对 16 个配置字逐一评估可调单元

    非关键簇保持固定宽度，只重算关键簇。"0000" 标记为不可行而不中断扫描。

    Args:
        c: 电路
        tr: 未门控 STA 结果
        clusters: cbstd_partition 得到的簇
        w_unit: 单位宽度 (m)
        p: 器件参数
        pp: 功耗参数，缺省使用默认值
        progress: 每完成一行调用一次的回调

    Returns:
        List[SweepRow]: 按配置字升序的 16 行
    """
    from .power import PowerParams, average_power

    pp = pp or PowerParams(vdd=p.vdd)
    crit = _critical(clusters)
    rows = []
    for word in all_words():
        try:
            plan = tunable_plan(c, tr, clusters, word, w_unit, p, nc_width, vth, alpha_drop, l,
                                control_cell)
        except InfeasibleError:
            rows.append(SweepRow(word, 0.0, None, None, None, False))
        else:
            report = average_power(c, plan, pp, p)
            rows.append(SweepRow(word, plan.st_per_cluster[crit.id].geom.w,
                                 plan.vst_per_cluster[crit.id], plan.gated_delay, report.p_avg, True))
        if progress:
            progress(word)
    return rows
