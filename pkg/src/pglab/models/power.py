#!/usr/bin/env python3
"""
功耗核算

待机漏电（睡眠晶体管按亚阈值电流模型计算，未门控单元按几何缩放的参考漏电）、
工作模式动态功耗以及按占空比加权的平均功耗。
"""

import logging
from dataclasses import dataclass
from typing import Optional

from ..config.constants import PowerDefaults
from .base import BiasPoint, DeviceParams, DomainError
from .device_model import subthreshold_current
from .gating import GatingPlan
from .netlist import Circuit

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PowerParams:
    """功耗参数

    Attributes:
        freq: 工作频率 (Hz)
        activity: 每个门的翻转活动因子
        duty_active: 工作模式时间占比
        vdd: 电源电压 (V)
        st_cap_per_width: 睡眠晶体管单位宽度栅电容 κ (F/m)
    """
    freq: float = PowerDefaults.FREQ
    activity: float = PowerDefaults.ACTIVITY
    duty_active: float = PowerDefaults.DUTY_ACTIVE
    vdd: float = 1.0
    st_cap_per_width: float = PowerDefaults.ST_CAP_PER_WIDTH

    def __post_init__(self):
        if not 0 <= self.activity <= 1:
            raise DomainError(f"活动因子必须在 [0, 1] 内: {self.activity}")
        if not 0 <= self.duty_active <= 1:
            raise DomainError(f"工作占比必须在 [0, 1] 内: {self.duty_active}")
        if self.freq <= 0 or self.vdd <= 0:
            raise DomainError(f"频率与电源电压必须为正: freq={self.freq}, vdd={self.vdd}")
        if self.st_cap_per_width < 0:
            raise DomainError(f"κ 不能为负: {self.st_cap_per_width}")


@dataclass(frozen=True)
class PowerReport:
    """功耗报告 (W)，p_avg = duty·(p_dyn + p_leak_active) + (1 − duty)·p_leak_standby"""
    p_dyn: float
    p_leak_active: float
    p_leak_standby: float
    p_avg: float

    def __post_init__(self):
        for name in ('p_dyn', 'p_leak_active', 'p_leak_standby', 'p_avg'):
            if getattr(self, name) < 0:
                raise DomainError(f"功耗不能为负: {name}={getattr(self, name)}")


def _cell_leakage(c: Circuit, gate_ids) -> float:
    return sum(c.gate(g).leakage for g in gate_ids)


def _control_leakage(plan: Optional[GatingPlan]) -> float:
    return sum(cell.i_leak_ref for cell in plan.control_cells) if plan else 0.0


def st_standby_current(plan: GatingPlan, p: DeviceParams) -> float:
    """全部睡眠晶体管在 VGS = 0、VDS = Vdd 下的亚阈值电流 (A)"""
    bias = BiasPoint(0.0, 0.0, p.vdd)
    return sum(subthreshold_current(p, st.geom, bias) for st in plan.st_per_cluster.values())


def standby_leakage(c: Circuit, plan: Optional[GatingPlan], p: DeviceParams) -> float:
    """待机漏电功耗 (W)

    被门控的簇由其睡眠晶体管决定漏电，未门控的门按单元参考漏电随宽长比缩放；
    控制门在待机时仍然上电。

    Args:
        c: 电路
        plan: 门控方案，None 表示未门控
        p: 器件参数

    Returns:
        float: 待机漏电功耗 (W)
    """
    if plan is None:
        return p.vdd * _cell_leakage(c, c.gate_map)

    gated = {g for cl in plan.clusters for g in cl.gate_ids}
    ungated = [g for g in c.gate_map if g not in gated]
    current = st_standby_current(plan, p) + _cell_leakage(c, ungated) + _control_leakage(plan)
    return p.vdd * current


def active_leakage(c: Circuit, plan: Optional[GatingPlan], p: DeviceParams) -> float:
    """工作模式漏电功耗 (W)：全部单元加控制门"""
    return p.vdd * (_cell_leakage(c, c.gate_map) + _control_leakage(plan))


def total_capacitance(c: Circuit, plan: Optional[GatingPlan], pp: PowerParams) -> float:
    """翻转电容 Σcl + κ·Σ睡眠晶体管宽度 + 控制门电容 (F)"""
    cap = sum(g.cell.cl for g in c.gates)
    if plan is not None:
        cap += pp.st_cap_per_width * plan.total_st_width
        cap += sum(cell.cl for cell in plan.control_cells)
    return cap


def dynamic_power(c: Circuit, plan: Optional[GatingPlan], pp: PowerParams) -> float:
    """动态功耗 activity·f·Vdd²·C_total (W)"""
    return pp.activity * pp.freq * pp.vdd ** 2 * total_capacitance(c, plan, pp)


def average_power(c: Circuit, plan: Optional[GatingPlan], pp: PowerParams,
                  p: DeviceParams) -> PowerReport:
    """按工作占比组合动态、工作漏电与待机漏电

    Args:
        c: 电路
        plan: 门控方案，None 给出未门控基线
        pp: 功耗参数
        p: 器件参数

    Returns:
        PowerReport: 功耗报告
    """
    p_dyn = dynamic_power(c, plan, pp)
    p_leak_active = active_leakage(c, plan, p)
    p_leak_standby = standby_leakage(c, plan, p)
    p_avg = pp.duty_active * (p_dyn + p_leak_active) + (1 - pp.duty_active) * p_leak_standby
    logger.debug(f"功耗: 动态={p_dyn:.6g}W, 工作漏电={p_leak_active:.6g}W, "
                 f"待机漏电={p_leak_standby:.6g}W, 平均={p_avg:.6g}W")
    return PowerReport(p_dyn, p_leak_active, p_leak_standby, p_avg)


def power_reduction(p_gated: float, p_ungated: float) -> float:
    """相对未门控基线的功耗降低百分比"""
    if p_ungated <= 0:
        raise DomainError(f"基线功耗必须为正: {p_ungated}")
    return 100.0 * (p_ungated - p_gated) / p_ungated
