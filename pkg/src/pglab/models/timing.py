#!/usr/bin/env python3
"""
静态时序分析与延迟模型标定

最长路径 STA（互连延迟为零），门控后的电路延迟，以及用 (vth, α) 极小化
最大相对误差来拟合睡眠晶体管延迟退化模型。
"""

import logging
from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np

from .base import DeviceParams, DomainError, InfeasibleError
from .device_model import gate_delay, gated_delay
from .netlist import Circuit, topological_order

logger = logging.getLogger(__name__)

__all__ = [
    'TimingResult', 'DelayFit',
    'topological_order', 'gate_delays', 'longest_path', 'critical_path',
    'gated_timing', 'circuit_delay_gated', 'fit_delay_model',
]


@dataclass(frozen=True)
class TimingResult:
    """STA 结果

    Attributes:
        d0: 关键路径延迟 (s)
        critical_path: 关键路径上的门 id，按信号传播顺序
        per_gate_arrival: 各门输出的到达时间 (s)
    """
    d0: float
    critical_path: Tuple[str, ...]
    per_gate_arrival: Dict[str, float]

    @property
    def critical_set(self) -> frozenset:
        return frozenset(self.critical_path)


@dataclass(frozen=True)
class DelayFit:
    """延迟退化模型的拟合结果，residual 为最大相对误差"""
    vth_fit: float
    alpha_fit: float
    d0_ref: float
    residual: float
    vdd: float = 1.0

    def predict(self, vst: float) -> float:
        return self.d0_ref * ((self.vdd - self.vth_fit) / (self.vdd - vst - self.vth_fit)) ** self.alpha_fit


def gate_delays(c: Circuit, p: DeviceParams, vth: Optional[float] = None) -> Dict[str, float]:
    """各门的 α 幂律延迟，驱动因子随 McCMOS 宽度调整"""
    vth = p.vth if vth is None else vth
    return {g.id: gate_delay(g.cell.cl, g.drive, p, vth) for g in c.gates}


def longest_path(c: Circuit, delays: Mapping[str, float]) -> TimingResult:
    """给定门延迟的最长路径

    等长路径取门 id 序列字典序最小者。没有门前驱的门是路径起点。

    Raises:
        DomainError: 电路没有由门驱动的主输出
    """
    arrival: Dict[str, float] = {}
    paths: Dict[str, Tuple[str, ...]] = {}

    for gate_id in topological_order(c):
        preds = list(c.graph.predecessors(gate_id))
        if not preds:
            arrival[gate_id] = delays[gate_id]
            paths[gate_id] = (gate_id,)
            continue
        best = max(arrival[u] for u in preds)
        paths[gate_id] = min(paths[u] + (gate_id,) for u in preds if arrival[u] == best)
        arrival[gate_id] = best + delays[gate_id]

    endpoints = sorted({c.driver_map[net] for net in c.primary_outputs if net in c.driver_map})
    if not endpoints:
        raise DomainError("电路没有由门驱动的主输出，无法确定关键路径")

    d0 = max(arrival[g] for g in endpoints)
    path = min(paths[g] for g in endpoints if arrival[g] == d0)
    return TimingResult(d0, path, arrival)


def critical_path(c: Circuit, p: DeviceParams, vth: Optional[float] = None) -> TimingResult:
    """未门控电路的关键路径

    Args:
        c: 电路
        p: 器件参数
        vth: 有效阈值电压，缺省为 p.vth

    Returns:
        TimingResult: 关键路径、延迟与各门到达时间
    """
    tr = longest_path(c, gate_delays(c, p, vth))
    logger.debug(f"关键路径: {' -> '.join(tr.critical_path)}, d0={tr.d0:.6g}s")
    return tr


def gated_timing(c: Circuit, vst_per_gate: Mapping[str, float], p: DeviceParams,
                 vth: Optional[float] = None) -> TimingResult:
    """按各门所在簇的 vST 放大门延迟后重做 STA"""
    vth = p.vth if vth is None else vth
    base = gate_delays(c, p, vth)
    inflated = {gid: gated_delay(d, vst_per_gate.get(gid, 0.0), p, vth) for gid, d in base.items()}
    return longest_path(c, inflated)


def circuit_delay_gated(c: Circuit, tr: TimingResult, vst_per_gate: Mapping[str, float],
                        p: DeviceParams, vth: Optional[float] = None) -> float:
    """插入睡眠晶体管后的电路延迟，关键路径可能改变

    Args:
        c: 电路
        tr: 未门控 STA 结果
        vst_per_gate: 门 id → 所在簇的 vST (V)，未列出的门视为未门控
        p: 器件参数
        vth: 有效阈值电压

    Returns:
        float: 门控后的最长路径延迟 (s)，不小于 tr.d0
    """
    if not any(vst_per_gate.values()):
        return tr.d0
    gated = gated_timing(c, vst_per_gate, p, vth)
    if gated.critical_path != tr.critical_path:
        logger.debug(f"门控后关键路径改变: {' -> '.join(gated.critical_path)}")
    return gated.d0


def _max_relative_error(vth: np.ndarray, alpha: np.ndarray, vst: np.ndarray,
                        measured: np.ndarray, d0_ref: float, vdd: float) -> np.ndarray:
    """网格上每个 (vth, α) 的最大相对误差，不可行点为 inf"""
    vth = vth[..., None]
    alpha = alpha[..., None]
    headroom = vdd - vst - vth
    feasible = np.all(headroom > 0, axis=-1)
    with np.errstate(divide='ignore', invalid='ignore'):
        predicted = d0_ref * ((vdd - vth) / np.where(headroom > 0, headroom, np.nan)) ** alpha
        errors = np.max(np.abs(predicted - measured) / measured, axis=-1)
    return np.where(feasible, errors, np.inf)


def fit_delay_model(rows: Sequence[Tuple[float, float]], d0_ref: float, vdd: float = 1.0,
                    vth_points: int = 201, alpha_points: int = 101,
                    refine_iterations: int = 60) -> DelayFit:
    """用延迟退化模型拟合 (vST, 实测延迟) 数据

    先在固定网格上做极小化最大相对误差的搜索，再以固定步长调度做模式搜索细化。
    结果与行顺序无关。

    Args:
        rows: (vST, 延迟) 数据行
        d0_ref: 未门控参考延迟 (s)
        vdd: 电源电压 (V)
        vth_points: vth 网格点数（含两个端点，端点不参与搜索）
        alpha_points: α 网格点数
        refine_iterations: 细化迭代次数

    Returns:
        DelayFit: 拟合结果

    Raises:
        DomainError: 输入不合法
        InfeasibleError: 没有 (vth, α) 满足所有行 vST + vth < vdd
    """
    if len(rows) < 1:
        raise DomainError("拟合至少需要一行数据")
    if d0_ref <= 0:
        raise DomainError(f"参考延迟必须为正: {d0_ref}")
    vst = np.array([r[0] for r in rows], dtype=float)
    measured = np.array([r[1] for r in rows], dtype=float)
    if np.any(measured <= 0) or np.any(vst < 0):
        raise DomainError("延迟必须为正且 vST 不能为负")

    vth_grid = np.linspace(0.0, vdd, vth_points)[1:-1]
    alpha_grid = np.linspace(1.0, 2.0, alpha_points)
    vv, aa = np.meshgrid(vth_grid, alpha_grid, indexing='ij')
    errors = _max_relative_error(vv, aa, vst, measured, d0_ref, vdd)

    flat = int(np.argmin(errors))
    if not np.isfinite(errors.flat[flat]):
        raise InfeasibleError("没有可行的 (vth, α): 所有网格点都有 vST + vth >= vdd")
    i, j = np.unravel_index(flat, errors.shape)
    best_v, best_a, best_err = float(vth_grid[i]), float(alpha_grid[j]), float(errors[i, j])
    logger.debug(f"网格搜索: vth={best_v:.6g}, α={best_a:.6g}, 误差={best_err:.4%}")

    def score(v: float, a: float) -> float:
        if not (0.0 < v < vdd and 1.0 <= a <= 2.0):
            return np.inf
        return float(_max_relative_error(np.array(v), np.array(a), vst, measured, d0_ref, vdd))

    step_v = vdd / (vth_points - 1)
    step_a = 1.0 / (alpha_points - 1)
    for _ in range(refine_iterations):
        improved = False
        for dv, da in ((step_v, 0.0), (-step_v, 0.0), (0.0, step_a), (0.0, -step_a)):
            candidate = score(best_v + dv, best_a + da)
            if candidate < best_err:
                best_v, best_a, best_err = best_v + dv, best_a + da, candidate
                improved = True
                break
        if not improved:
            step_v /= 2
            step_a /= 2

    fit = DelayFit(best_v, best_a, d0_ref, best_err, vdd)
    logger.info(f"延迟模型标定: vth={fit.vth_fit:.6g}V, α={fit.alpha_fit:.6g}, 最大相对误差={fit.residual:.4%}")
    return fit
