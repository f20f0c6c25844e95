#!/usr/bin/env python3
"""
分布式睡眠晶体管网络 (DSTN)

每行一个本地睡眠晶体管，各行虚拟地通过均匀轨电阻连成一条链。
节点方程是三对角系统，用带状直接法求解。
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import LinAlgError, solve_banded

from ..config.constants import ClusterKind, GatingDefaults, RailDefaults, Strategies
from .base import DeviceParams, DomainError, Geometry, InfeasibleError
from .device_model import on_resistance
from .gating import Cluster, GatingPlan, SizingRow, SleepTransistor, select_min_width
from .netlist import Circuit, RowAssignment
from .timing import TimingResult, circuit_delay_gated, critical_path

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RailNetwork:
    """虚拟地轨网络

    Attributes:
        n_nodes: 节点数（每行一个）
        r_rail: 相邻节点间的轨电阻 (Ω)
        g_st: 各节点睡眠晶体管到地的电导 (S)
        i_inj: 各节点注入的峰值电流 (A)
    """
    n_nodes: int
    r_rail: float
    g_st: Tuple[float, ...]
    i_inj: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, 'g_st', tuple(float(g) for g in self.g_st))
        object.__setattr__(self, 'i_inj', tuple(float(i) for i in self.i_inj))
        if self.n_nodes < 1:
            raise DomainError(f"节点数必须至少为1: {self.n_nodes}")
        if len(self.g_st) != self.n_nodes or len(self.i_inj) != self.n_nodes:
            raise DomainError("g_st / i_inj 长度与节点数不一致")
        if not self.r_rail > 0:
            raise DomainError(f"轨电阻必须为正: {self.r_rail}")
        if any(not g > 0 for g in self.g_st):
            raise DomainError("睡眠晶体管电导必须全为正")
        if any(i < 0 for i in self.i_inj):
            raise DomainError("注入电流不能为负")

    def banded_matrix(self) -> np.ndarray:
        """(1, 1) 带状存储的节点电导矩阵"""
        n = self.n_nodes
        g_rail = 1.0 / self.r_rail
        ab = np.zeros((3, n))
        ab[1] = self.g_st
        ab[1, :-1] += g_rail
        ab[1, 1:] += g_rail
        ab[0, 1:] = -g_rail
        ab[2, :-1] = -g_rail
        return ab


@dataclass(frozen=True)
class RailSolution:
    """节点电压解，violator_count 针对求解时给定的限值"""
    v: Tuple[float, ...]
    max_v: float
    violator_count: int = 0
    residual: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, 'v', tuple(float(x) for x in self.v))
        if any(x < 0 for x in self.v):
            raise DomainError("节点电压不能为负")
        if self.max_v != max(self.v, default=0.0):
            raise DomainError(f"max_v 与电压不一致: {self.max_v} != {max(self.v, default=0.0)}")

    @classmethod
    def from_voltages(cls, v: Sequence[float], limit: float = math.inf,
                      residual: float = 0.0) -> 'RailSolution':
        v = tuple(float(x) for x in v)
        return cls(v, max(v, default=0.0), sum(1 for x in v if x > limit), residual)


@dataclass(frozen=True)
class IrVerdict:
    """IR 压降约束判定"""
    passed: bool
    violators: Tuple[int, ...]
    limit: float


def build_dstn(c: Circuit, rows: RowAssignment, w_st: float, r_rail: float, p: DeviceParams,
               vth: Optional[float] = None, alpha_drop: float = GatingDefaults.ALPHA_DROP,
               l: float = GatingDefaults.ST_LENGTH, current_scale: float = 1.0) -> RailNetwork:
    """由行划分构造 DSTN

    每行注入该行全部门 i_peak 之和；轨电阻为无穷大时取上限 1e12 Ω。

    Args:
        c: 电路
        rows: 行划分，必须覆盖全部门
        w_st: 每行睡眠晶体管宽度 (m)
        r_rail: 相邻行之间的轨电阻 (Ω)
        p: 器件参数
    """
    vth = p.vth if vth is None else vth
    missing = [g for g in c.gate_map if g not in rows.mapping]
    if missing:
        raise DomainError(f"行划分未覆盖所有门: {', '.join(missing)}")

    g_st = 1.0 / on_resistance(Geometry(w_st, l), p, alpha_drop, vth)
    i_inj = [0.0] * rows.n_rows
    for gate_id, row in rows.mapping.items():
        i_inj[row] += current_scale * c.gate(gate_id).cell.i_peak

    return RailNetwork(rows.n_rows, min(r_rail, RailDefaults.R_RAIL_CAP),
                       (g_st,) * rows.n_rows, tuple(i_inj))


def solve_rail_voltages(net: RailNetwork, limit: float = math.inf) -> RailSolution:
    """求解节点方程 G·v = i

    Args:
        net: 轨网络
        limit: 统计越限节点所用的电压上限 (V)

    Returns:
        RailSolution: 节点电压、最大值、越限个数与残差 ‖G·v − i‖∞
    """
    ab = net.banded_matrix()
    rhs = np.array(net.i_inj)
    try:
        v = solve_banded((1, 1), ab, rhs)
    except (LinAlgError, ValueError) as e:
        raise DomainError(f"节点方程奇异: {e}")

    gv = ab[1] * v
    gv[:-1] += ab[0, 1:] * v[1:]
    gv[1:] += ab[2, :-1] * v[:-1]
    residual = float(np.max(np.abs(gv - rhs), initial=0.0))
    scale = float(np.max(np.abs(rhs), initial=0.0))
    if residual > 1e-12 * scale:
        logger.warning(f"节点方程残差偏大: {residual:.3g} (‖i‖∞={scale:.3g})")

    return RailSolution.from_voltages(np.maximum(v, 0.0), limit, residual)


def check_ir_constraint(sol: RailSolution, vdd: float, frac: float = GatingDefaults.IR_FRACTION,
                        allowed_violations: int = 0) -> IrVerdict:
    """越限节点（v > frac·Vdd）个数不超过 allowed_violations 即通过"""
    limit = frac * vdd
    violators = tuple(k for k, v in enumerate(sol.v) if v > limit)
    return IrVerdict(len(violators) <= allowed_violations, violators, limit)


@dataclass(frozen=True)
class DstnResult:
    """DSTN 选宽结果"""
    width: float
    network: RailNetwork
    solution: RailSolution
    verdict: IrVerdict
    gated_delay: float
    sizing: Tuple[SizingRow, ...] = ()


def _row_vst(c: Circuit, rows: RowAssignment, sol: RailSolution) -> Dict[str, float]:
    return {g: sol.v[rows.mapping[g]] for g in c.gate_map}


def dstn_size(c: Circuit, rows: RowAssignment, candidates: Sequence[float], r_rail: float,
              p: DeviceParams, frac: float = GatingDefaults.IR_FRACTION,
              allowed_violations: int = RailDefaults.ALLOWED_VIOLATIONS,
              d_bc: Optional[float] = None, budget: float = GatingDefaults.DELAY_BUDGET,
              vth: Optional[float] = None, alpha_drop: float = GatingDefaults.ALPHA_DROP,
              l: float = GatingDefaults.ST_LENGTH, current_scale: float = 1.0,
              tr: Optional[TimingResult] = None) -> DstnResult:
    """逐步加宽各行睡眠晶体管，直到 IR 约束（允许少量越限节点）与延迟预算同时满足

    Args:
        c: 电路
        rows: 行划分
        candidates: 候选宽度 (m)
        r_rail: 轨电阻 (Ω)
        p: 器件参数
        frac: IR 压降上限比例
        allowed_violations: 允许越限的节点数
        d_bc: 最佳延迟，给出时检查 budget·d_bc 预算

    Returns:
        DstnResult: 选中的最小宽度及其网络解
    """
    vth = p.vth if vth is None else vth
    tr = tr or critical_path(c, p, vth)
    limit = frac * p.vdd

    evaluated = {}
    failures = {}
    for w in sorted(candidates):
        net = build_dstn(c, rows, w, r_rail, p, vth, alpha_drop, l, current_scale)
        sol = solve_rail_voltages(net, limit)
        verdict = check_ir_constraint(sol, p.vdd, frac, allowed_violations)
        try:
            delay = circuit_delay_gated(c, tr, _row_vst(c, rows, sol), p, vth)
        except DomainError:
            delay = math.inf
        delay_ok = d_bc is None or delay <= budget * d_bc
        failures[w] = int(not verdict.passed) + int(not delay_ok)
        evaluated[w] = (net, sol, verdict, delay)
        logger.debug(f"DSTN 候选 W={w * 1e9:g}nm: 最大 vST={sol.max_v:.6g}V, "
                     f"越限节点={list(verdict.violators)}, 延迟={delay:.6g}s")

    chosen = select_min_width(candidates, failures, 0)
    net, sol, verdict, delay = evaluated[chosen]
    if verdict.violators:
        logger.warning(f"DSTN W={chosen * 1e9:g}nm 仍有 {len(verdict.violators)} 个节点超过 "
                       f"{limit:.3g}V: {list(verdict.violators)}")
    logger.info(f"DSTN 选定 W={chosen * 1e9:g}nm, 最大 vST={sol.max_v:.6g}V")

    sizing = tuple(SizingRow(w, evaluated[w][1].max_v, evaluated[w][3], failures[w] == 0)
                   for w in sorted(candidates))
    return DstnResult(chosen, net, sol, verdict, delay, sizing)


def dstn_plan(c: Circuit, rows: RowAssignment, result: DstnResult,
              tr: Optional[TimingResult] = None, l: float = GatingDefaults.ST_LENGTH,
              current_scale: float = 1.0) -> GatingPlan:
    """把 DSTN 结果转换为每行一个簇的门控方案，空行不生成簇"""
    critical = set(tr.critical_path) if tr else set()
    clusters, st, vst = [], {}, {}
    for row in range(rows.n_rows):
        members = rows.members(row)
        if not members:
            logger.warning(f"第 {row} 行没有门，方案中不包含该行的睡眠晶体管")
            continue
        cluster_id = f"row{row}"
        kind = ClusterKind.CRITICAL if critical & set(members) else ClusterKind.NON_CRITICAL
        i_peak = current_scale * sum(c.gate(g).cell.i_peak for g in members)
        clusters.append(Cluster(cluster_id, frozenset(members), kind, i_peak))
        st[cluster_id] = SleepTransistor(Geometry(result.width, l))
        vst[cluster_id] = result.solution.v[row]

    plan = GatingPlan(Strategies.DSTN, tuple(clusters), st, vst, result.gated_delay,
                      sizing=result.sizing)
    plan.check_partition(c)
    return plan
