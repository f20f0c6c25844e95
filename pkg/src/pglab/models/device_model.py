#!/usr/bin/env python3
"""
解析 MOSFET 与延迟模型

包含亚阈值电流、α 幂律门延迟、睡眠晶体管插入后的延迟退化以及睡眠晶体管尺寸计算。
所有函数都是不可变输入上的纯函数。
"""

import logging
import math

from ..config.constants import DeviceDefaults
from .base import BiasPoint, DeviceParams, DomainError, Geometry

logger = logging.getLogger(__name__)


def _exp(x: float, term: str) -> float:
    """指数运算，溢出时报出对应的项"""
    try:
        value = math.exp(x)
    except OverflowError:
        raise DomainError(f"{term} 指数溢出: exp({x:.6g})")
    if not math.isfinite(value):
        raise DomainError(f"{term} 结果不是有限数: exp({x:.6g})")
    return value


def _threshold_factor(p: DeviceParams) -> float:
    """e^(−Δvth/(η·vT))，Δvth 为 0 时恒为 1"""
    if p.dvth == 0:
        return 1.0
    if p.eta == 0:
        return 0.0
    return _exp(-p.dvth / (p.eta * p.v_t), "阈值调整因子")


def subthreshold_current(p: DeviceParams, g: Geometry, b: BiasPoint) -> float:
    """亚阈值漏电流

    I = A·exp[(VG − VS − vth0 − γ′VS + ηVDS)/(m·vT)]·(1 − e^(−VDS/vT))，
    其中 A = μ0Cox(W/L)·vT²·e^1.8·e^(−Δvth/(η·vT))。

    Args:
        p: 器件参数
        g: 晶体管几何尺寸
        b: 偏置点

    Returns:
        float: 电流 (A)，非负

    Raises:
        DomainError: 指数溢出
    """
    prefactor = (p.mu0_cox * g.aspect * p.v_t ** 2
                 * math.exp(DeviceDefaults.PREFACTOR_EXPONENT) * _threshold_factor(p))
    exponent = (b.vg - b.vs - p.vth0 - p.gamma_prime * b.vs + p.eta * b.vds) / (p.m * p.v_t)
    conduction = _exp(exponent, "亚阈值导通项")
    drain_term = -math.expm1(-b.vds / p.v_t)

    current = prefactor * conduction * drain_term
    if not math.isfinite(current):
        raise DomainError(f"亚阈值电流不是有限数: 前置因子={prefactor:.6g}, 导通项={conduction:.6g}")
    return max(current, 0.0)


def leakage_per_square(p: DeviceParams) -> float:
    """单位宽长比器件在待机偏置 (VGS=0, VDS=Vdd) 下的漏电流 (A)"""
    return subthreshold_current(p, Geometry(1.0, 1.0), BiasPoint(0.0, 0.0, p.vdd))


def gate_delay(cl: float, k: float, p: DeviceParams, vth: float) -> float:
    """α 幂律门延迟 CL·Vdd / (K·(Vdd − Vth)^α)

    Args:
        cl: 负载电容 (F)
        k: 驱动因子
        p: 器件参数
        vth: 阈值电压 (V)

    Returns:
        float: 延迟 (s)
    """
    if vth >= p.vdd:
        raise DomainError(f"阈值电压必须小于电源电压: vth={vth}, vdd={p.vdd}")
    if cl < 0:
        raise DomainError(f"负载电容不能为负: cl={cl}")
    if k <= 0:
        raise DomainError(f"驱动因子必须为正: k={k}")
    return cl * p.vdd / (k * (p.vdd - vth) ** p.alpha)


def _check_drop(vst: float, p: DeviceParams, vth: float):
    if vst < 0:
        raise DomainError(f"睡眠晶体管压降不能为负: vst={vst}")
    if vst + vth >= p.vdd:
        raise DomainError(f"簇电压不足: vst + vth = {vst + vth:.6g} >= vdd = {p.vdd}")


def gated_delay(d: float, vst: float, p: DeviceParams, vth: float) -> float:
    """插入睡眠晶体管后的延迟 d·((Vdd − vth)/(Vdd − vST − vth))^α"""
    _check_drop(vst, p, vth)
    return d * ((p.vdd - vth) / (p.vdd - vst - vth)) ** p.alpha


def delay_degradation_linear(d: float, vst: float, p: DeviceParams, vth: float) -> float:
    """一阶延迟退化 Δd = d·vST/(Vdd − vth)，比例常数取 1"""
    _check_drop(vst, p, vth)
    return d * vst / (p.vdd - vth)


def sleep_transistor_resistance(i_st: float, alpha_drop: float, vdd: float) -> float:
    """允许压降对应的睡眠晶体管电阻 R_ST = Vdd·α_drop / I_ST (Ω)"""
    if i_st <= 0:
        raise DomainError(f"峰值电流必须为正: i_st={i_st}")
    if not 0 < alpha_drop < 1:
        raise DomainError(f"压降比例必须在 (0, 1) 内: alpha_drop={alpha_drop}")
    return vdd * alpha_drop / i_st


def sleep_transistor_beta(p: DeviceParams, alpha_drop: float, vth: float) -> float:
    """β = 1/(μ0Cox·(Vdd − vth − Vdd·α_drop)) (Ω)"""
    if not 0 <= alpha_drop < 1:
        raise DomainError(f"压降比例必须在 [0, 1) 内: alpha_drop={alpha_drop}")
    overdrive = p.vdd - vth - p.vdd * alpha_drop
    if overdrive <= 0:
        raise DomainError(f"β 分母退化: Vdd − vth − Vdd·α_drop = {overdrive:.6g}")
    return 1.0 / (p.mu0_cox * overdrive)


def size_sleep_transistor(i_st: float, alpha_drop: float, p: DeviceParams,
                          vth: float, l: float) -> float:
    """按最大允许压降确定睡眠晶体管宽度

    Args:
        i_st: 流过睡眠晶体管的峰值放电电流 (A)
        alpha_drop: 允许压降占 Vdd 的比例
        p: 器件参数
        vth: 阈值电压 (V)
        l: 沟道长度 (m)

    Returns:
        float: 宽度 W = (W/L)·l (m)
    """
    r_st = sleep_transistor_resistance(i_st, alpha_drop, p.vdd)
    beta = sleep_transistor_beta(p, alpha_drop, vth)
    width = beta / r_st * l
    logger.debug(f"睡眠晶体管尺寸: R_ST={r_st:.6g}Ω, β={beta:.6g}Ω, W={width:.6g}m")
    return width


def on_resistance(g: Geometry, p: DeviceParams, alpha_drop: float, vth: float) -> float:
    """线性区导通电阻 β/(W/L) (Ω)"""
    return sleep_transistor_beta(p, alpha_drop, vth) / g.aspect
