#!/usr/bin/env python3
"""
公共数据结构与异常体系

器件参数、几何尺寸和偏置点是所有分析模块共享的值类型，均为不可变对象。
"""

import math
from dataclasses import dataclass
from typing import Optional

from ..config.constants import DeviceDefaults


class PgLabError(Exception):
    """所有分析错误的基类"""


class DomainError(PgLabError, ValueError):
    """前置条件不满足或结果不可表示"""


class FileFormatError(PgLabError, ValueError):
    """带行号的文本格式错误

    Args:
        message: 错误原因
        line: 出错行号（从1开始），结构性错误可能没有行号
    """

    def __init__(self, message: str, line: Optional[int] = None):
        self.reason = message
        self.line = line
        super().__init__(f"第{line}行: {message}" if line is not None else message)


class NetlistError(FileFormatError):
    """网表解析或结构错误"""


class ParamsFileError(FileFormatError):
    """器件参数文件错误"""


class InfeasibleError(PgLabError):
    """没有候选方案满足约束"""


class ReportError(PgLabError):
    """报告自洽性检查失败或报告文本无法解析"""


def _require(condition: bool, message: str):
    if not condition:
        raise DomainError(message)


@dataclass(frozen=True)
class Geometry:
    """晶体管几何尺寸 (单位: 米)"""
    w: float
    l: float

    def __post_init__(self):
        _require(math.isfinite(self.w) and self.w > 0, f"沟道宽度必须为正: w={self.w}")
        _require(math.isfinite(self.l) and self.l > 0, f"沟道长度必须为正: l={self.l}")

    @property
    def aspect(self) -> float:
        """宽长比 W/L"""
        return self.w / self.l

    def scaled(self, widen: float = 1.0, lengthen: float = 1.0) -> 'Geometry':
        return Geometry(self.w * widen, self.l * lengthen)


@dataclass(frozen=True)
class BiasPoint:
    """偏置点：栅极、源极电压与漏源电压 (V)"""
    vg: float
    vs: float
    vds: float

    def __post_init__(self):
        _require(self.vds >= 0, f"NMOS 尾管约定要求 vds >= 0: vds={self.vds}")


@dataclass(frozen=True)
class DeviceParams:
    """解析 MOSFET 模型参数

    Attributes:
        mu0_cox: 跨导因子 μ0·Cox (A/V²)
        vth0: 零偏阈值电压 (V)
        dvth: 阈值调整量 Δvth (V)
        m: 亚阈值摆幅系数
        gamma_prime: 线性化体效应系数 γ′
        eta: DIBL 系数 η
        v_t: 热电压 (V)
        alpha: 速度饱和指数，取值 [1, 2]
        vdd: 电源电压 (V)
    """
    mu0_cox: float
    vth0: float
    dvth: float = 0.0
    m: float = 1.5
    gamma_prime: float = 0.0
    eta: float = 0.05
    v_t: float = DeviceDefaults.THERMAL_VOLTAGE
    alpha: float = 1.3
    vdd: float = 1.0

    def __post_init__(self):
        for name in DeviceDefaults.PARAM_KEYS:
            _require(math.isfinite(getattr(self, name)), f"参数 {name} 不是有限数")
        for name in ('mu0_cox', 'vth0', 'm', 'v_t', 'alpha', 'vdd'):
            _require(getattr(self, name) > 0, f"参数 {name} 必须为正: {getattr(self, name)}")
        for name in ('dvth', 'gamma_prime', 'eta'):
            _require(getattr(self, name) >= 0, f"参数 {name} 不能为负: {getattr(self, name)}")
        _require(1.0 <= self.alpha <= 2.0, f"alpha 必须在 [1, 2] 内: {self.alpha}")
        _require(self.vth0 < self.vdd, f"vth0 必须小于 vdd: vth0={self.vth0}, vdd={self.vdd}")

    @property
    def vth(self) -> float:
        """器件阈值 vth0 + Δvth"""
        return self.vth0 + self.dvth
