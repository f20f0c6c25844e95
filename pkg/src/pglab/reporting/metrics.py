#!/usr/bin/env python3
"""
派生百分比指标
"""

from ..models.base import DomainError
from ..models.power import power_reduction


def _percent_change(value: float, reference: float, name: str) -> float:
    if reference <= 0:
        raise DomainError(f"{name} 的参考值必须为正: {reference}")
    return 100.0 * (value - reference) / reference


def delta_d_over_d(d: float, d0: float) -> float:
    """相对未门控延迟的延迟退化 (%)"""
    return _percent_change(d, d0, "Δd/d")


def shift_from_dbc(d: float, d_bc: float) -> float:
    """相对 d_BC 的延迟偏移 (%)"""
    return _percent_change(d, d_bc, "d_BC 偏移")


def improvement_over_dbc(d: float, d_bc: float) -> float:
    """相对 d_BC 的性能提升 (%)"""
    if d_bc <= 0:
        raise DomainError(f"d_BC 提升的参考值必须为正: {d_bc}")
    return 100.0 * (d_bc - d) / d_bc


__all__ = ['delta_d_over_d', 'shift_from_dbc', 'improvement_over_dbc', 'power_reduction']
