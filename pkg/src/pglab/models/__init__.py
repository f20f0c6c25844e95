#!/usr/bin/env python3
"""
电源门控分析模型
"""

from .base import (
    PgLabError, DomainError, FileFormatError, NetlistError, ParamsFileError,
    InfeasibleError, ReportError, Geometry, BiasPoint, DeviceParams
)
from .device_model import (
    subthreshold_current, leakage_per_square, gate_delay, gated_delay,
    delay_degradation_linear, sleep_transistor_resistance, sleep_transistor_beta,
    size_sleep_transistor, on_resistance
)
from .netlist import (
    CellDef, GateInstance, Circuit, RowAssignment,
    parse_netlist, write_netlist, load_cell_library, evaluate, generate_multiplier4x4,
    assign_rows, with_rows, row_assignment_from_tags, apply_mccmos,
    bus, word_assignment, word_value
)
from .timing import (
    TimingResult, DelayFit, topological_order, gate_delays, longest_path,
    critical_path, gated_timing, circuit_delay_gated, fit_delay_model
)
from .gating import (
    Cluster, SleepTransistor, SizingRow, GatingPlan, SweepRow,
    cluster_current, solve_vst, select_min_width, conventional_gating,
    cbstd_partition, cbstd_select_width, cbstd_gating,
    tunable_effective_width, tunable_control, tunable_plan, tunable_sweep, all_words
)
from .rail_network import (
    RailNetwork, RailSolution, IrVerdict, DstnResult,
    build_dstn, solve_rail_voltages, check_ir_constraint, dstn_size, dstn_plan
)
from .power import (
    PowerParams, PowerReport, st_standby_current, standby_leakage, active_leakage,
    total_capacitance, dynamic_power, average_power, power_reduction
)

__all__ = [
    # 异常与基础类型
    'PgLabError', 'DomainError', 'FileFormatError', 'NetlistError', 'ParamsFileError',
    'InfeasibleError', 'ReportError', 'Geometry', 'BiasPoint', 'DeviceParams',

    # 器件模型
    'subthreshold_current', 'leakage_per_square', 'gate_delay', 'gated_delay',
    'delay_degradation_linear', 'sleep_transistor_resistance', 'sleep_transistor_beta',
    'size_sleep_transistor', 'on_resistance',

    # 网表
    'CellDef', 'GateInstance', 'Circuit', 'RowAssignment',
    'parse_netlist', 'write_netlist', 'load_cell_library', 'evaluate', 'generate_multiplier4x4',
    'assign_rows', 'with_rows', 'row_assignment_from_tags', 'apply_mccmos',
    'bus', 'word_assignment', 'word_value',

    # 时序
    'TimingResult', 'DelayFit', 'topological_order', 'gate_delays', 'longest_path',
    'critical_path', 'gated_timing', 'circuit_delay_gated', 'fit_delay_model',

    # 门控策略
    'Cluster', 'SleepTransistor', 'SizingRow', 'GatingPlan', 'SweepRow',
    'cluster_current', 'solve_vst', 'select_min_width', 'conventional_gating',
    'cbstd_partition', 'cbstd_select_width', 'cbstd_gating',
    'tunable_effective_width', 'tunable_control', 'tunable_plan', 'tunable_sweep', 'all_words',

    # DSTN
    'RailNetwork', 'RailSolution', 'IrVerdict', 'DstnResult',
    'build_dstn', 'solve_rail_voltages', 'check_ir_constraint', 'dstn_size', 'dstn_plan',

    # 功耗
    'PowerParams', 'PowerReport', 'st_standby_current', 'standby_leakage', 'active_leakage',
    'total_capacitance', 'dynamic_power', 'average_power', 'power_reduction'
]
