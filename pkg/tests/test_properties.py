#!/usr/bin/env python3
"""
基于 hypothesis 的性质测试
"""

import unittest

import numpy as np
from hypothesis import given, settings, strategies as st

from src.pglab.config import DEFAULT_LIBRARY_FILE, ClusterKind, Strategies
from src.pglab.config.params import load_device_params
from src.pglab.models import (
    DeviceParams, Geometry, Cluster, SleepTransistor, GatingPlan, RailNetwork, CellDef, GateInstance, Circuit,
    load_cell_library, generate_multiplier4x4, critical_path, assign_rows, topological_order,
    solve_vst, on_resistance, gated_delay, solve_rail_voltages, cbstd_partition, tunable_sweep,
    standby_leakage, circuit_delay_gated
)

NM = 1e-9
VTH = 0.01
P = DeviceParams(mu0_cox=2e-4, vth0=0.4, alpha=1.17)

with open(DEFAULT_LIBRARY_FILE, 'r', encoding='utf-8') as _f:
    LIB = load_cell_library(_f.read())
MULT = generate_multiplier4x4(LIB)
TR = critical_path(MULT, P, VTH)

widths = st.floats(min_value=50 * NM, max_value=5000 * NM)
currents = st.floats(min_value=1e-6, max_value=1e-3)


class TestSleepTransistorProperties(unittest.TestCase):
    """睡眠晶体管尺寸与压降的性质"""

    @settings(max_examples=200, deadline=None)
    @given(currents, widths, st.floats(min_value=1.01, max_value=10.0))
    def test_wider_transistor_lowers_vst(self, i_peak, width, ratio):
        narrow = solve_vst(i_peak, on_resistance(Geometry(width, 45 * NM), P, 0.1, VTH), P, VTH)
        wide = solve_vst(i_peak, on_resistance(Geometry(width * ratio, 45 * NM), P, 0.1, VTH), P, VTH)
        self.assertLessEqual(wide, narrow + 2e-9)
        self.assertGreater(narrow, 0.0)
        self.assertLess(narrow, P.vdd - VTH)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(min_value=0.0, max_value=0.6), st.floats(min_value=0.0, max_value=0.6))
    def test_gated_delay_monotone_in_vst(self, a, b):
        low, high = sorted((a, b))
        d_low = gated_delay(1e-10, low, P, VTH)
        d_high = gated_delay(1e-10, high, P, VTH)
        self.assertGreaterEqual(d_low, 1e-10)
        self.assertLessEqual(d_low, d_high * (1 + 1e-12))

    @settings(max_examples=30, deadline=None)
    @given(currents, widths)
    def test_vst_matches_dense_scan(self, i_peak, width):
        """二分结果落在 1e6 步扫描的变号区间内"""
        r_on = on_resistance(Geometry(width, 45 * NM), P, 0.1, VTH)
        v = solve_vst(i_peak, r_on, P, VTH)
        headroom = P.vdd - VTH
        grid = np.linspace(0.0, headroom, 1_000_001)
        residual = grid - i_peak * r_on * ((headroom - grid) / headroom) ** P.alpha
        k = int(np.argmax(residual >= 0))
        self.assertGreater(k, 0)
        self.assertGreaterEqual(v, grid[k - 1] - 1e-9)
        self.assertLessEqual(v, grid[k] + 1e-9)

    @settings(max_examples=200, deadline=None)
    @given(widths)
    def test_gating_lowers_standby_leakage(self, width):
        p = load_device_params()
        cluster = Cluster("all", frozenset(MULT.gate_map), ClusterKind.CRITICAL, 2.76e-4)
        plan = GatingPlan(Strategies.CONVENTIONAL, (cluster,),
                          {"all": SleepTransistor(Geometry(width, 45 * NM))})
        self.assertLess(standby_leakage(MULT, plan, p), standby_leakage(MULT, None, p))


class TestRailProperties(unittest.TestCase):
    """虚拟地轨节点电压的性质"""

    @settings(max_examples=200, deadline=None)
    @given(st.data())
    def test_voltages_bounded_by_isolated_rows(self, data):
        n = data.draw(st.integers(min_value=1, max_value=12))
        g_st = data.draw(st.lists(st.floats(min_value=1e-4, max_value=1e-1), min_size=n, max_size=n))
        i_inj = data.draw(st.lists(st.floats(min_value=0.0, max_value=1e-3), min_size=n, max_size=n))
        r_rail = data.draw(st.floats(min_value=1.0, max_value=1e6))
        sol = solve_rail_voltages(RailNetwork(n, r_rail, tuple(g_st), tuple(i_inj)))

        isolated = [i / g for i, g in zip(i_inj, g_st)]
        for v in sol.v:
            self.assertGreaterEqual(v, min(isolated) * (1 - 1e-9) - 1e-15)
            self.assertLessEqual(v, max(isolated) * (1 + 1e-9) + 1e-15)

    @settings(max_examples=200, deadline=None)
    @given(st.data())
    def test_voltages_monotone_in_conductance_and_current(self, data):
        n = data.draw(st.integers(min_value=1, max_value=12))
        g_st = data.draw(st.lists(st.floats(min_value=1e-4, max_value=1e-1), min_size=n, max_size=n))
        i_inj = data.draw(st.lists(st.floats(min_value=0.0, max_value=1e-3), min_size=n, max_size=n))
        r_rail = data.draw(st.floats(min_value=1.0, max_value=1e6))
        k = data.draw(st.integers(min_value=0, max_value=n - 1))
        base = solve_rail_voltages(RailNetwork(n, r_rail, tuple(g_st), tuple(i_inj)))

        stronger = list(g_st)
        stronger[k] *= data.draw(st.floats(min_value=1.0, max_value=10.0))
        lowered = solve_rail_voltages(RailNetwork(n, r_rail, tuple(stronger), tuple(i_inj)))
        for low, v in zip(lowered.v, base.v):
            self.assertLessEqual(low, v * (1 + 1e-9) + 1e-15)

        more = list(i_inj)
        more[k] += data.draw(st.floats(min_value=0.0, max_value=1e-3))
        raised = solve_rail_voltages(RailNetwork(n, r_rail, tuple(g_st), tuple(more)))
        for v, high in zip(base.v, raised.v):
            self.assertLessEqual(v, high * (1 + 1e-9) + 1e-15)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(min_value=1, max_value=12), st.floats(min_value=1.0, max_value=1e6))
    def test_zero_current_gives_zero_voltages(self, n, r_rail):
        sol = solve_rail_voltages(RailNetwork(n, r_rail, (1e-3,) * n, (0.0,) * n))
        self.assertEqual(list(sol.v), [0.0] * n)
        self.assertEqual(sol.max_v, 0.0)


def _unit_cell(name: str, n_inputs: int, cl: float) -> CellDef:
    # k = 1、vth = 0 时门延迟正好等于 cl，路径和没有舍入
    return CellDef(name, n_inputs, cl, 1.0, 1e-6, 1e-9, Geometry(90 * NM, 45 * NM), name)


UNIT_CELLS = {'BUF': _unit_cell('BUF', 1, 1.0), 'AND2': _unit_cell('AND2', 2, 2.0)}


@st.composite
def random_dags(draw, max_gates: int = 40, max_and2: int = 8):
    """随机组合电路：每个门只读主输入或编号更小的门的输出"""
    n = draw(st.integers(min_value=1, max_value=max_gates))
    inputs = tuple(f"x{k}" for k in range(draw(st.integers(min_value=1, max_value=4))))
    names = draw(st.permutations(range(n)))
    nets = list(inputs)
    gates = []
    readers = set()
    n_and2 = 0
    for i in range(n):
        wide = n_and2 < max_and2 and len(nets) >= 2 and draw(st.booleans())
        if wide:
            n_and2 += 1
            picked = draw(st.lists(st.sampled_from(nets), min_size=2, max_size=2, unique=True))
        else:
            picked = [draw(st.sampled_from(nets))]
        out = f"n{i}"
        gates.append(GateInstance(f"g{names[i]:02d}", UNIT_CELLS['AND2' if wide else 'BUF'], picked, (out,)))
        readers.update(picked)
        nets.append(out)
    sinks = [g.outputs[0] for g in gates if g.outputs[0] not in readers]
    extra = draw(st.lists(st.sampled_from([g.outputs[0] for g in gates]), max_size=3, unique=True))
    outputs = tuple(sinks + [net for net in extra if net not in sinks])
    return Circuit(UNIT_CELLS, tuple(gates), inputs, outputs)


def all_paths(c: Circuit):
    """深度优先列出从无前驱的门到输出端门的全部路径"""
    graph = c.graph
    endpoints = {c.driver_map[net] for net in c.primary_outputs}
    paths = []

    def walk(path):
        if path[-1] in endpoints:
            paths.append(path)
        for nxt in graph.successors(path[-1]):
            walk(path + (nxt,))

    for g in graph.nodes:
        if graph.in_degree(g) == 0:
            walk((g,))
    return paths


class TestTimingProperties(unittest.TestCase):
    """STA 与门控延迟的性质"""

    @settings(max_examples=100, deadline=None)
    @given(random_dags())
    def test_critical_path_matches_brute_force(self, c):
        tr = critical_path(c, P, 0.0)
        lengths = {path: sum(c.gate_map[g].cell.cl for g in path) for path in all_paths(c)}
        longest = max(lengths.values())
        self.assertEqual(tr.d0, longest)
        self.assertEqual(tr.critical_path, min(path for path, length in lengths.items() if length == longest))

    @settings(max_examples=100, deadline=None)
    @given(st.data())
    def test_delay_monotone_in_each_gate_vst(self, data):
        gates = sorted(MULT.gate_map)
        vst = {g: data.draw(st.floats(min_value=0.0, max_value=0.4)) for g in gates}
        target = data.draw(st.sampled_from(gates))
        raised = dict(vst)
        raised[target] += data.draw(st.floats(min_value=0.0, max_value=0.4))
        self.assertGreaterEqual(circuit_delay_gated(MULT, TR, raised, P, VTH),
                                circuit_delay_gated(MULT, TR, vst, P, VTH))


class TestNetlistProperties(unittest.TestCase):
    """行划分的性质"""

    @settings(max_examples=50, deadline=None)
    @given(st.integers(min_value=1, max_value=28))
    def test_rows_balanced_and_ordered(self, n_rows):
        rows = assign_rows(MULT, n_rows)
        sizes = [len(rows.members(r)) for r in range(n_rows)]
        self.assertEqual(sum(sizes), len(MULT.gates))
        self.assertLessEqual(max(sizes) - min(sizes), 1)
        order = [rows.mapping[g] for g in topological_order(MULT)]
        self.assertEqual(order, sorted(order))


class TestSweepProperties(unittest.TestCase):
    """可调单元扫描的单调性"""

    @settings(max_examples=10, deadline=None)
    @given(st.floats(min_value=60 * NM, max_value=400 * NM))
    def test_sweep_monotone_in_width(self, w_unit):
        clusters = cbstd_partition(MULT, TR)
        rows = tunable_sweep(MULT, TR, clusters, w_unit, P, vth=VTH)
        feasible = sorted((r for r in rows if r.feasible), key=lambda r: r.eff_width)
        self.assertEqual(len(feasible), 15)
        for a, b in zip(feasible, feasible[1:]):
            self.assertGreaterEqual(a.delay, b.delay)
            self.assertGreaterEqual(a.vgnd1 + 2e-9, b.vgnd1)
            self.assertLessEqual(a.avg_power, b.avg_power * (1 + 1e-12))


if __name__ == '__main__':
    unittest.main()
