#!/usr/bin/env python3
"""
门控策略测试
"""

import math
import unittest

from src.pglab.config import DEFAULT_LIBRARY_FILE, ClusterKind, SleepMode
from src.pglab.models import (
    DeviceParams, DomainError, InfeasibleError, Geometry,
    load_cell_library, generate_multiplier4x4, critical_path, gated_timing,
    Cluster, SleepTransistor, GatingPlan, solve_vst, select_min_width, conventional_gating,
    cbstd_partition, cbstd_select_width, cbstd_gating, tunable_effective_width, tunable_control,
    tunable_plan, tunable_sweep, all_words
)
from src.pglab.reporting import load_paper_dataset

NM = 1e-9
VTH = 0.01


def library():
    with open(DEFAULT_LIBRARY_FILE, 'r', encoding='utf-8') as f:
        return load_cell_library(f.read())


class TestSolveVst(unittest.TestCase):
    """vST 自洽求解测试"""

    def setUp(self):
        self.p = DeviceParams(mu0_cox=2e-4, vth0=0.4, alpha=1.17)

    def test_zero_resistance(self):
        self.assertEqual(solve_vst(1e-4, 0.0, self.p, VTH), 0.0)

    def test_self_consistent_root(self):
        for i_peak, r_on in ((2.76e-4, 361.16), (8.9e-5, 1872.66), (1e-3, 500.0)):
            v = solve_vst(i_peak, r_on, self.p, VTH)
            headroom = 1.0 - VTH
            self.assertAlmostEqual(v, r_on * i_peak * ((headroom - v) / headroom) ** 1.17, delta=1e-8)
            self.assertLess(v, r_on * i_peak)
            self.assertGreater(v, 0.0)

    def test_constant_current_limit(self):
        self.assertAlmostEqual(solve_vst(1e-4, 500.0, self.p, VTH, alpha=0), 0.05)
        with self.assertRaises(InfeasibleError):
            solve_vst(1e-2, 500.0, self.p, VTH, alpha=0)

    def test_invalid_arguments(self):
        with self.assertRaises(DomainError):
            solve_vst(0.0, 100.0, self.p, VTH)
        with self.assertRaises(DomainError):
            solve_vst(1e-4, -1.0, self.p, VTH)


class TestWidthSelection(unittest.TestCase):
    """按参考表数据选宽"""

    @classmethod
    def setUpClass(cls):
        cls.ds = load_paper_dataset()

    def test_conventional_table_selects_700(self):
        values = {row.w_nm: row.vst_mv / 1000 for row in self.ds.conventional}
        self.assertEqual(select_min_width(values, values, 0.1), 700)

    def test_cbstd_table_selects_400(self):
        delays = {row.w_nm: row.delay for row in self.ds.cbstd}
        self.assertEqual(cbstd_select_width(list(delays), delays, 2.6052e-10, 1.10), 400)

    def test_candidate_order_does_not_matter(self):
        values = {1: 5.0, 2: 3.0, 3: 1.0}
        self.assertEqual(select_min_width([3, 1, 2], values, 3.0), 2)

    def test_nothing_fits(self):
        values = {row.w_nm: row.vst_mv / 1000 for row in self.ds.conventional}
        with self.assertRaises(InfeasibleError):
            select_min_width(values, values, 0.05)


class TestConventionalAndCbstd(unittest.TestCase):
    """常规门控与 CBSTD 测试"""

    @classmethod
    def setUpClass(cls):
        cls.p = DeviceParams(mu0_cox=2e-4, vth0=0.4, alpha=1.17)
        cls.c = generate_multiplier4x4(library())
        cls.tr = critical_path(cls.c, cls.p, VTH)
        cls.conv = conventional_gating(cls.c, (135 * NM, 270 * NM, 400 * NM, 540 * NM, 700 * NM),
                                       cls.p, vth=VTH, tr=cls.tr)

    def test_conventional_selection(self):
        st = self.conv.st_per_cluster['all']
        self.assertAlmostEqual(st.geom.w, 700 * NM, delta=1e-15)
        self.assertAlmostEqual(self.conv.vst_per_cluster['all'], 0.0893, delta=5e-4)
        self.assertEqual(len(self.conv.clusters), 1)
        self.assertEqual(self.conv.clusters[0].gate_ids, frozenset(self.c.gate_map))

    def test_conventional_sizing_rows(self):
        rows = {round(r.width / NM): r for r in self.conv.sizing}
        self.assertFalse(rows[540].feasible)
        self.assertGreater(rows[540].vst, 0.1)
        self.assertTrue(rows[700].feasible)
        vsts = [r.vst for r in self.conv.sizing]
        self.assertEqual(vsts, sorted(vsts, reverse=True))

    def test_best_case_delay(self):
        self.assertTrue(math.isclose(self.conv.gated_delay, 2.66719e-10, rel_tol=1e-3))
        self.assertGreater(self.conv.gated_delay, self.tr.d0)

    def test_conventional_infeasible(self):
        with self.assertRaises(InfeasibleError):
            conventional_gating(self.c, (135 * NM, 270 * NM), self.p, vth=VTH, tr=self.tr)

    def test_cbstd_partition(self):
        clusters = cbstd_partition(self.c, self.tr, n_nc=1)
        crit, nc = clusters
        self.assertEqual(crit.kind, ClusterKind.CRITICAL)
        self.assertEqual(crit.gate_ids, frozenset(self.tr.critical_path))
        self.assertTrue(math.isclose(crit.i_peak, 8.9e-5, rel_tol=1e-12))
        self.assertEqual(nc.kind, ClusterKind.NON_CRITICAL)
        self.assertEqual(len(nc.gate_ids), 21)
        self.assertTrue(math.isclose(nc.i_peak, 1.87e-4, rel_tol=1e-12))

    def test_cbstd_partition_several_nc(self):
        clusters = cbstd_partition(self.c, self.tr, n_nc=3)
        self.assertEqual([cl.id for cl in clusters], ['critical', 'nc0', 'nc1', 'nc2'])
        members = [g for cl in clusters for g in cl.gate_ids]
        self.assertEqual(sorted(members), sorted(self.c.gate_map))
        with self.assertRaises(DomainError):
            cbstd_partition(self.c, self.tr, n_nc=0)

    def test_cbstd_selection(self):
        d_bc = self.conv.gated_delay
        plan = cbstd_gating(self.c, self.tr, (100 * NM, 135 * NM, 270 * NM, 400 * NM), self.p,
                            d_bc, vth=VTH)
        self.assertAlmostEqual(plan.st_per_cluster['critical'].geom.w, 135 * NM, delta=1e-15)
        self.assertAlmostEqual(plan.st_per_cluster['nc0'].geom.w, 270 * NM, delta=1e-15)
        self.assertAlmostEqual(plan.vst_per_cluster['critical'], 0.1395, delta=5e-4)
        self.assertAlmostEqual(plan.vst_per_cluster['nc0'], 0.1454, delta=1e-3)
        self.assertLessEqual(plan.gated_delay, 1.10 * d_bc)
        self.assertGreater(plan.gated_delay, self.tr.d0)

        rows = {round(r.width / NM): r for r in plan.sizing}
        self.assertFalse(rows[100].feasible)
        self.assertGreater(rows[100].delay, 1.10 * d_bc)

    def test_cbstd_delay_matches_sta(self):
        d_bc = self.conv.gated_delay
        plan = cbstd_gating(self.c, self.tr, (135 * NM,), self.p, d_bc, vth=VTH)
        self.assertEqual(gated_timing(self.c, plan.vst_per_gate(), self.p, VTH).d0, plan.gated_delay)

    def test_cbstd_budget_infeasible(self):
        with self.assertRaises(InfeasibleError):
            cbstd_gating(self.c, self.tr, (100 * NM,), self.p, self.conv.gated_delay, vth=VTH)


class TestTunableCell(unittest.TestCase):
    """可调睡眠晶体管单元测试"""

    @classmethod
    def setUpClass(cls):
        cls.p = DeviceParams(mu0_cox=2e-4, vth0=0.4, alpha=1.17)
        cls.lib = library()
        cls.c = generate_multiplier4x4(cls.lib)
        cls.tr = critical_path(cls.c, cls.p, VTH)
        cls.clusters = cbstd_partition(cls.c, cls.tr)

    def test_effective_width(self):
        self.assertTrue(math.isclose(tunable_effective_width("1000", 135 * NM), 540 * NM, rel_tol=1e-12))
        self.assertTrue(math.isclose(tunable_effective_width("0001", 135 * NM), 135 * NM, rel_tol=1e-12))
        self.assertTrue(math.isclose(tunable_effective_width("1111", 100 * NM), 1000 * NM, rel_tol=1e-12))
        self.assertEqual(tunable_effective_width("0000", 135 * NM), 0.0)

    def test_invalid_words(self):
        for word in ("100", "10a0", "10000", 1000):
            with self.assertRaises(DomainError):
                tunable_effective_width(word, 135 * NM)

    def test_control_gating(self):
        self.assertEqual(tunable_control(1, "1010"), "1010")
        self.assertEqual(tunable_control(0, "1111"), "0000")
        with self.assertRaises(DomainError):
            tunable_control(2, "1111")

    def test_sleep_transistor_modes(self):
        st = SleepTransistor(Geometry(540 * NM, 45 * NM), SleepMode.TUNABLE, "1000")
        self.assertEqual(st.slpbar1, 1)
        with self.assertRaises(DomainError):
            SleepTransistor(Geometry(540 * NM, 45 * NM), SleepMode.TUNABLE)
        with self.assertRaises(DomainError):
            SleepTransistor(Geometry(540 * NM, 45 * NM), SleepMode.FIXED, "1000")

    def test_nominal_word(self):
        plan = tunable_plan(self.c, self.tr, self.clusters, "1000", 135 * NM, self.p, vth=VTH,
                            control_cell=self.lib['AND2_CTRL'])
        st = plan.st_per_cluster['critical']
        self.assertEqual(st.mode, SleepMode.TUNABLE)
        self.assertEqual(st.word, "1000")
        self.assertTrue(math.isclose(st.geom.w, 540 * NM, rel_tol=1e-12))
        self.assertAlmostEqual(plan.vst_per_cluster['critical'], 0.0397, delta=3e-4)
        self.assertEqual(len(plan.control_cells), 4)
        self.assertGreater(plan.gated_delay, self.tr.d0)

    def test_all_off_word_is_infeasible(self):
        with self.assertRaises(InfeasibleError):
            tunable_plan(self.c, self.tr, self.clusters, "0000", 135 * NM, self.p, vth=VTH)

    def test_wider_than_cbstd_is_faster(self):
        cbstd = cbstd_gating(self.c, self.tr, (135 * NM,), self.p, 1.0, budget=10.0, vth=VTH)
        tunable = tunable_plan(self.c, self.tr, self.clusters, "1000", 135 * NM, self.p, vth=VTH)
        self.assertLess(tunable.gated_delay, cbstd.gated_delay)

    def test_sweep(self):
        seen = []
        rows = tunable_sweep(self.c, self.tr, self.clusters, 135 * NM, self.p, vth=VTH,
                             control_cell=self.lib['AND2_CTRL'], progress=seen.append)
        self.assertEqual([r.word for r in rows], all_words())
        self.assertEqual(seen, all_words())

        first = rows[0]
        self.assertEqual(first.word, "0000")
        self.assertFalse(first.feasible)
        self.assertIsNone(first.vgnd1)
        self.assertIsNone(first.delay)
        self.assertIsNone(first.avg_power)

        feasible = sorted((r for r in rows if r.feasible), key=lambda r: r.eff_width)
        self.assertEqual(len(feasible), 15)
        for a, b in zip(feasible, feasible[1:]):
            if a.eff_width == b.eff_width:
                self.assertEqual(a.delay, b.delay)
                self.assertEqual(a.avg_power, b.avg_power)
            else:
                self.assertGreater(a.delay, b.delay)
                self.assertLess(a.avg_power, b.avg_power)
                self.assertGreater(a.vgnd1, b.vgnd1)

    def test_all_words(self):
        words = all_words()
        self.assertEqual(len(words), 16)
        self.assertEqual(words[0], "0000")
        self.assertEqual(words[-1], "1111")
        self.assertEqual(words, sorted(words))


class TestGatingPlan(unittest.TestCase):
    """门控方案不变式测试"""

    def test_overlapping_clusters_rejected(self):
        a = Cluster("a", {"g1", "g2"}, ClusterKind.CRITICAL, 1e-5)
        b = Cluster("b", {"g2"}, ClusterKind.NON_CRITICAL, 1e-5)
        st = SleepTransistor(Geometry(135 * NM, 45 * NM))
        with self.assertRaises(DomainError):
            GatingPlan("cbstd", (a, b), {"a": st, "b": st})

    def test_missing_sleep_transistor(self):
        a = Cluster("a", {"g1"}, ClusterKind.CRITICAL, 1e-5)
        with self.assertRaises(DomainError):
            GatingPlan("cbstd", (a,), {})

    def test_cluster_validation(self):
        with self.assertRaises(DomainError):
            Cluster("a", set(), ClusterKind.CRITICAL, 1e-5)
        with self.assertRaises(DomainError):
            Cluster("a", {"g1"}, ClusterKind.CRITICAL, 0.0)
        with self.assertRaises(DomainError):
            Cluster("a", {"g1"}, "OTHER", 1e-5)


if __name__ == '__main__':
    unittest.main()
